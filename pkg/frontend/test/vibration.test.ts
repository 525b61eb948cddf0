import { describe, expect, test } from "vitest";

import { VibrationRegistry } from "../src/vibration.js";

const FRAME = 1 / 60;

describe("VibrationRegistry", () => {
  test("runs for exactly the note's decay, within one animation frame", () => {
    const reg = new VibrationRegistry();
    reg.trigger(7, 0.4, 10.0);
    expect(reg.active(7, 10.0)).toBe(true);
    expect(reg.active(7, 10.4 - FRAME)).toBe(true);
    expect(reg.active(7, 10.4 + FRAME)).toBe(false);
    expect(reg.offset(7, 10.4 + FRAME)).toBe(0);
  });

  test("offset amplitude decays with the note envelope", () => {
    const reg = new VibrationRegistry({ pixelAmplitude: 3, frequencyHz: 12 });
    reg.trigger(1, 1.0, 0.0);
    // sample at quarter-cycle peaks of the 12 Hz wiggle
    const peak = (t: number) => Math.abs(reg.offset(1, t));
    const early = peak(1 / 48);
    const late = peak(1 / 48 + 0.5);
    expect(early).toBeGreaterThan(late);
    expect(early).toBeLessThanOrEqual(3);
    expect(late).toBeGreaterThan(0);
  });

  test("retrigger restarts the clock; prune drops expired entries", () => {
    const reg = new VibrationRegistry();
    reg.trigger(2, 0.2, 0.0);
    reg.trigger(2, 0.2, 0.15);
    expect(reg.active(2, 0.3)).toBe(true); // restarted at 0.15
    reg.trigger(3, 0.1, 0.0);
    reg.prune(0.3);
    expect(reg.activeCount(0.3)).toBe(1);
    expect(reg.active(3, 0.3)).toBe(false);
  });

  test("unknown lines sit still", () => {
    const reg = new VibrationRegistry();
    expect(reg.offset(99, 0)).toBe(0);
    expect(reg.active(99, 0)).toBe(false);
  });
});
