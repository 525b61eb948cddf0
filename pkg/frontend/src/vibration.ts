// Vibration feedback: a plucked line wiggles perpendicular to itself for
// exactly the note's effective decay, with the same exponential envelope
// the audio uses (-60 dB at the decay time).

const ENV_LN = Math.log(1000);

export interface VibrationParams {
  pixelAmplitude: number;
  frequencyHz: number;
}

export const DEFAULT_VIBRATION: VibrationParams = {
  pixelAmplitude: 3,
  frequencyHz: 12, // visual rate, deliberately decoupled from audio pitch
};

interface Entry {
  start: number;
  decay: number;
}

export class VibrationRegistry {
  private entries = new Map<number, Entry>();

  constructor(private params: VibrationParams = DEFAULT_VIBRATION) {}

  trigger(lineId: number, decay: number, now: number): void {
    this.entries.set(lineId, { start: now, decay });
  }

  active(lineId: number, now: number): boolean {
    const e = this.entries.get(lineId);
    return e !== undefined && now - e.start < e.decay;
  }

  activeCount(now: number): number {
    let n = 0;
    for (const [, e] of this.entries) if (now - e.start < e.decay) n += 1;
    return n;
  }

  /** Perpendicular pixel offset for a line, 0 when idle or expired. */
  offset(lineId: number, now: number): number {
    const e = this.entries.get(lineId);
    if (e === undefined) return 0;
    const t = now - e.start;
    if (t < 0 || t >= e.decay) return 0;
    const env = Math.exp((-ENV_LN * t) / e.decay);
    return (
      this.params.pixelAmplitude * env * Math.sin(2 * Math.PI * this.params.frequencyHz * t)
    );
  }

  prune(now: number): void {
    for (const [id, e] of this.entries) {
      if (now - e.start >= e.decay) this.entries.delete(id);
    }
  }
}
