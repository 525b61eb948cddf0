import { describe, expect, test } from "vitest";

import { CursorCoalescer, SessionClient, WsLike } from "../src/client.js";

class FakeWs implements WsLike {
  binaryType = "blob";
  sent: string[] = [];
  closed = false;
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
    this.onclose?.();
  }
}

interface Timer {
  fn: () => void;
  ms: number;
}

function harness() {
  const sockets: FakeWs[] = [];
  const timers: Timer[] = [];
  let t = 0;
  const client = new SessionClient({
    url: "ws://test/session",
    wsFactory: () => {
      const ws = new FakeWs();
      sockets.push(ws);
      return ws;
    },
    now: () => t,
    setTimer: (fn, ms) => (timers.push({ fn, ms }), timers.length - 1),
    clearTimer: () => undefined,
    backoffInitialMs: 500,
    backoffMaxMs: 4000,
  });
  return {
    client,
    sockets,
    timers,
    advance: (dt: number) => {
      t += dt;
    },
    open: () => {
      client.connect();
      const ws = sockets[sockets.length - 1];
      ws.onopen?.();
      return ws;
    },
  };
}

describe("cursor coalescing", () => {
  test("forwards at most maxRate messages per second, keeping the newest", () => {
    const sent: [number, number][] = [];
    const c = new CursorCoalescer(120, (x, y) => sent.push([x, y]));
    c.offer(0.1, 0.5, 0.0);
    for (let i = 1; i <= 10; i++) c.offer(0.1 + i / 100, 0.5, 0.0001 * i);
    expect(sent).toHaveLength(1); // burst within one budget slot
    expect(c.hasPending()).toBe(true);
    c.flush(1 / 120 + 1e-6);
    expect(sent).toHaveLength(2);
    expect(sent[1][0]).toBeCloseTo(0.2); // latest position wins
  });

  test("spaced moves all pass", () => {
    const sent: [number, number][] = [];
    const c = new CursorCoalescer(120, (x, y) => sent.push([x, y]));
    for (let i = 0; i < 5; i++) c.offer(i / 10, 0.5, i * 0.02);
    expect(sent).toHaveLength(5);
  });
});

describe("SessionClient", () => {
  test("sends cursor messages with session-relative time", () => {
    const h = harness();
    const ws = h.open();
    h.advance(0.25);
    h.client.cursorMove(0.3, 0.6);
    const msg = JSON.parse(ws.sent[0]);
    expect(msg).toEqual({ type: "cursor", t: 0.25, x: 0.3, y: 0.6 });
  });

  test("threshold and radius controls clamp and push lens state", () => {
    const h = harness();
    const ws = h.open();
    h.client.toggleLens();
    expect(JSON.parse(ws.sent[0]).type).toBe("lens");
    for (let i = 0; i < 30; i++) h.client.adjustThreshold(+0.05);
    expect(h.client.lens.threshold).toBe(1);
    for (let i = 0; i < 40; i++) h.client.adjustThreshold(-0.05);
    expect(h.client.lens.threshold).toBe(0);
    for (let i = 0; i < 99; i++) h.client.adjustRadius(1.1);
    expect(h.client.lens.radius).toBeLessThanOrEqual(0.5);
    for (let i = 0; i < 99; i++) h.client.adjustRadius(1 / 1.1);
    expect(h.client.lens.radius).toBeGreaterThanOrEqual(0.02);
  });

  test("routes hello, pluck, and audio frames", () => {
    const h = harness();
    const ws = h.open();
    const seen: string[] = [];
    h.client.on("hello", (f) => seen.push(`hello:${f.dataset.lines}`));
    h.client.on("pluck", (f) => seen.push(`pluck:${f.line_id}`));
    h.client.on("audio", (f) => seen.push(`audio:${f.seq}:${f.samples.length}`));
    ws.onmessage?.({
      data: '{"type":"hello","dataset":{"lines":8,"metadata":{}},"sample_rate":44100,"block_frames":256}',
    });
    ws.onmessage?.({
      data: '{"type":"pluck","line_id":3,"x":0,"y":0,"amplitude":1,"frequency":440,"t":0.5,"decay":0.4,"kind":"move"}',
    });
    const buf = new ArrayBuffer(8 + 8);
    new DataView(buf).setBigUint64(0, 7n, true);
    ws.onmessage?.({ data: buf });
    expect(seen).toEqual(["hello:8", "pluck:3", "audio:7:2"]);
    expect(h.client.hello?.sample_rate).toBe(44100);
  });

  test("reconnects with doubling capped backoff, resets on success", () => {
    const h = harness();
    const ws = h.open();
    ws.onclose?.();
    expect(h.timers.map((t) => t.ms)).toEqual([500]);
    h.timers[0].fn(); // reconnect attempt 1 -> new socket
    h.sockets[1].onclose?.();
    h.timers[1].fn();
    h.sockets[2].onclose?.();
    expect(h.timers.map((t) => t.ms)).toEqual([500, 1000, 2000]);
    h.timers[2].fn();
    h.sockets[3].onopen?.(); // success resets backoff
    h.sockets[3].onclose?.();
    expect(h.timers[3].ms).toBe(500);
    expect(h.client.reconnectAttempts).toBe(4);
  });

  test("busy frame and explicit close stop reconnecting", () => {
    const h = harness();
    const ws = h.open();
    ws.onmessage?.({ data: '{"type":"busy"}' });
    ws.onclose?.();
    expect(h.timers).toHaveLength(0);

    const h2 = harness();
    const ws2 = h2.open();
    h2.client.close();
    expect(ws2.closed).toBe(true);
    expect(h2.timers).toHaveLength(0);
  });
});
