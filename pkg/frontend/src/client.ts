// WebSocket session client: typed frames in/out, cursor coalescing to the
// input budget, lens state management, and reconnect with capped backoff.

import {
  AudioFrame,
  HelloFrame,
  LensState,
  PluckFrame,
  ServerFrame,
  StatsFrame,
  cursorMessage,
  decodeAudioFrame,
  lensMessage,
  parseServerFrame,
  playbackMessage,
} from "./protocol.js";

export interface WsLike {
  binaryType: string;
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type WsFactory = (url: string) => WsLike;

export interface ClientOptions {
  url: string;
  wsFactory?: WsFactory;
  now?: () => number; // seconds
  setTimer?: (fn: () => void, ms: number) => unknown;
  clearTimer?: (handle: unknown) => void;
  maxCursorRate?: number; // messages per second
  reconnect?: boolean;
  backoffInitialMs?: number;
  backoffMaxMs?: number;
}

export interface ClientEvents {
  open: () => void;
  hello: (frame: HelloFrame) => void;
  pluck: (frame: PluckFrame) => void;
  stats: (frame: StatsFrame) => void;
  audio: (frame: AudioFrame) => void;
  error: (message: string) => void;
  close: () => void;
  busy: () => void;
}

/** Rate limiter that keeps only the newest unsent cursor position. */
export class CursorCoalescer {
  private lastSent = -Infinity;
  private pending: { x: number; y: number } | null = null;

  constructor(
    private maxRate: number,
    private send: (x: number, y: number) => void,
  ) {}

  offer(x: number, y: number, now: number): void {
    if (now - this.lastSent >= 1 / this.maxRate) {
      this.lastSent = now;
      this.pending = null;
      this.send(x, y);
    } else {
      this.pending = { x, y };
    }
  }

  flush(now: number): void {
    if (this.pending && now - this.lastSent >= 1 / this.maxRate) {
      const { x, y } = this.pending;
      this.pending = null;
      this.lastSent = now;
      this.send(x, y);
    }
  }

  hasPending(): boolean {
    return this.pending !== null;
  }
}

const defaultFactory: WsFactory = (url) =>
  new (globalThis as { WebSocket: new (url: string) => WsLike }).WebSocket(url);

export class SessionClient {
  readonly lens: LensState = {
    enabled: false,
    center: [0.5, 0.5],
    radius: 0.15,
    threshold: 0.5,
  };

  hello: HelloFrame | null = null;
  reconnectAttempts = 0;

  private ws: WsLike | null = null;
  private epoch = 0;
  private closedByUser = false;
  private backoffMs: number;
  private reconnectHandle: unknown = null;
  private handlers: { [K in keyof ClientEvents]?: ClientEvents[K][] } = {};
  private coalescer: CursorCoalescer;
  private readonly now: () => number;
  private readonly setTimer: (fn: () => void, ms: number) => unknown;
  private readonly clearTimer: (handle: unknown) => void;

  constructor(private opts: ClientOptions) {
    this.now = opts.now ?? (() => Date.now() / 1000);
    this.setTimer = opts.setTimer ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimer = opts.clearTimer ?? ((h) => clearTimeout(h as number));
    this.backoffMs = opts.backoffInitialMs ?? 500;
    this.coalescer = new CursorCoalescer(opts.maxCursorRate ?? 120, (x, y) => {
      this.ws?.send(cursorMessage(this.sessionTime(), x, y));
    });
  }

  on<K extends keyof ClientEvents>(event: K, fn: ClientEvents[K]): void {
    const list = (this.handlers[event] ??= []) as ClientEvents[K][];
    list.push(fn);
  }

  private emit<K extends keyof ClientEvents>(
    event: K,
    ...args: Parameters<ClientEvents[K]>
  ): void {
    for (const fn of this.handlers[event] ?? []) {
      (fn as (...a: Parameters<ClientEvents[K]>) => void)(...args);
    }
  }

  sessionTime(): number {
    return this.now() - this.epoch;
  }

  connect(): void {
    this.closedByUser = false;
    const factory = this.opts.wsFactory ?? defaultFactory;
    const ws = factory(this.opts.url);
    this.ws = ws;
    ws.binaryType = "arraybuffer";
    ws.onopen = () => {
      this.epoch = this.now();
      this.backoffMs = this.opts.backoffInitialMs ?? 500;
      this.emit("open");
    };
    ws.onmessage = (ev) => this.route(ev.data);
    ws.onerror = () => undefined; // close always follows
    ws.onclose = () => {
      this.ws = null;
      this.emit("close");
      if (!this.closedByUser && (this.opts.reconnect ?? true)) {
        this.scheduleReconnect();
      }
    };
  }

  private scheduleReconnect(): void {
    this.reconnectAttempts += 1;
    this.reconnectHandle = this.setTimer(() => this.connect(), this.backoffMs);
    this.backoffMs = Math.min(this.backoffMs * 2, this.opts.backoffMaxMs ?? 10_000);
  }

  private route(data: unknown): void {
    if (typeof data === "string") {
      let frame: ServerFrame;
      try {
        frame = parseServerFrame(data);
      } catch (e) {
        this.emit("error", String(e));
        return;
      }
      switch (frame.type) {
        case "hello":
          this.hello = frame;
          this.emit("hello", frame);
          break;
        case "pluck":
          this.emit("pluck", frame);
          break;
        case "stats":
          this.emit("stats", frame);
          break;
        case "busy":
          this.closedByUser = true; // another session owns the engine
          this.emit("busy");
          break;
        case "error":
          this.emit("error", frame.message);
          break;
      }
      return;
    }
    if (data instanceof ArrayBuffer) {
      this.emit("audio", decodeAudioFrame(data));
    }
  }

  connected(): boolean {
    return this.ws !== null;
  }

  // -- input side ----------------------------------------------------------

  cursorMove(x: number, y: number): void {
    this.coalescer.offer(x, y, this.now());
  }

  flushCursor(): void {
    this.coalescer.flush(this.now());
  }

  private pushLens(): void {
    this.ws?.send(lensMessage(this.lens));
  }

  toggleLens(): void {
    this.lens.enabled = !this.lens.enabled;
    this.pushLens();
  }

  moveLens(x: number, y: number): void {
    this.lens.center = [x, y];
    if (this.lens.enabled) this.pushLens();
  }

  adjustThreshold(delta: number): number {
    this.lens.threshold = Math.min(1, Math.max(0, this.lens.threshold + delta));
    if (this.lens.enabled) this.pushLens();
    return this.lens.threshold;
  }

  adjustRadius(factor: number): number {
    this.lens.radius = Math.min(0.5, Math.max(0.02, this.lens.radius * factor));
    if (this.lens.enabled) this.pushLens();
    return this.lens.radius;
  }

  triggerPlayback(): void {
    this.ws?.send(playbackMessage());
  }

  close(): void {
    this.closedByUser = true;
    if (this.reconnectHandle !== null) {
      this.clearTimer(this.reconnectHandle);
      this.reconnectHandle = null;
    }
    this.ws?.close();
    this.ws = null;
  }
}
