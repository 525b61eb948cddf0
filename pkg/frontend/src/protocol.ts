// Wire types for the lineharp service: JSON control frames plus binary
// audio frames (8-byte little-endian sequence number + float32 mono PCM).

export interface DatasetLine {
  id: number;
  points: [number, number][];
  importance: number | number[];
  cluster?: string;
}

export interface Dataset {
  version: number;
  lines: DatasetLine[];
}

export interface HelloFrame {
  type: "hello";
  dataset: { lines: number; metadata: Record<string, unknown> };
  sample_rate: number;
  block_frames: number;
}

export interface PluckFrame {
  type: "pluck";
  line_id: number;
  x: number;
  y: number;
  amplitude: number;
  frequency: number;
  t: number;
  decay: number;
  kind: "move" | "playback";
}

export interface StatsFrame {
  type: "stats";
  [key: string]: unknown;
}

export interface ErrorFrame {
  type: "error";
  message: string;
}

export interface BusyFrame {
  type: "busy";
}

export type ServerFrame = HelloFrame | PluckFrame | StatsFrame | ErrorFrame | BusyFrame;

export interface LensState {
  enabled: boolean;
  center: [number, number];
  radius: number;
  threshold: number;
}

export function cursorMessage(t: number, x: number, y: number): string {
  return JSON.stringify({ type: "cursor", t, x, y });
}

export function lensMessage(lens: LensState): string {
  return JSON.stringify({
    type: "lens",
    enabled: lens.enabled,
    center: lens.center,
    radius: lens.radius,
    threshold: lens.threshold,
  });
}

export function playbackMessage(): string {
  return JSON.stringify({ type: "playback" });
}

export function parseServerFrame(raw: string): ServerFrame {
  const msg = JSON.parse(raw);
  if (typeof msg !== "object" || msg === null || typeof msg.type !== "string") {
    throw new Error(`not a protocol frame: ${raw.slice(0, 80)}`);
  }
  return msg as ServerFrame;
}

export interface AudioFrame {
  seq: number;
  samples: Float32Array;
}

export function decodeAudioFrame(data: ArrayBuffer): AudioFrame {
  if (data.byteLength < 8 || (data.byteLength - 8) % 4 !== 0) {
    throw new Error(`malformed audio frame of ${data.byteLength} bytes`);
  }
  const view = new DataView(data);
  const seq = Number(view.getBigUint64(0, true));
  const samples = new Float32Array(data.slice(8));
  return { seq, samples };
}

export function parseDataset(raw: string): Dataset {
  const doc = JSON.parse(raw);
  if (!doc || !Array.isArray(doc.lines)) {
    throw new Error("not a dataset document");
  }
  return doc as Dataset;
}

// Representative importance for whole-line ordering: the strongest point
// along the curve decides how much of it must stay visible.
export function lineImportance(line: DatasetLine): number {
  return typeof line.importance === "number"
    ? line.importance
    : Math.max(...line.importance);
}

export function betaAtVertex(line: DatasetLine, k: number): number {
  return typeof line.importance === "number" ? line.importance : line.importance[k];
}
