// Chart layout and painting. Layout is pure: dataset + view state in, pixel
// polylines in paint order out; the canvas painter just walks the result.

import { lensDisplace, drawOrder } from "./geometry.js";
import { Dataset, LensState, betaAtVertex, lineImportance } from "./protocol.js";
import { VibrationRegistry } from "./vibration.js";

export interface ViewState {
  width: number;
  height: number;
  lens: LensState | null;
  highlightColor: boolean;
}

export interface LineLayout {
  lineId: number;
  points: [number, number][]; // pixels
  beta: number;
  cluster?: string;
  vibrating: boolean;
}

export function chartToPixel(
  x: number,
  y: number,
  view: { width: number; height: number },
): [number, number] {
  return [x * view.width, (1 - y) * view.height]; // chart y grows upward
}

export function layoutChart(
  dataset: Dataset,
  view: ViewState,
  vibration: VibrationRegistry,
  now: number,
): LineLayout[] {
  const out: LineLayout[] = [];
  for (const line of drawOrder(dataset)) {
    const wobble = vibration.offset(line.id, now);
    const pts: [number, number][] = [];
    for (let k = 0; k < line.points.length; k++) {
      const beta = betaAtVertex(line, k);
      let [cx, cy] = line.points[k];
      [cx, cy] = lensDisplace(view.lens, cx, cy, beta);
      let [px, py] = chartToPixel(cx, cy, view);
      if (wobble !== 0) {
        // offset perpendicular to the local direction, in pixel space
        const k2 = Math.min(k + 1, line.points.length - 1);
        const k1 = Math.max(k - 1, 0);
        const dx = (line.points[k2][0] - line.points[k1][0]) * view.width;
        const dy = -(line.points[k2][1] - line.points[k1][1]) * view.height;
        const len = Math.hypot(dx, dy) || 1;
        px += (-dy / len) * wobble;
        py += (dx / len) * wobble;
      }
      pts.push([px, py]);
    }
    out.push({
      lineId: line.id,
      points: pts,
      beta: lineImportance(line),
      cluster: line.cluster,
      vibrating: vibration.active(line.id, now),
    });
  }
  return out;
}

const CLUSTER_HUES: Record<string, number> = {};
let nextHue = 0;

function clusterHue(cluster: string): number {
  if (!(cluster in CLUSTER_HUES)) {
    CLUSTER_HUES[cluster] = (nextHue = (nextHue + 137) % 360);
  }
  return CLUSTER_HUES[cluster];
}

export function strokeStyle(layout: LineLayout, highlightColor: boolean): string {
  if (layout.vibrating && highlightColor) {
    return "hsl(45 100% 55%)";
  }
  const alpha = 0.25 + 0.75 * layout.beta;
  if (layout.cluster !== undefined) {
    return `hsla(${clusterHue(layout.cluster)} 70% 45% / ${alpha.toFixed(3)})`;
  }
  return `rgba(40, 80, 60, ${alpha.toFixed(3)})`;
}

interface Canvas2DLike {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  lineWidth: number;
  strokeStyle: string | CanvasGradient | CanvasPattern;
}

export function paintChart(
  ctx: Canvas2DLike,
  dataset: Dataset,
  view: ViewState,
  vibration: VibrationRegistry,
  now: number,
): void {
  ctx.clearRect(0, 0, view.width, view.height);
  for (const layout of layoutChart(dataset, view, vibration, now)) {
    ctx.beginPath();
    ctx.moveTo(layout.points[0][0], layout.points[0][1]);
    for (let i = 1; i < layout.points.length; i++) {
      ctx.lineTo(layout.points[i][0], layout.points[i][1]);
    }
    ctx.lineWidth = layout.vibrating ? 2.2 : 0.8 + 1.2 * layout.beta;
    ctx.strokeStyle = strokeStyle(layout, view.highlightColor);
    ctx.stroke();
  }
  if (view.lens && view.lens.enabled) {
    const [cx, cy] = chartToPixel(view.lens.center[0], view.lens.center[1], view);
    ctx.beginPath();
    ctx.arc(cx, cy, view.lens.radius * view.width, 0, 2 * Math.PI);
    ctx.lineWidth = 1.5;
    ctx.strokeStyle = "rgba(220, 40, 40, 0.9)";
    ctx.stroke();
  }
}
