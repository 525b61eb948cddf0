// Chart-space math the UI re-implements from the service's published
// contracts: the lens displacement profile and importance draw order.

import { Dataset, DatasetLine, LensState, lineImportance } from "./protocol.js";

const LENS_CENTER_EPS = 1e-3;

// Radial cube-root push: fixes the rim, evacuates the interior. Identity
// for disabled lenses, points outside the disk, and at-or-below-threshold
// importance. A point exactly on the center nudges along +x.
export function lensDisplace(
  lens: LensState | null,
  x: number,
  y: number,
  beta: number,
): [number, number] {
  if (!lens || !lens.enabled || beta <= lens.threshold) return [x, y];
  const dx = x - lens.center[0];
  const dy = y - lens.center[1];
  const r = Math.hypot(dx, dy);
  if (r > lens.radius) return [x, y];
  if (r === 0) return [lens.center[0] + lens.radius * LENS_CENTER_EPS, lens.center[1]];
  const scale = (lens.radius * Math.cbrt(r / lens.radius)) / r;
  return [lens.center[0] + dx * scale, lens.center[1] + dy * scale];
}

// Ascending importance, ties by id: higher-importance lines paint later and
// therefore occlude. Pure and stable.
export function drawOrder(dataset: Dataset): DatasetLine[] {
  return dataset.lines
    .slice()
    .sort((a, b) => lineImportance(a) - lineImportance(b) || a.id - b.id);
}
