"""Cursor/segment crossing detection, direction angles, and lens math.

Crossing tests use exact rational arithmetic (fractions.Fraction) on the
float coordinates, so touching endpoints and collinear overlaps resolve
deterministically with no epsilon tuning. A float bounding-box reject keeps
the exact path off the hot loop; the box test compares exact float values
and never falsely excludes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .model import CurveSample, LineSet, Point2, Polyline, _sample_segment


@dataclass
class CursorMove:
    """One cursor displacement on the session clock."""

    start: Point2
    end: Point2
    t_start: float = 0.0
    t_end: float = 0.0

    def __post_init__(self):
        if self.t_end < self.t_start:
            raise ValueError("t_end must be >= t_start")
        for p in (self.start, self.end):
            if not (math.isfinite(p[0]) and math.isfinite(p[1])):
                raise ValueError("non-finite cursor coordinate")


@dataclass
class Crossing:
    line_id: int
    segment_index: int
    s: float  # parameter along the cursor path, [0, 1]
    u: float  # whole-curve parameter of the crossed line, [0, 1]
    sample: CurveSample


@dataclass
class Lens:
    center: Point2
    radius: float
    threshold: float
    enabled: bool = True

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"lens radius must be > 0, got {self.radius}")
        if not (0.0 <= self.threshold <= 1.0):
            raise ValueError(f"lens threshold must be in [0, 1], got {self.threshold}")

    def contains(self, p: Point2) -> bool:
        dx, dy = p[0] - self.center[0], p[1] - self.center[1]
        return dx * dx + dy * dy <= self.radius * self.radius


def segment_angle(a: Point2, b: Point2) -> float:
    """Direction of segment ab in [-pi/2, +pi/2] under left-to-right reading.

    Endpoints are swapped when b is left of a; vertical segments keep their
    stored order and map to +pi/2 (ascending y) or -pi/2 (descending).
    """
    if a[0] == b[0] and a[1] == b[1]:
        raise ValueError("degenerate zero-length segment")
    if a[0] == b[0]:
        return math.pi / 2 if b[1] > a[1] else -math.pi / 2
    if b[0] < a[0]:
        a, b = b, a
    return math.atan2(b[1] - a[1], b[0] - a[0])


# ---------------------------------------------------------------------------
# Exact crossing detection
# ---------------------------------------------------------------------------


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _boxes_disjoint(p0, p1, q0, q1):
    return (
        max(p0[0], p1[0]) < min(q0[0], q1[0])
        or max(q0[0], q1[0]) < min(p0[0], p1[0])
        or max(p0[1], p1[1]) < min(q0[1], q1[1])
        or max(q0[1], q1[1]) < min(p0[1], p1[1])
    )


def _segment_intersection_params(p0, p1, q0, q1):
    """Exact closed-segment intersection of p0p1 with q0q1.

    Returns (s, t) as Fractions, or None. Collinear overlap reports the
    midpoint of the shared interval (a slide along a string is one pluck).
    """
    px, py = Fraction(p0[0]), Fraction(p0[1])
    dx, dy = Fraction(p1[0]) - px, Fraction(p1[1]) - py
    qx, qy = Fraction(q0[0]), Fraction(q0[1])
    rx, ry = Fraction(q1[0]) - qx, Fraction(q1[1]) - qy
    wx, wy = qx - px, qy - py
    denom = _cross(dx, dy, rx, ry)
    if denom != 0:
        s = _cross(wx, wy, rx, ry) / denom
        t = _cross(wx, wy, dx, dy) / denom
        if 0 <= s <= 1 and 0 <= t <= 1:
            return s, t
        return None
    if _cross(wx, wy, dx, dy) != 0:
        return None  # parallel, not collinear
    # Collinear: project the target segment onto the cursor direction.
    dd = dx * dx + dy * dy
    if dd == 0:
        return None
    s_q0 = (wx * dx + wy * dy) / dd
    s_q1 = ((qx + rx - px) * dx + (qy + ry - py) * dy) / dd
    lo, hi = min(s_q0, s_q1), max(s_q0, s_q1)
    lo, hi = max(lo, Fraction(0)), min(hi, Fraction(1))
    if lo > hi:
        return None
    s = (lo + hi) / 2
    if s_q1 == s_q0:
        t = Fraction(0)
    else:
        t = (s - s_q0) / (s_q1 - s_q0)
    return s, t


def find_crossings(
    move: CursorMove, lines: LineSet, lens: Optional[Lens] = None
) -> list[Crossing]:
    """All (line, segment) pairs whose closed segment meets the cursor path.

    Results are sorted by s ascending, ties by line id then segment index.
    With an enabled lens, crossings inside the lens disk whose beta exceeds
    the threshold are dropped (the lens mutes displaced lines).
    """
    p0, p1 = move.start, move.end
    if p0[0] == p1[0] and p0[1] == p1[1]:
        return []
    found = []
    for line in lines.lines:
        pts = line.points
        nseg = line.num_segments
        for k in range(nseg):
            q0 = (pts[k, 0], pts[k, 1])
            q1 = (pts[k + 1, 0], pts[k + 1, 1])
            if q0 == q1:
                continue  # degenerate segment carries no direction
            if _boxes_disjoint(p0, p1, q0, q1):
                continue
            hit = _segment_intersection_params(p0, p1, q0, q1)
            if hit is None:
                continue
            s, t = float(hit[0]), float(hit[1])
            u = (k + t) / nseg
            sample = _sample_segment(line, k, t, u)
            if (
                lens is not None
                and lens.enabled
                and lens.contains(sample.position)
                and sample.beta > lens.threshold
            ):
                continue
            found.append(Crossing(line.id, k, s, u, sample))
    found.sort(key=lambda c: (c.s, c.line_id, c.segment_index))
    return found


# ---------------------------------------------------------------------------
# Lens queries
# ---------------------------------------------------------------------------


def _nearest_on_segment(a, b, c):
    """(t, dist_sq) of the point on segment ab nearest to c."""
    abx, aby = b[0] - a[0], b[1] - a[1]
    denom = abx * abx + aby * aby
    if denom == 0.0:
        t = 0.0
    else:
        t = ((c[0] - a[0]) * abx + (c[1] - a[1]) * aby) / denom
        t = min(1.0, max(0.0, t))
    nx, ny = a[0] + t * abx - c[0], a[1] + t * aby - c[1]
    return t, nx * nx + ny * ny


def lens_contents(lens: Lens, lines: LineSet) -> list[CurveSample]:
    """One sample per line inside the lens, at the curve point nearest the
    center, sorted by beta descending (ties by line id)."""
    if not lens.enabled:
        raise ValueError("lens is disabled")
    c = lens.center
    out = []
    for line in lines.lines:
        best = None
        for k in range(line.num_segments):
            a = line.points[k]
            b = line.points[k + 1]
            t, d2 = _nearest_on_segment(a, b, c)
            if best is None or d2 < best[0]:
                best = (d2, k, t)
        d2, k, t = best
        if d2 <= lens.radius * lens.radius:
            u = (k + t) / line.num_segments
            out.append(_sample_segment(line, k, t, u))
    out.sort(key=lambda s: (-s.beta, s.line_id))
    return out


LENS_CENTER_EPS = 1e-3


def lens_displacement(lens: Optional[Lens], p: Point2, beta: float) -> Point2:
    """Push an above-threshold point radially toward the rim.

    The cube root profile d' = R * (r/R)^(1/3) fixes the rim, evacuates
    the interior, and is monotone (hence invertible) in r.
    """
    if lens is None or not lens.enabled or beta <= lens.threshold:
        return p
    dx, dy = p[0] - lens.center[0], p[1] - lens.center[1]
    r = math.hypot(dx, dy)
    if r > lens.radius:
        return p
    if r == 0.0:
        return Point2(lens.center[0] + lens.radius * LENS_CENTER_EPS, lens.center[1])
    d_new = lens.radius * (r / lens.radius) ** (1.0 / 3.0)
    scale = d_new / r
    return Point2(lens.center[0] + dx * scale, lens.center[1] + dy * scale)
