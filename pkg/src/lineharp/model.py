"""Line datasets with per-vertex importance: types, canonical JSON I/O, presets.

A dataset is a set of polylines in normalized chart space ([0,1] x [0,1],
x growing rightward, y growing upward). Every vertex carries an importance
value beta in [0,1]; a single scalar per line is broadcast to all vertices.
Curve positions are addressed by a parameter u in [0,1] that spans the
segments uniformly (segment k covers [k/(M-1), (k+1)/(M-1)]).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np


class DatasetParseError(ValueError):
    """Raised when a dataset document is not well-formed."""


class ValidationError(ValueError):
    """Raised when a dataset violates an invariant (names the line/field)."""


class Point2(NamedTuple):
    x: float
    y: float


@dataclass
class Polyline:
    """Ordered 2D points plus importance, either per-vertex or one scalar."""

    id: int
    points: np.ndarray  # shape (M, 2), float64
    importance: Union[float, np.ndarray]  # scalar or shape (M,)
    cluster_label: Optional[str] = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise ValidationError(f"line {self.id}: points must be an (M, 2) array")
        m = self.points.shape[0]
        if m < 2:
            raise ValidationError(f"line {self.id}: needs at least 2 points, got {m}")
        if not np.all(np.isfinite(self.points)):
            raise ValidationError(f"line {self.id}: non-finite coordinate")
        if np.isscalar(self.importance) or isinstance(self.importance, (int, float)):
            self.importance = float(self.importance)
            betas = np.array([self.importance])
        else:
            self.importance = np.asarray(self.importance, dtype=np.float64)
            if self.importance.shape != (m,):
                raise ValidationError(
                    f"line {self.id}: importance length {self.importance.shape[0]} "
                    f"does not match point count {m} (or pass one scalar)"
                )
            betas = self.importance
        if not np.all(np.isfinite(betas)):
            raise ValidationError(f"line {self.id}: non-finite importance")
        if betas.min() < 0.0 or betas.max() > 1.0:
            raise ValidationError(
                f"line {self.id}: importance {betas[np.argmax((betas < 0) | (betas > 1))]:g} "
                "outside [0, 1]"
            )

    @property
    def num_points(self) -> int:
        return self.points.shape[0]

    @property
    def num_segments(self) -> int:
        return self.points.shape[0] - 1

    def beta_at_vertex(self, k: int) -> float:
        if isinstance(self.importance, float):
            return self.importance
        return float(self.importance[k])

    def point(self, k: int) -> Point2:
        return Point2(float(self.points[k, 0]), float(self.points[k, 1]))


@dataclass
class LineSet:
    lines: list[Polyline] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for ln in self.lines:
            if ln.id in seen:
                raise ValidationError(f"line {ln.id}: duplicate id")
            seen.add(ln.id)

    def __len__(self) -> int:
        return len(self.lines)

    def by_id(self, line_id: int) -> Polyline:
        for ln in self.lines:
            if ln.id == line_id:
                return ln
        raise KeyError(line_id)


@dataclass
class CurveSample:
    """One evaluated curve position: where, how important, which direction."""

    line_id: int
    u: float
    position: Point2
    beta: float
    angle: float  # radians in [-pi/2, +pi/2], left-to-right reading order


def sample_curve(line: Polyline, u: float) -> CurveSample:
    """Evaluate a polyline at whole-curve parameter u in [0, 1].

    Position and beta interpolate linearly inside the containing segment;
    u at an interior vertex belongs to the segment on its right.
    """
    if not (0.0 <= u <= 1.0):
        raise ValueError(f"u={u} outside [0, 1]")
    nseg = line.num_segments
    scaled = u * nseg
    k = min(int(math.floor(scaled)), nseg - 1)
    t = scaled - k
    return _sample_segment(line, k, t, u)


def _sample_segment(line: Polyline, k: int, t: float, u: float) -> CurveSample:
    # local import: geometry depends on this module for types
    from .geometry import segment_angle

    a = line.points[k]
    b = line.points[k + 1]
    pos = Point2(float(a[0] + t * (b[0] - a[0])), float(a[1] + t * (b[1] - a[1])))
    ba = line.beta_at_vertex(k)
    bb = line.beta_at_vertex(k + 1)
    beta = ba + t * (bb - ba)
    angle = segment_angle(line.point(k), line.point(k + 1))
    return CurveSample(line_id=line.id, u=u, position=pos, beta=float(beta), angle=angle)


# ---------------------------------------------------------------------------
# Canonical JSON serialization
# ---------------------------------------------------------------------------
# Layout is fixed so that identical datasets produce identical bytes:
# keys in schema order, numbers at up to 9 significant digits, one line
# object per text line, LF endings, trailing LF.


def _fmt(x: float) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    s = format(float(x), ".9g")
    return s


def _line_to_json(ln: Polyline) -> str:
    pts = ",".join(f"[{_fmt(p[0])},{_fmt(p[1])}]" for p in ln.points)
    if isinstance(ln.importance, float):
        imp = _fmt(ln.importance)
    else:
        imp = "[" + ",".join(_fmt(b) for b in ln.importance) + "]"
    out = f'{{"id":{ln.id},"points":[{pts}],"importance":{imp}'
    if ln.cluster_label is not None:
        out += f',"cluster":{json.dumps(ln.cluster_label)}'
    return out + "}"


def save_lineset(lineset: LineSet) -> bytes:
    """Serialize to canonical JSON bytes (load(save(x)) is byte-stable)."""
    if not lineset.lines:
        return b'{"version":1,"lines":[]}\n'
    body = ",\n".join(_line_to_json(ln) for ln in lineset.lines)
    return ('{"version":1,"lines":[\n' + body + "\n]}\n").encode("utf-8")


def load_lineset(source: Union[bytes, str], format: str = "json") -> LineSet:
    """Parse and validate a dataset document.

    Raises DatasetParseError for malformed documents and ValidationError
    (naming the offending line and field) for invariant violations.
    """
    if format != "json":
        raise ValueError(f"unsupported format {format!r}")
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as e:
        raise DatasetParseError(f"malformed dataset JSON: {e}") from e
    if not isinstance(doc, dict) or "lines" not in doc:
        raise DatasetParseError("dataset JSON must be an object with a 'lines' array")
    lines = []
    for entry in doc["lines"]:
        try:
            lid = int(entry["id"])
            pts = np.asarray(entry["points"], dtype=np.float64)
            imp = entry["importance"]
        except (KeyError, TypeError, ValueError) as e:
            raise DatasetParseError(f"malformed line entry {entry!r}: {e}") from e
        if isinstance(imp, list):
            imp = np.asarray(imp, dtype=np.float64)
        else:
            imp = float(imp)
        lines.append(
            Polyline(id=lid, points=pts, importance=imp, cluster_label=entry.get("cluster"))
        )
    return LineSet(lines=lines)


def save_lineset_file(lineset: LineSet, path) -> None:
    with open(path, "wb") as f:
        f.write(save_lineset(lineset))


def load_lineset_file(path) -> LineSet:
    with open(path, "rb") as f:
        return load_lineset(f.read())


# ---------------------------------------------------------------------------
# Synthetic benchmark presets
# ---------------------------------------------------------------------------

PRESETS = ("teaser", "overlap", "grid")

# Teaser layout: four 30-line clusters in left-to-right bands, every line
# crossing y = 0.5 exactly once inside its band, so one horizontal sweep
# hears rising, falling, flat, oscillating in that order. Angle spreads are
# kept tight (+-2..3 deg) so each cluster occupies a narrow pitch band.
_TEASER_CLUSTERS = (
    ("rising", 55.0),
    ("falling", -55.0),
    ("flat", 0.0),
    ("oscillating", 33.0),
)
TEASER_CLUSTER_SIZE = 30
TEASER_BACKGROUND_LINES = 150


def _round9(arr):
    """Quantize to 9 significant digits so in-memory values match the file."""
    a = np.asarray(arr, dtype=np.float64)
    out = np.empty_like(a)
    flat_in, flat_out = a.ravel(), out.ravel()
    for i, v in enumerate(flat_in):
        flat_out[i] = float(format(v, ".9g"))
    return out if a.ndim else float(out)


def _straight_line_through(cx, cy, theta, half_x):
    run = half_x
    rise = half_x * math.tan(theta)
    return np.array([[cx - run, cy - rise], [cx + run, cy + rise]])


def _wavy_line_through(cx, cy, base_deg, amp_deg, cycles, phase, x_span, n_points):
    xs = np.linspace(cx - x_span / 2.0, cx + x_span / 2.0, n_points)
    rel = (xs - xs[0]) / x_span
    slopes = np.tan(np.radians(base_deg + amp_deg * np.sin(2 * np.pi * cycles * rel + phase)))
    ys = np.concatenate([[0.0], np.cumsum((slopes[:-1] + slopes[1:]) / 2.0 * np.diff(xs))])
    ys += cy - np.interp(cx, xs, ys)
    return np.column_stack([xs, ys])


def _gen_teaser(rng: np.random.Generator) -> LineSet:
    lines = []
    lid = 0
    for c, (label, base_deg) in enumerate(_TEASER_CLUSTERS):
        x_lo, x_hi = 0.25 * c + 0.04, 0.25 * c + 0.21
        for _ in range(TEASER_CLUSTER_SIZE):
            cx = rng.uniform(x_lo, x_hi)
            beta = rng.uniform(0.7, 1.0)
            if label == "rising" or label == "falling":
                theta = math.radians(base_deg + rng.uniform(-2.0, 2.0))
                pts = _straight_line_through(cx, 0.5, theta, half_x=0.055)
            elif label == "flat":
                theta = math.radians(rng.choice([-1.0, 1.0]) * rng.uniform(1.0, 2.0))
                pts = _straight_line_through(cx, 0.5, theta, half_x=0.07)
            else:
                pts = _wavy_line_through(
                    cx, 0.5, base_deg, amp_deg=3.0, cycles=2.0,
                    phase=rng.uniform(0, 2 * np.pi), x_span=0.13, n_points=25,
                )
            lines.append(
                Polyline(lid, _round9(pts), _round9(beta), cluster_label=label)
            )
            lid += 1
    for _ in range(TEASER_BACKGROUND_LINES):
        m = int(rng.integers(2, 7))
        x = rng.uniform(0.0, 0.85)
        y = rng.uniform(0.05, 0.95)
        pts = [[x, y]]
        for _ in range(m - 1):
            x = x + rng.uniform(0.03, 0.12)
            y = float(np.clip(y + rng.uniform(-0.12, 0.12), 0.0, 1.0))
            pts.append([min(x, 1.0), y])
        beta = rng.uniform(0.05, 0.3)
        lines.append(Polyline(lid, _round9(np.array(pts)), _round9(beta)))
        lid += 1
    return LineSet(lines=lines, metadata={"preset": "teaser"})


OVERLAP_CLUSTER_SIZE = 12


def _gen_overlap(rng: np.random.Generator) -> LineSet:
    lines = []
    lid = 0
    for label, base_deg, beta_lo, beta_hi in (
        ("upper", -35.0, 0.8, 1.0),
        ("lower", +35.0, 0.4, 0.6),
    ):
        for _ in range(OVERLAP_CLUSTER_SIZE):
            cx = rng.uniform(0.38, 0.62)
            cy = rng.uniform(0.465, 0.535)
            theta = math.radians(base_deg + rng.uniform(-2.0, 2.0))
            pts = _straight_line_through(cx, cy, theta, half_x=0.09)
            beta = rng.uniform(beta_lo, beta_hi)
            lines.append(Polyline(lid, _round9(pts), _round9(beta), cluster_label=label))
            lid += 1
    return LineSet(lines=lines, metadata={"preset": "overlap"})


GRID_LINES = 8
GRID_BETA = 1.0


def _gen_grid(rng: np.random.Generator) -> LineSet:
    lines = []
    for k in range(GRID_LINES):
        x = _round9((k + 1) / (GRID_LINES + 1))
        pts = np.array([[x, 0.2], [x, 0.8]])
        lines.append(Polyline(k, pts, GRID_BETA))
    return LineSet(lines=lines, metadata={"preset": "grid"})


def generate_dataset(preset: str, seed: int) -> LineSet:
    """Build one of the synthetic benchmark datasets, deterministically."""
    rng = np.random.default_rng(seed)
    if preset == "teaser":
        return _gen_teaser(rng)
    if preset == "overlap":
        return _gen_overlap(rng)
    if preset == "grid":
        return _gen_grid(rng)
    raise ValueError(f"unknown preset {preset!r}; expected one of {PRESETS}")
