"""Interaction state machine: cursor moves and lens commands become plucks.

A session owns the cursor, the lens, and the pending lens-playback schedule,
and feeds note chords to a mixer. It is single-owner: exactly one context
drives it (live socket handler or offline replay loop); feedback events fan
out to registered subscribers without blocking.

Time is whatever clock the caller supplies (wall time live, virtual time
offline); events must arrive in nondecreasing order and out-of-order events
are dropped with a warning counter.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .geometry import CursorMove, Lens, find_crossings, lens_contents
from .mapping import MappingConfig, Note, make_note
from .mixer import ActiveNoteBuffer
from .model import LineSet, Point2

DEFAULT_PLAYBACK_SPACING = 0.05  # 1200 bpm


class TrajectoryError(ValueError):
    """Raised for malformed or mis-ordered trajectory documents."""


@dataclass(frozen=True)
class PluckFeedback:
    line_id: int
    position: Point2
    amplitude: float
    frequency: float
    onset: float
    decay: float  # effective decay predicted at trigger time (drives UI vibration)
    kind: str = "move"  # "move" | "playback"

    def to_dict(self) -> dict:
        return {
            "type": "pluck",
            "line_id": self.line_id,
            "x": round(self.position[0], 9),
            "y": round(self.position[1], 9),
            "amplitude": self.amplitude,
            "frequency": self.frequency,
            "t": self.onset,
            "decay": self.decay,
            "kind": self.kind,
        }


class Session:
    def __init__(
        self,
        lineset: LineSet,
        cfg: MappingConfig = MappingConfig(),
        mixer: Optional[ActiveNoteBuffer] = None,
        playback_spacing: float = DEFAULT_PLAYBACK_SPACING,
    ):
        if not playback_spacing > 0:
            raise ValueError("playback_spacing must be > 0")
        self.lineset = lineset
        self.cfg = cfg
        self.mixer = mixer
        self.playback_spacing = playback_spacing
        self.lens: Optional[Lens] = None
        self.cursor: Optional[Point2] = None
        self.cursor_t: Optional[float] = None
        self.mode = "free"  # free | lens | lens_playback
        self.out_of_order_events = 0
        self._scheduled: list[tuple[float, Note, PluckFeedback]] = []
        self._playback_end = -math.inf
        self._subscribers: list[Callable[[PluckFeedback], None]] = []

    # -- plumbing -----------------------------------------------------------

    def subscribe(self, fn: Callable[[PluckFeedback], None]) -> None:
        self._subscribers.append(fn)

    def unsubscribe(self, fn: Callable[[PluckFeedback], None]) -> None:
        self._subscribers.remove(fn)

    def _emit(self, fb: PluckFeedback) -> None:
        for fn in self._subscribers:
            fn(fb)

    def _trigger_chord(self, notes: list[Note]) -> None:
        if self.mixer is not None and notes:
            self.mixer.trigger(notes)

    def _predicted_decay(self, chord_size: int) -> float:
        if self.mixer is not None:
            return self.mixer.predict_decay(chord_size)
        return self.cfg.decay_base

    # -- clock --------------------------------------------------------------

    def advance_to(self, t: float, fire_at_exactly: bool = True) -> list[PluckFeedback]:
        """Fire scheduled playback notes due by time t; handle mode expiry."""
        fired = []
        while self._scheduled:
            onset, note, fb = self._scheduled[0]
            due = onset <= t if fire_at_exactly else onset < t
            if not due:
                break
            self._scheduled.pop(0)
            self._trigger_chord([note])
            self._emit(fb)
            fired.append(fb)
        if self.mode == "lens_playback" and t >= self._playback_end and not self._scheduled:
            self.mode = "lens" if (self.lens and self.lens.enabled) else "free"
        return fired

    # -- operations ---------------------------------------------------------

    def on_cursor_move(self, to: Point2, t: float) -> list[PluckFeedback]:
        """Pluck every line segment the cursor path crosses, as one chord."""
        to = Point2(float(to[0]), float(to[1]))
        if self.cursor_t is not None and t < self.cursor_t:
            self.out_of_order_events += 1
            return []
        self.advance_to(t)
        prev, prev_t = self.cursor, self.cursor_t
        self.cursor, self.cursor_t = to, t
        if prev is None:
            return []
        if self.mode == "lens_playback":
            return []  # playback suppresses free plucking until done
        move = CursorMove(prev, to, prev_t, t)
        lens = self.lens if (self.lens is not None and self.lens.enabled) else None
        crossings = find_crossings(move, self.lineset, lens)
        notes = []
        feedback = []
        decay = self._predicted_decay(len(crossings))
        for c in crossings:
            note = make_note(c.sample, t, self.cfg)
            notes.append(note)
            feedback.append(
                PluckFeedback(
                    line_id=c.line_id,
                    position=c.sample.position,
                    amplitude=note.amplitude,
                    frequency=note.frequency,
                    onset=t,
                    decay=decay,
                    kind="move",
                )
            )
        self._trigger_chord(notes)
        for fb in feedback:
            self._emit(fb)
        return feedback

    def set_lens(self, lens: Lens) -> Optional[Lens]:
        """Install a lens; returns the previous one. Cancels any playback."""
        previous = self.lens
        self.lens = lens
        self._scheduled.clear()
        self.mode = "lens" if lens.enabled else "free"
        return previous

    def start_lens_playback(self, t: float) -> list[tuple[float, Note]]:
        """Schedule every line in the lens, importance order, evenly spaced."""
        if self.lens is None or not self.lens.enabled:
            raise ValueError("lens playback requires an enabled lens")
        self.advance_to(t)
        contents = lens_contents(self.lens, self.lineset)
        if not contents:
            return []
        schedule = []
        for k, sample in enumerate(contents):
            onset = t + k * self.playback_spacing
            note = make_note(sample, onset, self.cfg)
            fb = PluckFeedback(
                line_id=sample.line_id,
                position=sample.position,
                amplitude=note.amplitude,
                frequency=note.frequency,
                onset=onset,
                decay=self.cfg.decay_base,
                kind="playback",
            )
            self._scheduled.append((onset, note, fb))
            schedule.append((onset, note))
        self._playback_end = schedule[-1][0] + self.cfg.decay_base
        self.mode = "lens_playback"
        return schedule

    def flush_scheduled(self) -> list[PluckFeedback]:
        """Fire whatever remains scheduled (end-of-replay drain)."""
        if not self._scheduled:
            return []
        return self.advance_to(self._scheduled[-1][0])

    def replay_trajectory(self, trajectory: "Trajectory") -> list[dict]:
        """Run a scripted session on the virtual clock; returns the event log."""
        log: list[dict] = []
        collect = lambda fb: log.append(fb.to_dict())
        self.subscribe(collect)
        try:
            for ev in trajectory.events:
                self.advance_to(ev.t)
                if ev.kind == "move":
                    self.on_cursor_move(Point2(ev.x, ev.y), ev.t)
                elif ev.kind == "lens":
                    self.set_lens(ev.lens)
                elif ev.kind == "playback":
                    schedule = self.start_lens_playback(ev.t)
                    log.append(
                        {
                            "type": "schedule",
                            "t": ev.t,
                            "notes": [
                                {
                                    "t": onset,
                                    "line_id": n.line_id,
                                    "frequency": n.frequency,
                                    "amplitude": n.amplitude,
                                }
                                for onset, n in schedule
                            ],
                        }
                    )
            self.flush_scheduled()
        finally:
            self.unsubscribe(collect)
        return log


# ---------------------------------------------------------------------------
# Scripted trajectories
# ---------------------------------------------------------------------------


@dataclass
class TrajectoryEvent:
    t: float
    kind: str  # move | lens | playback
    x: float = 0.0
    y: float = 0.0
    lens: Optional[Lens] = None


@dataclass
class Trajectory:
    events: list[TrajectoryEvent] = field(default_factory=list)

    def __post_init__(self):
        last = -math.inf
        for ev in self.events:
            if not math.isfinite(ev.t) or ev.t <= last:
                raise TrajectoryError(
                    f"trajectory timestamps must be strictly increasing (at t={ev.t})"
                )
            last = ev.t

    @property
    def end_time(self) -> float:
        return self.events[-1].t if self.events else 0.0


def parse_trajectory(source: Union[bytes, str]) -> Trajectory:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        doc = json.loads(source)
        raw_events = doc["events"]
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise TrajectoryError(f"malformed trajectory JSON: {e}") from e
    events = []
    for raw in raw_events:
        try:
            t = float(raw["t"])
            if "lens" in raw:
                lens_raw = raw["lens"]
                lens = Lens(
                    center=Point2(float(lens_raw["center"][0]), float(lens_raw["center"][1])),
                    radius=float(lens_raw["radius"]),
                    threshold=float(lens_raw["threshold"]),
                    enabled=bool(lens_raw.get("enabled", True)),
                )
                events.append(TrajectoryEvent(t=t, kind="lens", lens=lens))
            elif raw.get("action") == "lens_playback":
                events.append(TrajectoryEvent(t=t, kind="playback"))
            elif "x" in raw and "y" in raw:
                events.append(
                    TrajectoryEvent(t=t, kind="move", x=float(raw["x"]), y=float(raw["y"]))
                )
            else:
                raise TrajectoryError(f"unrecognized trajectory event {raw!r}")
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, TrajectoryError):
                raise
            raise TrajectoryError(f"malformed trajectory event {raw!r}: {e}") from e
    return Trajectory(events=events)


def trajectory_to_json(traj: Trajectory) -> bytes:
    events = []
    for ev in traj.events:
        if ev.kind == "move":
            events.append({"t": ev.t, "x": ev.x, "y": ev.y})
        elif ev.kind == "lens":
            events.append(
                {
                    "t": ev.t,
                    "lens": {
                        "enabled": ev.lens.enabled,
                        "center": [ev.lens.center[0], ev.lens.center[1]],
                        "radius": ev.lens.radius,
                        "threshold": ev.lens.threshold,
                    },
                }
            )
        else:
            events.append({"t": ev.t, "action": "lens_playback"})
    return (json.dumps({"version": 1, "events": events}, indent=None) + "\n").encode("utf-8")


def make_sweep(
    start: tuple, end: tuple, duration: float, t0: float = 0.0, rate: float = 60.0
) -> Trajectory:
    """Straight fixed-speed cursor sweep sampled at an input-device rate."""
    n = max(2, int(round(duration * rate)) + 1)
    events = []
    for i in range(n):
        frac = i / (n - 1)
        events.append(
            TrajectoryEvent(
                t=t0 + frac * duration,
                kind="move",
                x=start[0] + frac * (end[0] - start[0]),
                y=start[1] + frac * (end[1] - start[1]),
            )
        )
    return Trajectory(events=events)
