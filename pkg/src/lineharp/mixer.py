"""Active-note buffer: chord-safe accumulation of plucked voices.

Two contexts touch a buffer: a producer enqueues note chords via trigger(),
and the audio consumer drains them inside render_block(). The pending deque
is the only shared state; appends and pops are atomic under CPython, the
enqueue/dequeue counters are each single-writer, and the consumer never
takes a lock. All other state belongs to the render context.

Dynamic scaling happens at spawn time and never retroactively: a chord
arriving when the summed note amplitude S (live + incoming) exceeds 1 gets
its gains divided by S, and every incoming note's decay is cut to
decay_base/n for n live-plus-incoming voices (floored at decay_min). Solo
quiet notes therefore stay at their natural loudness while dense chords
cannot pile up past full scale.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .mapping import MappingConfig, Note
from .synth import Voice, spawn_voice

DEFAULT_MASTER_GAIN = 0.9
DEFAULT_PENDING_CAPACITY = 1024
LIMITER_KNEE = 0.85  # linear below the knee; tanh soft clip above


@dataclass
class _LiveVoice:
    voice: Voice
    scale: float  # spawn-time gain divided by the note amplitude
    offset: int  # sample offset within the spawn block


class ActiveNoteBuffer:
    def __init__(
        self,
        sample_rate: float,
        cfg: MappingConfig = MappingConfig(),
        master_gain: float = DEFAULT_MASTER_GAIN,
        pending_capacity: int = DEFAULT_PENDING_CAPACITY,
    ):
        cfg.validate_for_sample_rate(sample_rate)
        self.sample_rate = float(sample_rate)
        self.cfg = cfg
        self.master_gain = float(master_gain)
        self.pending_capacity = int(pending_capacity)
        self.scaling_enabled = True
        self.cumulative_amplitude = 0.0
        self._live: list[_LiveVoice] = []
        self._pending: deque[list[Note]] = deque()
        self._enqueued_notes = 0  # written only by the producer
        self._dequeued_notes = 0  # written only by the consumer
        self.notes_dropped = 0
        self.clip_samples = 0
        self.blocks_rendered = 0
        self._samples_rendered = 0

    # -- producer side ------------------------------------------------------

    def pending_count(self) -> int:
        return self._enqueued_notes - self._dequeued_notes

    def trigger(self, notes: list[Note]) -> int:
        """Enqueue one simultaneous chord; returns the accepted note count.

        On overflow the oldest pending chords are discarded and counted in
        notes_dropped.
        """
        notes = list(notes)
        if not notes:
            return 0
        while self._pending and self.pending_count() + len(notes) > self.pending_capacity:
            dropped = self._pending.popleft()
            self._enqueued_notes -= len(dropped)
            self.notes_dropped += len(dropped)
        self._pending.append(notes)
        self._enqueued_notes += len(notes)
        return len(notes)

    def predict_decay(self, chord_size: int = 1) -> float:
        """Effective decay a note arriving now would receive."""
        if not self.scaling_enabled:
            return self.cfg.decay_base
        n = len(self._live) + self.pending_count() + chord_size
        return max(self.cfg.decay_min, self.cfg.decay_base / max(n, 1))

    # -- consumer side ------------------------------------------------------

    def time(self) -> float:
        return self._samples_rendered / self.sample_rate

    def set_scaling_enabled(self, flag: bool) -> bool:
        previous = self.scaling_enabled
        self.scaling_enabled = bool(flag)
        return previous

    def _recompute_cumulative(self) -> None:
        self.cumulative_amplitude = float(
            sum(lv.voice.note.amplitude for lv in self._live)
        )

    def _spawn_pending(self, frames: int, block_t0: float) -> None:
        while True:
            try:
                chord = self._pending.popleft()
            except IndexError:
                break
            self._dequeued_notes += len(chord)
            incoming = sum(n.amplitude for n in chord)
            if self.scaling_enabled:
                s = self.cumulative_amplitude + incoming
                scale = 1.0 if s <= 1.0 else 1.0 / s
                n = len(self._live) + len(chord)
                tau = max(self.cfg.decay_min, self.cfg.decay_base / n)
            else:
                scale = 1.0
                tau = self.cfg.decay_base
            for note in chord:
                offset = int(round((note.onset - block_t0) * self.sample_rate))
                offset = min(max(offset, 0), frames - 1)
                voice = spawn_voice(
                    note, self.sample_rate, attack=self.cfg.attack, effective_decay=tau
                )
                self._live.append(_LiveVoice(voice, scale, offset))
            self._recompute_cumulative()

    def render_block(self, frames: int) -> np.ndarray:
        """Drain pending chords, mix all live voices, soft-limit, and
        retire finished voices."""
        block_t0 = self.time()
        self._spawn_pending(frames, block_t0)
        mix = np.zeros(frames)
        for lv in self._live:
            if lv.offset > 0:
                block = lv.voice.render(frames - lv.offset)
                mix[lv.offset :] += lv.scale * block
                lv.offset = 0
            else:
                mix += lv.scale * lv.voice.render(frames)
        mix *= self.master_gain
        over = np.abs(mix) > 1.0
        if over.any():
            self.clip_samples += int(np.count_nonzero(over))
        _soft_limit(mix)
        finished = [lv for lv in self._live if lv.voice.finished]
        if finished:
            self._live = [lv for lv in self._live if not lv.voice.finished]
            self._recompute_cumulative()
        self.blocks_rendered += 1
        self._samples_rendered += frames
        return mix

    def live_count(self) -> int:
        return len(self._live)

    def live_amplitudes(self) -> list[float]:
        return [lv.voice.note.amplitude for lv in self._live]

    def live_gains(self) -> list[float]:
        """Realized per-voice gains g_i = A_i * scale_i, spawn order."""
        return [lv.voice.note.amplitude * lv.scale for lv in self._live]

    def live_decays(self) -> list[float]:
        return [lv.voice.effective_decay for lv in self._live]

    def stats(self) -> dict:
        return {
            "live_voices": self.live_count(),
            "pending_notes": self.pending_count(),
            "notes_dropped": self.notes_dropped,
            "clip_samples": self.clip_samples,
            "cumulative_amplitude": self.cumulative_amplitude,
            "blocks_rendered": self.blocks_rendered,
        }


def _soft_limit(mix: np.ndarray) -> None:
    """In-place soft knee: identity below LIMITER_KNEE, tanh above, C1
    continuous, asymptote at 1."""
    knee = LIMITER_KNEE
    over = np.abs(mix) > knee
    if not over.any():
        return
    x = mix[over]
    mix[over] = np.sign(x) * (knee + (1.0 - knee) * np.tanh((np.abs(x) - knee) / (1.0 - knee)))


# Spec-shaped module-level aliases.


def trigger(buffer: ActiveNoteBuffer, notes: list[Note]) -> int:
    return buffer.trigger(notes)


def render_block(buffer: ActiveNoteBuffer, frames: int) -> np.ndarray:
    return buffer.render_block(frames)


def set_scaling_enabled(buffer: ActiveNoteBuffer, flag: bool) -> bool:
    return buffer.set_scaling_enabled(flag)
