"""Offline WAV rendering of sessions and the real-time stream contract.

Offline and real-time paths share the same render core (the mixer's
render_block), so a virtual-clock offline render and a deterministically
driven stream produce identical samples. WAV container code is local and
minimal: RIFF/WAVE, fmt + (fact +) data chunks, little-endian, mono
pcm16 or float32.
"""

from __future__ import annotations

import json
import math
import struct
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .mapping import MappingConfig
from .mixer import DEFAULT_MASTER_GAIN, ActiveNoteBuffer
from .model import LineSet
from .session import Session, Trajectory

SUPPORTED_RATES = (44100, 48000)
TAIL_CAP_SECONDS = 2.0


@dataclass(frozen=True)
class RenderSpec:
    sample_rate: int = 44100
    block_frames: int = 256
    duration: Optional[float] = None  # None: run until silence after the last event
    format: str = "pcm16"  # pcm16 | float32

    def __post_init__(self):
        if self.sample_rate not in SUPPORTED_RATES:
            raise ValueError(f"sample_rate must be one of {SUPPORTED_RATES}")
        bf = self.block_frames
        if bf < 64 or bf > 4096 or (bf & (bf - 1)) != 0:
            raise ValueError("block_frames must be a power of two in [64, 4096]")
        if self.format not in ("pcm16", "float32"):
            raise ValueError(f"unknown sample format {self.format!r}")
        if self.duration is not None and not self.duration >= 0:
            raise ValueError("duration must be >= 0")


# ---------------------------------------------------------------------------
# WAV container
# ---------------------------------------------------------------------------


def encode_wav(samples: np.ndarray, sample_rate: int, fmt: str = "pcm16") -> bytes:
    x = np.asarray(samples, dtype=np.float64)
    if fmt == "pcm16":
        payload = (np.clip(x, -1.0, 1.0) * 32767.0).round().astype("<i2").tobytes()
        audio_format, bits = 1, 16
    elif fmt == "float32":
        payload = x.astype("<f4").tobytes()
        audio_format, bits = 3, 32
    else:
        raise ValueError(f"unknown sample format {fmt!r}")
    byte_rate = sample_rate * bits // 8
    fmt_chunk = struct.pack(
        "<HHIIHH", audio_format, 1, sample_rate, byte_rate, bits // 8, bits
    )
    chunks = [b"fmt ", struct.pack("<I", len(fmt_chunk)), fmt_chunk]
    if audio_format == 3:
        chunks += [b"fact", struct.pack("<I", 4), struct.pack("<I", len(x))]
    chunks += [b"data", struct.pack("<I", len(payload)), payload]
    body = b"".join(chunks)
    return b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body


def decode_wav(data: bytes) -> tuple[np.ndarray, int]:
    """Parse a mono pcm16/float32 WAV; returns (samples in [-1, 1], rate)."""
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise ValueError("not a RIFF/WAVE file")
    pos = 12
    fmt = None
    payload = None
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4 : pos + 8])
        body = data[pos + 8 : pos + 8 + size]
        if cid == b"fmt ":
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif cid == b"data":
            payload = body
        pos += 8 + size + (size & 1)
    if fmt is None or payload is None:
        raise ValueError("missing fmt or data chunk")
    audio_format, channels, rate, _, _, bits = fmt
    if channels != 1:
        raise ValueError(f"only mono supported, got {channels} channels")
    if audio_format == 1 and bits == 16:
        samples = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32767.0
    elif audio_format == 3 and bits == 32:
        samples = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise ValueError(f"unsupported WAV encoding (format={audio_format}, bits={bits})")
    return samples, rate


# ---------------------------------------------------------------------------
# Offline rendering
# ---------------------------------------------------------------------------


def render_offline(
    lineset: LineSet,
    trajectory: Trajectory,
    cfg: MappingConfig = MappingConfig(),
    spec: RenderSpec = RenderSpec(),
    scaling_enabled: bool = True,
    master_gain: Optional[float] = None,
):
    """Virtual-clock run of session + mixer.

    Returns (wav_bytes, event_log, stats). Without an explicit duration the
    render runs until the mixer falls silent after the last event, capped at
    2 s of tail.
    """
    mixer = ActiveNoteBuffer(
        spec.sample_rate,
        cfg,
        master_gain=DEFAULT_MASTER_GAIN if master_gain is None else master_gain,
    )
    mixer.set_scaling_enabled(scaling_enabled)
    session = Session(lineset, cfg, mixer)
    log: list[dict] = []
    session.subscribe(lambda fb: log.append(fb.to_dict()))

    events = list(trajectory.events)
    ev_i = 0
    blocks: list[np.ndarray] = []
    sr = spec.sample_rate
    frames = spec.block_frames
    if spec.duration is not None:
        total_samples = int(round(spec.duration * sr))
        n_blocks = math.ceil(total_samples / frames) if total_samples else 0
    else:
        total_samples = None
        n_blocks = None

    last_event_t = trajectory.end_time
    k = 0
    while True:
        if n_blocks is not None and k >= n_blocks:
            break
        block_end = (k + 1) * frames / sr
        while ev_i < len(events) and events[ev_i].t < block_end:
            ev = events[ev_i]
            ev_i += 1
            if ev.kind == "move":
                session.on_cursor_move((ev.x, ev.y), ev.t)
            elif ev.kind == "lens":
                session.set_lens(ev.lens)
            elif ev.kind == "playback":
                schedule = session.start_lens_playback(ev.t)
                if schedule:
                    last_event_t = max(last_event_t, schedule[-1][0])
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
        session.advance_to(block_end, fire_at_exactly=False)
        blocks.append(mixer.render_block(frames))
        k += 1
        if n_blocks is None:
            t = k * frames / sr
            drained = ev_i >= len(events) and not session._scheduled
            silent = mixer.live_count() == 0 and mixer.pending_count() == 0
            if drained and (silent or t >= last_event_t + TAIL_CAP_SECONDS):
                break

    samples = np.concatenate(blocks) if blocks else np.zeros(0)
    if total_samples is not None:
        samples = samples[:total_samples]
    return encode_wav(samples, sr, spec.format), log, mixer.stats()


def events_to_jsonl(log: list[dict]) -> str:
    return "".join(json.dumps(entry) + "\n" for entry in log)


# ---------------------------------------------------------------------------
# Real-time stream
# ---------------------------------------------------------------------------


class StreamHandle:
    """Control handle for a running output stream."""

    def __init__(self, thread: threading.Thread, stop_event: threading.Event, state: dict):
        self._thread = thread
        self._stop = stop_event
        self._state = state

    @property
    def underruns(self) -> int:
        return self._state["underruns"]

    @property
    def blocks_streamed(self) -> int:
        return self._state["blocks"]

    def stop(self, timeout: float = 2.0) -> None:
        self._stop.set()
        self._thread.join(timeout)

    def running(self) -> bool:
        return self._thread.is_alive()


def stream_realtime(
    sink: Callable[[np.ndarray], None],
    mixer: ActiveNoteBuffer,
    block_frames: int = 256,
    realtime: bool = True,
) -> StreamHandle:
    """Pull render_block on the sink's cadence from a dedicated thread.

    The render loop never blocks on shared state; when it misses a block
    deadline it counts an underrun and resynchronizes (the device would have
    played silence for the missed block). With realtime=False the loop runs
    unpaced for deterministic virtual sinks.
    """
    stop_event = threading.Event()
    state = {"underruns": 0, "blocks": 0}
    dt = block_frames / mixer.sample_rate

    def run():
        next_deadline = time.monotonic()
        while not stop_event.is_set():
            block = mixer.render_block(block_frames)
            sink(block)
            state["blocks"] += 1
            if not realtime:
                continue
            next_deadline += dt
            now = time.monotonic()
            if now > next_deadline + dt:
                missed = int((now - next_deadline) / dt)
                state["underruns"] += missed
                next_deadline = now
            else:
                pause = next_deadline - now
                if pause > 0:
                    time.sleep(pause)

    thread = threading.Thread(target=run, name="lineharp-audio", daemon=True)
    thread.start()
    return StreamHandle(thread, stop_event, state)
