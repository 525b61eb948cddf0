"""Plucked-string voice: noise-excited delay-line loop with an AD envelope.

The string loop is a classic averaging-lowpass delay line plus a first-order
allpass for fractional-delay tuning. The averaging filter has an exact phase
delay of 0.5 samples at every frequency; the allpass coefficient is solved
numerically so the total loop delay matches the target period, which keeps
the realized fundamental well inside 1% of the request across the mapped
range. The envelope, not the loop, owns the decay contract: linear attack,
then exponential decay hitting -60 dB at the effective decay time.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.signal import lfilter

from .mapping import Note

LOOP_LOSS = 0.999  # keeps the recursion strictly stable; ~-1 dB/s at 110 Hz
# lowpass blend: y = (1-d/2)*x[n] + (d/2)*x[n-1]. Full averaging (d=1) damps
# the fundamental itself by several dB/s at the top of the mapped range,
# which would undercut the envelope's -60 dB contract; a light blend keeps
# the brightness rolloff without audibly shortening the tail.
DAMPING_BLEND = 0.12
EXCITATION_RMS = 0.35
EXCITATION_PEAK_CAP = 0.98
ENV_DECAY_LN = math.log(1000.0)  # -60 dB
ENV_SILENCE = 1e-4  # -80 dB: voice reports finished below this


def _allpass_phase_delay(c: float, w: float) -> float:
    """Exact phase delay in samples of H(z) = (c + z^-1)/(1 + c z^-1) at w."""
    arg_n = math.atan2(-math.sin(w), c + math.cos(w))
    arg_d = math.atan2(-c * math.sin(w), 1.0 + c * math.cos(w))
    return -(arg_n - arg_d) / w


def _solve_allpass_coeff(delay: float, w: float) -> float:
    return brentq(lambda c: _allpass_phase_delay(c, w) - delay, -0.95, 0.999, xtol=1e-12)


def _excitation_seed(line_id: int, onset: float) -> np.random.Generator:
    # identical (line_id, onset) must reproduce the same pluck bit-for-bit
    onset_bits = struct.unpack("<Q", struct.pack("<d", float(onset)))[0]
    return np.random.default_rng(np.random.SeedSequence([int(line_id) & 0xFFFFFFFF, onset_bits]))


@dataclass
class Voice:
    note: Note
    sample_rate: float
    effective_decay: float
    attack: float
    # filter state
    _b: np.ndarray = field(repr=False, default=None)
    _a: np.ndarray = field(repr=False, default=None)
    _zi: np.ndarray = field(repr=False, default=None)
    _excitation: np.ndarray = field(repr=False, default=None)
    _pos: int = 0
    _total_samples: int = 0
    _attack_samples: int = 0

    @property
    def finished(self) -> bool:
        return self._pos >= self._total_samples

    def render(self, frames: int) -> np.ndarray:
        """Next block of mono samples in [-1, 1], envelope applied."""
        if self.finished:
            return np.zeros(frames)
        n0 = self._pos
        x = np.zeros(frames)
        exc_left = len(self._excitation) - n0
        if exc_left > 0:
            take = min(exc_left, frames)
            x[:take] = self._excitation[n0 : n0 + take]
        y, self._zi = lfilter(self._b, self._a, x, zi=self._zi)
        idx = np.arange(n0, n0 + frames, dtype=np.float64)
        env = np.empty(frames)
        ramp = idx < self._attack_samples
        env[ramp] = (idx[ramp] + 1.0) / self._attack_samples
        tau_samples = self.effective_decay * self.sample_rate
        env[~ramp] = np.exp(-ENV_DECAY_LN * (idx[~ramp] - self._attack_samples) / tau_samples)
        out = self.note.amplitude * env * np.clip(y, -1.0, 1.0)
        self._pos += frames
        if self._pos > self._total_samples:
            out[self._total_samples - n0 :] = 0.0
        return out


def spawn_voice(
    note: Note,
    sample_rate: float,
    attack: float = 0.002,
    effective_decay: Optional[float] = None,
) -> Voice:
    """Build a tuned, seeded string voice for one note.

    The delay line is filled with zero-mean white noise seeded from
    (line_id, onset) so identical plucks render identical samples.
    """
    if not (note.frequency > 0) or note.frequency > sample_rate / 4:
        raise ValueError(
            f"frequency {note.frequency} outside synthesizable range "
            f"(0, {sample_rate / 4}]"
        )
    tau = effective_decay if effective_decay is not None else note.decay
    period = sample_rate / note.frequency
    w0 = 2.0 * math.pi * note.frequency / sample_rate
    b0 = 1.0 - DAMPING_BLEND / 2.0
    b1 = DAMPING_BLEND / 2.0
    lp_delay = math.atan2(b1 * math.sin(w0), b0 + b1 * math.cos(w0)) / w0
    n_delay = max(int(math.floor(period - lp_delay - 0.1)), 2)
    rem = period - n_delay - lp_delay  # fractional delay assigned to the allpass
    c = _solve_allpass_coeff(rem, w0)

    # loop: y[n] = x[n] + allpass(lowpass(y delayed n_delay)) * loss, with
    # the allpass denominator folded into the direct-form coefficients
    a = np.zeros(n_delay + 3)
    a[0] = 1.0
    a[1] = c
    a[n_delay] -= LOOP_LOSS * c * b0
    a[n_delay + 1] -= LOOP_LOSS * (c * b1 + b0)
    a[n_delay + 2] -= LOOP_LOSS * b1
    b = np.array([1.0, c])

    # white noise burst with unit magnitude at every bin and random phase:
    # per-seed pluck loudness stays even because the energy reaching each
    # harmonic is deterministic, only the waveform changes
    rng = _excitation_seed(note.line_id, note.onset)
    phases = rng.uniform(0.0, 2.0 * np.pi, n_delay // 2 + 1)
    spectrum = np.exp(1j * phases)
    spectrum[0] = 0.0  # zero mean
    noise = np.fft.irfft(spectrum, n_delay)
    noise *= EXCITATION_RMS / np.sqrt(np.mean(noise * noise))
    np.clip(noise, -EXCITATION_PEAK_CAP, EXCITATION_PEAK_CAP, out=noise)

    attack_samples = max(1, int(round(attack * sample_rate)))
    total = attack_samples + int(
        math.ceil(tau * sample_rate * math.log(1.0 / ENV_SILENCE) / ENV_DECAY_LN)
    )
    return Voice(
        note=note,
        sample_rate=sample_rate,
        effective_decay=tau,
        attack=attack,
        _b=b,
        _a=a,
        _zi=np.zeros(n_delay + 2),
        _excitation=noise,
        _pos=0,
        _total_samples=total,
        _attack_samples=attack_samples,
    )


def render_voice(voice: Voice, frames: int) -> np.ndarray:
    """Render the next block of a live voice."""
    if voice.finished:
        raise ValueError("voice already finished")
    return voice.render(frames)
