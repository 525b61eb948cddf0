"""Audio forensics for rendered sonifications: f0 contour, RMS, onsets.

The pitch tracker is an enhanced-autocorrelation estimator: per-window
autocorrelation (via FFT), clamped positive, minus a time-stretched copy of
itself, which cancels the spurious peak one octave below the true lag. Peaks
are refined with parabolic interpolation, so single plucked notes resolve to
well under a percent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np


@dataclass
class PitchFrame:
    t: float
    f0: Optional[float]
    confidence: float


@dataclass
class PitchContour:
    frames: list[PitchFrame]

    def voiced(self) -> list[PitchFrame]:
        return [f for f in self.frames if f.f0 is not None]

    def median_f0(self, t0: float = -math.inf, t1: float = math.inf) -> Optional[float]:
        vals = [f.f0 for f in self.frames if f.f0 is not None and t0 <= f.t <= t1]
        if not vals:
            return None
        return float(np.median(vals))


class RmsPoint(NamedTuple):
    t: float
    rms: float


DEFAULT_CONFIDENCE_THRESHOLD = 0.3


def pitch_contour(
    samples: np.ndarray,
    sample_rate: float,
    window: int = 2048,
    hop: int = 512,
    f_min_search: float = 70.0,
    f_max_search: float = 1200.0,
    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
) -> PitchContour:
    """Fundamental-frequency contour with octave-error suppression."""
    x = np.asarray(samples, dtype=np.float64)
    if window > len(x):
        raise ValueError(f"window {window} larger than signal of {len(x)} samples")
    lag_min = max(2, int(math.ceil(sample_rate / f_max_search)))
    lag_max = min(window - 2, int(math.floor(sample_rate / f_min_search)))
    if lag_min >= lag_max:
        raise ValueError("search range empty; window too small for f_min_search")
    win = np.hanning(window)
    nfft = 1 << int(math.ceil(math.log2(2 * window)))
    frames = []
    half_idx = np.arange(window) / 2.0
    base_idx = np.arange(window, dtype=np.float64)
    for start in range(0, len(x) - window + 1, hop):
        frame = x[start : start + window] * win
        spec = np.fft.rfft(frame, nfft)
        ac = np.fft.irfft(spec * np.conj(spec))[:window]
        t = (start + window / 2.0) / sample_rate
        r0 = ac[0]
        if r0 < 1e-12:
            frames.append(PitchFrame(t, None, 0.0))
            continue
        acp = np.maximum(ac, 0.0)
        stretched = np.interp(half_idx, base_idx, acp)
        enhanced = np.maximum(acp - stretched, 0.0)
        seg = enhanced[lag_min : lag_max + 1]
        rel = int(np.argmax(seg))
        lag = lag_min + rel
        # The stretch-subtraction can demote a true period whose half-lag
        # carries a strong second harmonic; promote to an integer multiple
        # of the candidate when the raw correlation there is clearly higher.
        # The margin must clear the mild acp inversions that attack
        # transients cause at the double lag (~1.05x) while catching real
        # half-period errors (~1.6x).
        promoted = True
        while promoted:
            promoted = False
            for k in (2, 3, 4):
                lo = k * lag - 2
                hi = min(k * lag + 2, lag_max)
                if lo > lag_max:
                    break
                m = lo + int(np.argmax(acp[lo : hi + 1]))
                if acp[m] > 1.2 * acp[lag]:
                    lag = m
                    promoted = True
                    break
        confidence = float(min(1.0, acp[lag] / r0))
        if confidence < confidence_threshold or enhanced[lag] <= 0.0:
            frames.append(PitchFrame(t, None, confidence))
            continue
        # parabolic refinement on the raw autocorrelation around the peak
        lm, l0, lp = ac[lag - 1], ac[lag], ac[lag + 1]
        denom = lm - 2.0 * l0 + lp
        shift = 0.0 if denom == 0.0 else 0.5 * (lm - lp) / denom
        shift = float(np.clip(shift, -0.5, 0.5))
        f0 = sample_rate / (lag + shift)
        frames.append(PitchFrame(t, float(f0), confidence))
    return PitchContour(frames)


def rms_envelope(
    samples: np.ndarray, sample_rate: float, window: int = 1024, hop: int = 256
) -> list[RmsPoint]:
    """Root-mean-square level per hop, timestamped at the window center."""
    x = np.asarray(samples, dtype=np.float64)
    out = []
    for start in range(0, max(len(x) - window + 1, 1), hop):
        frame = x[start : start + window]
        if len(frame) == 0:
            break
        rms = float(np.sqrt(np.mean(frame * frame)))
        out.append(RmsPoint((start + window / 2.0) / sample_rate, rms))
    return out


def detect_onsets(
    samples: np.ndarray,
    sample_rate: float,
    window: int = 512,
    hop: int = 64,
    merge_window: float = 0.02,
) -> list[float]:
    """Note-start times from positive spectral flux, merged within 20 ms."""
    x = np.asarray(samples, dtype=np.float64)
    if len(x) < window + hop:
        return []
    win = np.hanning(window)
    n_frames = (len(x) - window) // hop + 1
    mags = np.empty((n_frames, window // 2 + 1))
    for i in range(n_frames):
        mags[i] = np.abs(np.fft.rfft(x[i * hop : i * hop + window] * win))
    # log compression keeps quiet attacks visible under ringing louder tails
    mags = np.log1p(1000.0 * mags)
    flux = np.zeros(n_frames)
    diffs = np.diff(mags, axis=0)
    flux[1:] = np.sum(np.maximum(diffs, 0.0), axis=1)
    peak = flux.max()
    if peak <= 0.0:
        return []
    flux /= peak
    # adaptive floor: local median over ~0.4 s plus an absolute minimum
    from scipy.ndimage import median_filter

    local = median_filter(flux, size=max(3, int(0.4 * sample_rate / hop) | 1))
    threshold = np.maximum(0.05, local * 1.5 + 0.03)
    onsets = []
    for i in range(1, n_frames - 1):
        if flux[i] > threshold[i] and flux[i] >= flux[i - 1] and flux[i] > flux[i + 1]:
            # time the half-height rising edge: the peak position drifts with
            # masking context, the edge does not
            half = 0.5 * flux[i]
            back = max(i - max(6, int(0.018 * sample_rate / hop)), 0)
            j = i
            while j > back and flux[j - 1] > half:
                j -= 1
            if j > 0 and flux[j] > half >= flux[j - 1]:
                frac = (half - flux[j - 1]) / (flux[j] - flux[j - 1])
                pos = (j - 1) + frac
            else:
                pos = float(j)
            t = (pos * hop + window / 2.0) / sample_rate
            if onsets and t - onsets[-1] < merge_window:
                continue
            onsets.append(t)
    return onsets


# ---------------------------------------------------------------------------
# Export formats
# ---------------------------------------------------------------------------


def contour_to_csv(contour: PitchContour) -> str:
    rows = ["t,f0,confidence"]
    for f in contour.frames:
        f0 = "" if f.f0 is None else format(f.f0, ".6g")
        rows.append(f"{f.t:.6f},{f0},{f.confidence:.4f}")
    return "\n".join(rows) + "\n"


def rms_to_csv(env: list[RmsPoint]) -> str:
    rows = ["t,rms"]
    for p in env:
        rows.append(f"{p.t:.6f},{p.rms:.6g}")
    return "\n".join(rows) + "\n"


def onsets_to_json(onsets: list[float]) -> str:
    return json.dumps([round(t, 6) for t in onsets]) + "\n"
