"""
Why chords need dynamic scaling
===============================

A fast sweep through dense clusters triggers dozens of simultaneous notes.
Rendered naively their waveforms pile up past full scale and clip; with the
spawn-time amplitude/decay scaling the chord stays inside [-1, 1] and the
per-line loudness ordering survives.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from lineharp import decode_wav, generate_dataset, make_sweep, render_offline

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

dataset = generate_dataset("teaser", seed=1)
trajectory = make_sweep((0.0, 0.5), (1.0, 0.5), duration=0.6)  # aggressive pace

fig, axes = plt.subplots(2, 1, figsize=(10, 5), sharex=True, sharey=True)
for ax, scaling in zip(axes, (True, False)):
    wav_bytes, _, stats = render_offline(dataset, trajectory, scaling_enabled=scaling)
    samples, sr = decode_wav(wav_bytes)
    name = "scaled" if scaling else "unscaled"
    (out_dir / f"chords_{name}.wav").write_bytes(wav_bytes)
    t = np.arange(len(samples)) / sr
    ax.plot(t[::10], samples[::10], lw=0.3)
    ax.axhline(1.0, color="r", ls=":", lw=0.8)
    ax.axhline(-1.0, color="r", ls=":", lw=0.8)
    ax.set_title(f"{name}: {stats['clip_samples']} clipped samples")
    print(f"{name:9s} clip_samples={stats['clip_samples']}")
axes[1].set_xlabel("time (s)")
fig.tight_layout()
fig.savefig(out_dir / "dynamic_scaling.png", dpi=120)
print(f"wrote {out_dir / 'dynamic_scaling.png'}")
