"""
Pluck a dense line chart
========================

Generate the four-cluster benchmark chart, sweep a virtual cursor straight
across it at fixed speed, and listen to what the data sounds like: each
crossed line rings like a plucked string, direction sets the pitch, and
importance sets the loudness.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from lineharp import (
    decode_wav,
    generate_dataset,
    make_sweep,
    pitch_contour,
    render_offline,
    rms_envelope,
)

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

# 270 lines: rising, falling, flat, and oscillating clusters over a noise floor
dataset = generate_dataset("teaser", seed=1)

# one 5-second pass through the middle of the chart, like the hand would move
trajectory = make_sweep((0.0, 0.5), (1.0, 0.5), duration=5.0)

wav_bytes, events, stats = render_offline(dataset, trajectory)
(out_dir / "teaser_sweep.wav").write_bytes(wav_bytes)
samples, sr = decode_wav(wav_bytes)

plucks = [e for e in events if e["type"] == "pluck"]
print(f"{len(plucks)} plucks over {len(samples) / sr:.1f} s of audio")
print(f"engine stats: {stats}")

# the pitch contour makes the four clusters visible as four frequency bands
contour = pitch_contour(samples, sr)
env = rms_envelope(samples, sr)

fig, (ax1, ax2, ax3) = plt.subplots(3, 1, figsize=(10, 8), sharex=True)
t_wave = np.arange(len(samples)) / sr
ax1.plot(t_wave[::20], samples[::20], lw=0.3)
ax1.set_ylabel("amplitude")
ax1.set_title("cursor sweep across the four-cluster chart")
ax2.plot([p.t for p in env], [p.rms for p in env])
ax2.set_ylabel("RMS")
voiced = contour.voiced()
ax3.scatter([f.t for f in voiced], [f.f0 for f in voiced], s=4)
ax3.set_yscale("log")
ax3.set_ylabel("f0 (Hz)")
ax3.set_xlabel("time (s)")
fig.tight_layout()
fig.savefig(out_dir / "teaser_sweep.png", dpi=120)
print(f"wrote {out_dir / 'teaser_sweep.wav'} and {out_dir / 'teaser_sweep.png'}")
