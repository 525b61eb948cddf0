"""
Accent and tail in an evenly spaced sequence
============================================

Sweeping across equally spaced identical lines plays a steady pluck train.
The opening note lands in an empty mixer, so it keeps its full gain and
stands out; every later note shares the buffer with its predecessor and is
normalized down; and the closing note rings out untruncated.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from lineharp import (
    MappingConfig,
    decode_wav,
    generate_dataset,
    make_sweep,
    render_offline,
    rms_envelope,
)

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

dataset = generate_dataset("grid", seed=0)

# pin every decay at the base value so all follower notes ring identically
cfg = MappingConfig(decay_min=0.8)
spacing = 0.55  # seconds between plucks
duration = 0.9 / ((1.0 / 9.0) / spacing)
trajectory = make_sweep((0.05, 0.5), (0.95, 0.5), duration=duration)

wav_bytes, events, _ = render_offline(dataset, trajectory, cfg)
(out_dir / "even_plucks.wav").write_bytes(wav_bytes)
samples, sr = decode_wav(wav_bytes)
onsets = [e["t"] for e in events if e["type"] == "pluck"]
env = rms_envelope(samples, sr)

fig, ax = plt.subplots(figsize=(10, 3.5))
t = np.arange(len(samples)) / sr
ax.plot(t[::10], samples[::10], lw=0.3, alpha=0.7)
ax.plot([p.t for p in env], [p.rms for p in env], "k", lw=1.2, label="RMS")
for k, onset in enumerate(onsets):
    ax.axvline(onset, color="g", ls=":", lw=0.8)
ax.set_xlabel("time (s)")
ax.legend()
ax.set_title("first pluck accented, middles even, last one rings longest")
fig.tight_layout()
fig.savefig(out_dir / "even_plucks.png", dpi=120)
print(f"{len(onsets)} plucks, {spacing} s apart")
print(f"wrote {out_dir / 'even_plucks.wav'} and {out_dir / 'even_plucks.png'}")
