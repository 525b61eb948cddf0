"""
Driving the engine live
=======================

The same render core that writes WAV files also feeds a real-time sink: a
producer thread plucks lines through the session while the audio thread
pulls fixed-size blocks on its own cadence and never blocks. Here the sink
is a capture buffer; for a speaker-and-browser version run

    lineharp serve --data chart.json --port 8765

and open the bundled web UI (frontend/) against ws://localhost:8765/session.
"""

import time
from pathlib import Path

import numpy as np

from lineharp import (
    ActiveNoteBuffer,
    Point2,
    Session,
    encode_wav,
    generate_dataset,
    stream_realtime,
)

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

dataset = generate_dataset("grid", seed=0)
mixer = ActiveNoteBuffer(44100)
session = Session(dataset, mixer=mixer)

captured = []
handle = stream_realtime(lambda block: captured.append(block.copy()), mixer)

# wiggle the cursor across the chart in real time
session.on_cursor_move(Point2(0.02, 0.5), t=0.0)
t0 = time.monotonic()
for step in range(30):
    time.sleep(0.05)
    x = 0.02 + (step + 1) * (0.96 / 30)
    session.on_cursor_move(Point2(x, 0.5), t=time.monotonic() - t0)
time.sleep(1.0)  # let the tails ring out
handle.stop()

audio = np.concatenate(captured)
print(f"streamed {len(captured)} blocks ({len(audio) / 44100:.2f} s), "
      f"underruns={handle.underruns}, stats={mixer.stats()}")
(out_dir / "live_capture.wav").write_bytes(encode_wav(audio, 44100))
print(f"wrote {out_dir / 'live_capture.wav'}")
