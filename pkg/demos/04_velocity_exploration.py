"""
Exploration-driven synthesis: pointer velocity controls event density
=====================================================================

The live engine derives a normalized speed from pointer frames; faster
motion meets more surface asperities per second, so the impact rate
scales with speed while the rub/scratch character stays put. A lifted
pen (stale control stream) gates the output to silence.

This script simulates a pointer session as a control trace - circles,
a pause mid-way, then slow drifting - replays it through the engine
offline, and plots speed against the rendered envelope.
"""

import json
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from frictionsynth import default_config
from frictionsynth.engine import TraceEntry, render_session
from frictionsynth.wavio import write_wav

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

cfg = default_config()
rc = cfg.render
block_dur = rc.block_size / rc.sample_rate_hz
duration = 6.0

# Pointer frames at 120 Hz: two seconds of brisk circling, a one-second
# pause (pen lifted - no frames at all), then three seconds of slow arcs.
frames = []
t = 0.0
while t < duration:
    lifted = 2.0 <= t < 3.0
    if not lifted:
        speed = 2.0 if t < 2.0 else 0.6  # radians per second on the circle
        radius = 0.3
        frames.append({"type": "pointer", "t_s": round(t, 6),
                       "x": 0.5 + radius * np.cos(speed * 2 * np.pi * t),
                       "y": 0.5 + radius * np.sin(speed * 2 * np.pi * t)})
    t += 1.0 / 120.0

trace = [TraceEntry(int(f["t_s"] / block_dur), f) for f in frames]
trace.insert(0, TraceEntry(0, {"type": "set_alpha", "alpha": 0.25}))

samples = render_session(cfg, duration, seed=42, trace=trace)
path = out_dir / "04_exploration.wav"
write_wav(samples, rc.sample_rate_hz, path)
print(f"session -> {path}")

# Envelope of the audio channel against time: density follows speed and
# the pause is silent (staleness gate).
audio = samples[:, 0]
t_axis = np.arange(len(audio)) / rc.sample_rate_hz
win = int(0.01 * rc.sample_rate_hz)
envelope = np.sqrt(np.convolve(audio**2, np.ones(win) / win, mode="same"))

fig, ax = plt.subplots(figsize=(11, 3.5))
ax.plot(t_axis, envelope, lw=0.7)
ax.axvspan(2.0, 3.0, color="0.9", label="pen lifted")
ax.set_xlabel("time [s]")
ax.set_ylabel("audio envelope")
ax.set_title("Fast circling, a lift, then slow arcs")
ax.legend()
fig.tight_layout()
fig.savefig(out_dir / "04_envelope.png", dpi=120)
print(f"figure -> {out_dir / '04_envelope.png'}")

# The same trace serialized the way the engine records live sessions.
trace_path = out_dir / "04_trace.jsonl"
with open(trace_path, "w") as f:
    for entry in trace:
        f.write(json.dumps({"block": entry.block, "msg": entry.msg}) + "\n")
print(f"trace -> {trace_path}")
print("replay it:  frictionsynth-engine --duration 6 "
      f"--outfile replay.wav --trace {trace_path}")
