"""
Morphing continuously from rubbing to scratching
================================================

One action coordinate alpha drives both channels through different
parameter paths: the audio mapping morphs the temporal statistics (the
train gets sparser and more irregular), the tactile mapping morphs the
amplitude statistics (the drive gets stronger). This script renders a
sweep and measures what changes on each channel.
"""

from dataclasses import replace
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from frictionsynth import RenderConfig, default_materials, default_mapping, \
    render_stimulus, write_wav
from frictionsynth.impacts import action_to_audio_params, \
    action_to_tactile_params

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

config = RenderConfig()
mapping = default_mapping()
wood = default_materials()[0]

# A nine-step sweep, one second per step, glued into a single stereo
# file: channel 0 audio (wood), channel 1 tactile drive.
alphas = np.linspace(0.0, 1.0, 9)
segments = []
audio_rms, audio_cv, tactile_rms = [], [], []
for i, alpha in enumerate(alphas):
    ap = replace(action_to_audio_params(alpha, mapping), seed=100 + i)
    tp = replace(action_to_tactile_params(alpha, mapping), seed=200 + i)
    audio, tactile = render_stimulus(ap, tp, wood, 1.0, config)
    segments.append(np.column_stack((audio.samples, tactile.samples)))
    audio_rms.append(audio.rms)
    tactile_rms.append(tactile.rms)
    audio_cv.append(ap.interval_cv)

morph = np.concatenate(segments)
path = out_dir / "03_morph_rub_to_scratch.wav"
write_wav(morph, config.sample_rate_hz, path)
print(f"morph sweep ({len(alphas)} steps) -> {path}")

fig, axes = plt.subplots(1, 3, figsize=(12, 3.5))
axes[0].plot(alphas, audio_cv, "o-")
axes[0].set_title("audio: interval irregularity")
axes[0].set_ylabel("sigma/mu of interval")
axes[1].plot(alphas, audio_rms, "o-")
axes[1].set_title("audio: channel RMS (wood)")
axes[2].plot(alphas, tactile_rms, "o-")
axes[2].set_title("tactile: drive RMS")
for ax in axes:
    ax.set_xlabel("alpha (0 = rub, 1 = scratch)")
fig.tight_layout()
fig.savefig(out_dir / "03_morph_measurements.png", dpi=120)
print(f"figure -> {out_dir / '03_morph_measurements.png'}")

# The design intent in numbers: temporal irregularity is the audio cue,
# amplitude is the tactile cue.
print(f"audio interval CV: {audio_cv[0]:.2f} -> {audio_cv[-1]:.2f} "
      f"({audio_cv[-1] / audio_cv[0]:.1f}x)")
print(f"tactile RMS:       {tactile_rms[0]:.4f} -> {tactile_rms[-1]:.4f} "
      f"({tactile_rms[-1] / tactile_rms[0]:.1f}x)")
