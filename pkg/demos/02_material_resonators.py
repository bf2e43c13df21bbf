"""
Material evocation with modal resonator banks
=============================================

The audio channel is the impact train filtered through a bank of
two-pole resonators; frequencies, decays and gains of the bank evoke
the struck object. Here the same scratch train plays three shipped
materials, written as WAV files you can listen to.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from frictionsynth import RenderConfig, default_mapping, default_materials, \
    generate_impact_sequence, modal_filter, render_impact_train, soft_limit, \
    write_wav

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

config = RenderConfig()
mapping = default_mapping()

events = generate_impact_sequence(mapping.scratch_audio, 3.0)
excitation = render_impact_train(events, 3.0, config)

fig, axes = plt.subplots(1, 3, figsize=(13, 3.5), sharey=True)
for ax, material in zip(axes, default_materials()):
    audio = soft_limit(modal_filter(excitation, material, config),
                       config.limiter_ceiling)
    path = out_dir / f"02_scratch_{material.name}.wav"
    write_wav(audio.samples, config.sample_rate_hz, path)
    print(f"{material.name:>6}: peak {audio.peak:.2f}, rms {audio.rms:.3f} "
          f"-> {path}")

    ax.specgram(audio.samples, NFFT=2048, Fs=config.sample_rate_hz,
                noverlap=1024, cmap="magma")
    ax.set_title(material.name)
    ax.set_xlabel("time [s]")
    ax.set_ylim(0, 10_000)
axes[0].set_ylabel("frequency [Hz]")
fig.suptitle("One scratch train through three resonator banks")
fig.tight_layout()
fig.savefig(out_dir / "02_material_spectrograms.png", dpi=120)
print(f"figure -> {out_dir / '02_material_spectrograms.png'}")

# The impulse response of each bank shows why they sound different:
# wood damps in tens of milliseconds, metal rings for seconds.
from frictionsynth import ModalFilterBank

fig, ax = plt.subplots(figsize=(10, 3.5))
n = int(1.2 * config.sample_rate_hz)
impulse = np.zeros(n)
impulse[0] = 1.0
t = np.arange(n) / config.sample_rate_hz
for material in default_materials():
    h = ModalFilterBank(material, config.sample_rate_hz).process(impulse)
    envelope = np.abs(h)
    ax.plot(t, 20 * np.log10(np.maximum(envelope, 1e-8)), lw=0.6,
            label=material.name)
ax.set_xlabel("time [s]")
ax.set_ylabel("level [dBFS]")
ax.set_ylim(-120, 0)
ax.legend()
ax.set_title("Bank impulse-response decay")
fig.tight_layout()
fig.savefig(out_dir / "02_impulse_decay.png", dpi=120)
print(f"figure -> {out_dir / '02_impulse_decay.png'}")
