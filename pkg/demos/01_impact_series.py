"""
The stochastic impact-series model
==================================

A continuous friction interaction is a train of discrete impacts.
Four statistics describe it completely: mean/std of the inter-impact
interval and mean/std of the impact amplitude. This script generates
the two extremes of the default mapping and looks at their structure.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from frictionsynth import default_mapping, generate_impact_sequence, \
    sequence_statistics

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

mapping = default_mapping()

# The audio endpoints differ mainly in their temporal statistics:
# dense and regular (rub) versus sparse and irregular (scratch).
rub = generate_impact_sequence(mapping.rub_audio, 1.0)
scratch = generate_impact_sequence(mapping.scratch_audio, 1.0)

for name, events in (("rub", rub), ("scratch", scratch)):
    s = sequence_statistics(events)
    print(f"{name:>8}: {s.count:4d} events, "
          f"interval {1e3 * s.interval_mean:.2f} +/- {1e3 * s.interval_std:.2f} ms "
          f"(CV {s.interval_std / s.interval_mean:.2f}), "
          f"amplitude {s.amp_mean:.2f} +/- {s.amp_std:.2f}")

# Stem plots make the contrast obvious: rubbing looks like a picket
# fence, scratching like sparse strikes of varying strength.
fig, axes = plt.subplots(2, 1, figsize=(10, 5), sharex=True)
for ax, (name, events) in zip(axes, (("rub", rub), ("scratch", scratch))):
    t = [e.time_s for e in events]
    a = [e.amplitude for e in events]
    ax.vlines(t, 0, a, lw=0.8)
    ax.set_ylabel(f"{name}\namplitude")
    ax.set_ylim(0, 1)
axes[1].set_xlabel("time [s]")
fig.suptitle("Impact trains at the two action extremes (audio mapping)")
fig.tight_layout()
fig.savefig(out_dir / "01_impact_trains.png", dpi=120)
print(f"figure -> {out_dir / '01_impact_trains.png'}")

# Interval histograms against the generating Gaussian: the generator
# redraws anything below the 1 ms floor, so the left tail is clipped.
fig, axes = plt.subplots(1, 2, figsize=(10, 3.5))
for ax, (name, events, params) in zip(axes, (
        ("rub", rub, mapping.rub_audio),
        ("scratch", scratch, mapping.scratch_audio))):
    iv = np.diff([e.time_s for e in events])
    ax.hist(1e3 * iv, bins=30, density=True, alpha=0.7)
    ax.axvline(1e3 * params.mu_interval_s, color="k", ls="--", lw=1,
               label="mean")
    ax.set_title(f"{name}: intervals")
    ax.set_xlabel("interval [ms]")
    ax.legend()
fig.tight_layout()
fig.savefig(out_dir / "01_interval_histograms.png", dpi=120)
print(f"figure -> {out_dir / '01_interval_histograms.png'}")
