"""
Stimulus bank, rating session, effect analysis
==============================================

The offline pipeline in one pass: cross factor levels into a bank of
WAV stimuli with a manifest, collect ratings (here from a scripted
responder standing in for a subject), then ask which of the four
generator statistics drove the ratings on each channel.

The scripted responder implements a noisy ground truth: on the audio
channel it reacts to interval irregularity, on the tactile channel to
amplitude - so the analysis should name those factors dominant.
"""

import json
from pathlib import Path

import numpy as np

from frictionsynth import default_config
from frictionsynth.analysis import analyze, format_report
from frictionsynth.experiment import generate_grid, load_design, \
    load_manifest, run_session, read_responses_csv

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

cfg = default_config()

# A compact design (36 cells) keeps this demo quick; the shipped
# default design has 96. Any design file with the four factors works.
design_doc = {
    "name": "demo-36",
    "modalities": ["audio", "tactile"],
    "duration_s": 1.0,
    "material": "wood",
    "factors": {
        "mu_interval_s": [0.005, 0.015, 0.045],
        "sigma_interval_s": [0.001, 0.004, 0.016],
        "mu_amp": [0.25, 0.75],
        "sigma_amp": [0.05],
    },
    "declared_count": 36,
}
design_path = out_dir / "05_design.json"
design_path.write_text(json.dumps(design_doc, indent=2))

bank_dir = out_dir / "05_bank"
design = load_design(design_path)
manifest = generate_grid(design, bank_dir, master_seed=7, config=cfg.render,
                         materials=list(cfg.materials))
print(f"bank: {len(manifest['stimuli'])} stimuli -> {bank_dir}")

# Scripted responder: rating 1 means "feels like rubbing". Audio trials
# hinge on regularity (low sigma/mu), tactile trials on weak amplitude.
rng = np.random.default_rng(1)


def responder(entry):
    f = entry["factors"]
    if entry["modality"] == "audio":
        irregularity = f["sigma_interval_s"] / f["mu_interval_s"]
        score = 1.0 - min(irregularity / 0.5, 1.0)
    else:
        score = 1.0 - f["mu_amp"]
    return float(np.clip(score + rng.normal(0.0, 0.08), 0.0, 1.0))


csv_path = out_dir / "05_responses.csv"
csv_path.unlink(missing_ok=True)
manifest = load_manifest(bank_dir / "manifest.json")
n = run_session(manifest, "demo-subject", csv_path, rate=responder)
print(f"session: {n} ratings -> {csv_path}")

report = analyze(read_responses_csv(csv_path), manifest,
                 n_permutations=5000, seed=0)
print()
print(format_report(report))

with open(out_dir / "05_report.json", "w") as f:
    json.dump(report, f, indent=2)
print(f"\nreport -> {out_dir / '05_report.json'}")
