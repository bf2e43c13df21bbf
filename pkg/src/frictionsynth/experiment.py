"""Stimulus-bank generation and the rating-session harness.

A grid design crosses factor levels of the four generator statistics
with the stimulus modalities into a bank of WAV stimuli plus a manifest.
Sessions present the bank in seeded-shuffled order and append one rating
per stimulus to a CSV; interrupted sessions resume from the partial CSV.

Rating polarity: 0 = "gratter" (scratch), 1 = "frotter" (rub).
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .impacts import ImpactSeriesParams, generate_impact_sequence
from .render import ConfigError, MaterialPreset, RenderConfig, modal_filter, \
    render_impact_train, soft_limit, tactile_shape
from .wavio import write_wav

__all__ = [
    "FACTOR_NAMES",
    "RATING_POLARITY_NOTE",
    "StimulusSpec",
    "GridDesign",
    "ResponseRecord",
    "derive_seed",
    "load_design",
    "default_design_path",
    "expand_design",
    "generate_grid",
    "load_manifest",
    "presentation_order",
    "read_responses_csv",
    "append_response",
    "run_session",
]

FACTOR_NAMES = ("mu_interval_s", "sigma_interval_s", "mu_amp", "sigma_amp")

RATING_POLARITY_NOTE = "# rating scale: 0 = gratter (scratch) ... 1 = frotter (rub)"

CSV_COLUMNS = ("subject_id", "stimulus_id", "rating", "presentation_index",
               "timestamp")


@dataclass(frozen=True)
class StimulusSpec:
    """One grid cell: which channel it stimulates and with what statistics."""

    id: str
    modality: str  # "audio" | "tactile"
    params: ImpactSeriesParams
    material: Optional[str]
    duration_s: float

    def __post_init__(self) -> None:
        if self.modality not in ("audio", "tactile"):
            raise ConfigError(f"modality must be audio|tactile, got {self.modality!r}")
        if self.duration_s <= 0.0:
            raise ConfigError(f"duration_s must be > 0, got {self.duration_s}")


@dataclass(frozen=True)
class GridDesign:
    name: str
    modalities: tuple[str, ...]
    factors: dict[str, tuple[float, ...]]
    duration_s: float
    material: Optional[str]
    min_interval_s: float = 0.001
    declared_count: Optional[int] = None

    @property
    def cell_count(self) -> int:
        n = len(self.modalities)
        for levels in self.factors.values():
            n *= len(levels)
        return n


@dataclass(frozen=True)
class ResponseRecord:
    subject_id: str
    stimulus_id: str
    rating: float
    presentation_index: int
    timestamp: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.rating <= 1.0:
            raise ValueError(f"rating must be in [0, 1], got {self.rating}")


def derive_seed(master_seed: int, label: str) -> int:
    """Stable 64-bit seed for a labelled child stream (id hashing)."""
    digest = hashlib.sha256(f"{master_seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def default_design_path() -> Path:
    return Path(str(resources.files("frictionsynth").joinpath(
        "data/default_design.json")))


def load_design(path: str | Path) -> GridDesign:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: JSON parse error at line {e.lineno}: "
                          f"{e.msg}") from e
    except OSError as e:
        raise ConfigError(f"cannot read design {path}: {e}") from e

    factors_json = doc.get("factors", {})
    missing = [f for f in FACTOR_NAMES if f not in factors_json]
    if missing:
        raise ConfigError(f"{path}: design missing factor levels for {missing}")
    factors = {}
    for name in FACTOR_NAMES:
        levels = tuple(float(v) for v in factors_json[name])
        if not levels:
            raise ConfigError(f"{path}: factor {name} has no levels")
        factors[name] = levels

    modalities = tuple(doc.get("modalities", ["audio", "tactile"]))
    for m in modalities:
        if m not in ("audio", "tactile"):
            raise ConfigError(f"{path}: unknown modality {m!r}")

    return GridDesign(
        name=doc.get("name", path.stem),
        modalities=modalities,
        factors=factors,
        duration_s=float(doc.get("duration_s", 2.0)),
        material=doc.get("material"),
        min_interval_s=float(doc.get("min_interval_s", 0.001)),
        declared_count=doc.get("declared_count"),
    )


def _format_level(value: float) -> str:
    return f"{value:g}".replace(".", "p").replace("-", "m")


def expand_design(design: GridDesign, master_seed: int) -> list[StimulusSpec]:
    """Full factorial cross of modalities and factor levels with stable
    ids and per-cell seeds derived from the master seed."""
    specs = []
    for modality in design.modalities:
        for mu_t in design.factors["mu_interval_s"]:
            for sigma_t in design.factors["sigma_interval_s"]:
                for mu_a in design.factors["mu_amp"]:
                    for sigma_a in design.factors["sigma_amp"]:
                        sid = (f"{modality}-mt{_format_level(mu_t)}"
                               f"-st{_format_level(sigma_t)}"
                               f"-ma{_format_level(mu_a)}"
                               f"-sa{_format_level(sigma_a)}")
                        params = ImpactSeriesParams(
                            mu_interval_s=mu_t,
                            sigma_interval_s=sigma_t,
                            mu_amp=mu_a,
                            sigma_amp=sigma_a,
                            min_interval_s=design.min_interval_s,
                            seed=derive_seed(master_seed, sid),
                        )
                        specs.append(StimulusSpec(
                            id=sid,
                            modality=modality,
                            params=params,
                            material=design.material
                            if modality == "audio" else None,
                            duration_s=design.duration_s,
                        ))
    return specs


def render_stimulus_channels(spec: StimulusSpec, config: RenderConfig,
                             material: Optional[MaterialPreset]) -> np.ndarray:
    """Render one grid cell to an (n, 2) array; the inactive channel is
    silent so the audio=0 / tactile=1 convention holds for every file."""
    events = generate_impact_sequence(spec.params, spec.duration_s)
    excitation = render_impact_train(events, spec.duration_s, config)
    if spec.modality == "audio":
        if material is not None:
            chan = modal_filter(excitation, material, config)
        else:
            chan = excitation
        active = soft_limit(chan, config.limiter_ceiling).samples
        out = np.zeros((len(active), 2))
        out[:, 0] = active
    else:
        active = soft_limit(tactile_shape(excitation, config),
                            config.limiter_ceiling).samples
        out = np.zeros((len(active), 2))
        out[:, 1] = active
    return out


def generate_grid(design: GridDesign, out_dir: str | Path, master_seed: int,
                  config: RenderConfig,
                  materials: list[MaterialPreset],
                  bit_depth: int = 16,
                  warn: Callable[[str], None] = lambda s: None) -> dict:
    """Render every cell of the design into out_dir and write the
    manifest. Returns the manifest document."""
    if design.declared_count is not None \
            and design.cell_count != design.declared_count:
        warn(f"design {design.name!r} declares {design.declared_count} cells "
             f"but the factor cross yields {design.cell_count}")

    material_by_name = {m.name: m for m in materials}
    if design.material is not None and design.material != "none" \
            and design.material not in material_by_name:
        raise ConfigError(f"design material {design.material!r} not in "
                          f"{sorted(material_by_name)}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    specs = expand_design(design, master_seed)

    ids = [s.id for s in specs]
    if len(set(ids)) != len(ids):
        raise ConfigError("design produced duplicate stimulus ids")

    entries = []
    for spec in specs:
        material = None
        if spec.material is not None and spec.material != "none":
            material = material_by_name[spec.material]
        samples = render_stimulus_channels(spec, config, material)
        fname = f"{spec.id}.wav"
        write_wav(samples, config.sample_rate_hz, out_dir / fname, bit_depth)
        entries.append({
            "id": spec.id,
            "modality": spec.modality,
            "factors": {
                "mu_interval_s": spec.params.mu_interval_s,
                "sigma_interval_s": spec.params.sigma_interval_s,
                "mu_amp": spec.params.mu_amp,
                "sigma_amp": spec.params.sigma_amp,
            },
            "material": spec.material,
            "seed": spec.params.seed,
            "duration_s": spec.duration_s,
            "file": fname,
        })

    manifest = {
        "design": design.name,
        "master_seed": master_seed,
        "sample_rate_hz": config.sample_rate_hz,
        "rating_polarity": RATING_POLARITY_NOTE.lstrip("# "),
        "stimuli": entries,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
    return manifest


def load_manifest(path: str | Path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: JSON parse error at line {e.lineno}: "
                          f"{e.msg}") from e
    except OSError as e:
        raise ConfigError(f"cannot read manifest {path}: {e}") from e
    stimuli = doc.get("stimuli")
    if not stimuli:
        raise ConfigError(f"{path}: manifest has no stimuli")
    ids = [s["id"] for s in stimuli]
    dupes = {i for i in ids if ids.count(i) > 1}
    if dupes:
        raise ConfigError(f"{path}: duplicate stimulus ids: {sorted(dupes)}")
    return doc


# ----- sessions ---------------------------------------------------------


def presentation_order(manifest: dict, subject_id: str,
                       master_seed: Optional[int] = None) -> list[str]:
    """Seeded shuffle of stimulus ids, stable per (manifest, subject)."""
    seed = manifest["master_seed"] if master_seed is None else master_seed
    ids = [s["id"] for s in manifest["stimuli"]]
    rng = np.random.default_rng(derive_seed(seed, f"session:{subject_id}"))
    rng.shuffle(ids)
    return ids


def read_responses_csv(path: str | Path) -> list[ResponseRecord]:
    """Read a (possibly partial) response CSV, skipping comment lines."""
    records = []
    with open(path, encoding="utf-8", newline="") as f:
        rows = csv.reader(line for line in f if not line.startswith("#"))
        header = next(rows, None)
        if header is None:
            return []
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header {header}")
        for row in rows:
            if not row:
                continue
            records.append(ResponseRecord(
                subject_id=row[0],
                stimulus_id=row[1],
                rating=float(row[2]),
                presentation_index=int(row[3]),
                timestamp=row[4],
            ))
    return records


def append_response(path: str | Path, record: ResponseRecord,
                    new_file: bool) -> None:
    """Append one row, creating the commented header for a new file; the
    row is flushed immediately so interruption leaves a valid CSV."""
    mode = "w" if new_file else "a"
    with open(path, mode, encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        if new_file:
            f.write(RATING_POLARITY_NOTE + "\n")
            writer.writerow(CSV_COLUMNS)
        writer.writerow([record.subject_id, record.stimulus_id,
                         f"{record.rating:.6f}", record.presentation_index,
                         record.timestamp])
        f.flush()


def run_session(manifest: dict, subject_id: str, out_csv: str | Path,
                rate: Callable[[dict], float],
                play: Optional[Callable[[dict], None]] = None,
                clock: Callable[[], str] = lambda: datetime.now(
                    timezone.utc).isoformat()) -> int:
    """Present all not-yet-rated stimuli and append responses.

    `rate` maps a manifest stimulus entry to a rating in [0, 1] (a human
    prompt or a scripted responder); `play` is invoked before rating when
    given. Returns the number of newly presented stimuli.
    """
    out_csv = Path(out_csv)
    existing = read_responses_csv(out_csv) if out_csv.exists() else []
    done = {r.stimulus_id for r in existing}
    next_index = len(existing)

    by_id = {s["id"]: s for s in manifest["stimuli"]}
    order = presentation_order(manifest, subject_id)
    remaining = [sid for sid in order if sid not in done]

    presented = 0
    for sid in remaining:
        entry = by_id[sid]
        if play is not None:
            play(entry)
        rating = float(rate(entry))
        record = ResponseRecord(
            subject_id=subject_id,
            stimulus_id=sid,
            rating=rating,
            presentation_index=next_index,
            timestamp=clock(),
        )
        append_response(out_csv, record, new_file=not out_csv.exists())
        next_index += 1
        presented += 1
    return presented
