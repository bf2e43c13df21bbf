"""Per-factor effect analysis of rating sessions.

For each modality the four generator statistics are treated as design
factors: the report carries, per factor, the Pearson correlation with
the rating, the standardized coefficient of an OLS fit of rating on the
four z-scored factors, and a seeded permutation-test p-value. The factor
with the largest |coefficient| is named dominant for that modality.
"""

from __future__ import annotations

import numpy as np

from .experiment import FACTOR_NAMES, ResponseRecord

__all__ = ["analyze", "format_report", "AnalysisError"]


class AnalysisError(ValueError):
    pass


def _effectively_constant(x: np.ndarray) -> np.ndarray:
    """Per-column constancy with a scale-relative tolerance: a column of
    identical values can still carry an O(1e-17) std from summation
    rounding, which must not be z-scored into a noise regressor."""
    scale = np.maximum(np.max(np.abs(x), axis=0), 1e-300)
    return x.std(axis=0) <= 1e-12 * scale


def _zscore_columns(x: np.ndarray) -> np.ndarray:
    """Population z-score per column; constant columns map to zero."""
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    z = np.zeros_like(x)
    varying = ~_effectively_constant(x)
    z[:, varying] = (x[:, varying] - mean[varying]) / std[varying]
    return z


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    if _effectively_constant(x[:, None])[0] \
            or _effectively_constant(y[:, None])[0]:
        return 0.0
    return float(np.corrcoef(x, y)[0, 1])


def _fit_standardized(z: np.ndarray, y: np.ndarray) -> np.ndarray:
    design = np.column_stack([np.ones(len(y)), z])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return coef[1:]


def _permutation_p_values(z: np.ndarray, y: np.ndarray, observed: np.ndarray,
                          n_permutations: int, rng: np.random.Generator
                          ) -> np.ndarray:
    design = np.column_stack([np.ones(len(y)), z])
    solver = np.linalg.pinv(design)  # (k+1, n); one solve serves all perms
    perms = np.empty((n_permutations, len(y)))
    for i in range(n_permutations):
        perms[i] = rng.permutation(y)
    null_coefs = solver @ perms.T  # (k+1, n_permutations)
    # Epsilon guard: a coefficient that is pure float noise (constant
    # ratings) must not look significant against equally noisy nulls.
    threshold = np.maximum(np.abs(observed) - 1e-12, 0.0)
    exceed = (np.abs(null_coefs[1:]) >= threshold[:, None]).sum(axis=1)
    return (1.0 + exceed) / (n_permutations + 1.0)


def analyze(responses: list[ResponseRecord], manifest: dict,
            n_permutations: int = 10000, seed: int = 0) -> dict:
    """Build the per-modality effect report from responses and manifest."""
    if not responses:
        raise AnalysisError("no responses to analyze")
    if n_permutations < 1:
        raise AnalysisError("n_permutations must be >= 1")

    by_id = {s["id"]: s for s in manifest["stimuli"]}
    missing = sorted({r.stimulus_id for r in responses
                      if r.stimulus_id not in by_id})
    usable = [r for r in responses if r.stimulus_id in by_id]
    if not usable:
        raise AnalysisError(
            f"no responses match the manifest; unknown ids: {missing}")

    # Canonical row order makes the seeded permutation stream independent
    # of CSV row order.
    usable.sort(key=lambda r: (r.stimulus_id, r.subject_id,
                               r.presentation_index))

    report: dict = {
        "n_responses": len(usable),
        "n_permutations": n_permutations,
        "seed": seed,
        "excluded_ids": missing,
        "modalities": {},
    }

    for modality in ("audio", "tactile"):
        rows = [r for r in usable if by_id[r.stimulus_id]["modality"] == modality]
        if not rows:
            continue
        x = np.array([[by_id[r.stimulus_id]["factors"][f] for f in FACTOR_NAMES]
                      for r in rows])
        y = np.array([r.rating for r in rows])
        z = _zscore_columns(x)
        coefs = _fit_standardized(z, y)
        rng = np.random.default_rng(
            np.random.SeedSequence([seed, 0 if modality == "audio" else 1]))
        p_values = _permutation_p_values(z, y, coefs, n_permutations, rng)

        factors = {}
        for j, name in enumerate(FACTOR_NAMES):
            factors[name] = {
                "pearson_r": _pearson(x[:, j], y),
                "coefficient": float(coefs[j]),
                "p_value": float(p_values[j]),
            }
        dominant = max(FACTOR_NAMES,
                       key=lambda n: abs(factors[n]["coefficient"]))
        report["modalities"][modality] = {
            "n_rows": len(rows),
            "factors": factors,
            "dominant_factor": dominant,
        }
    return report


def format_report(report: dict) -> str:
    """Fixed-width human-readable view of an analyze() report."""
    lines = []
    lines.append(f"responses: {report['n_responses']}   "
                 f"permutations: {report['n_permutations']}   "
                 f"seed: {report['seed']}")
    if report["excluded_ids"]:
        lines.append(f"excluded unknown stimulus ids: "
                     f"{', '.join(report['excluded_ids'])}")
    for modality, mod in report["modalities"].items():
        lines.append("")
        lines.append(f"[{modality}]  rows: {mod['n_rows']}")
        lines.append(f"  {'factor':<18} {'pearson r':>10} "
                     f"{'coefficient':>12} {'p-value':>9}")
        for name in FACTOR_NAMES:
            f = mod["factors"][name]
            lines.append(f"  {name:<18} {f['pearson_r']:>10.4f} "
                         f"{f['coefficient']:>12.4f} {f['p_value']:>9.4f}")
        lines.append(f"  dominant factor: {mod['dominant_factor']}")
    return "\n".join(lines)
