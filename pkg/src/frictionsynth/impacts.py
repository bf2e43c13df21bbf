"""Stochastic impact-series model of continuous friction interactions.

A friction interaction (rubbing through scratching) is represented as a
train of discrete impact events. The train is fully described by four
statistics: mean and standard deviation of the inter-impact interval
(mu_interval_s, sigma_interval_s) and of the impact amplitude (mu_amp,
sigma_amp). Dense, regular, weak impacts read as rubbing; sparse,
irregular, strong ones as scratching.

A single action coordinate alpha in [0, 1] (0 = rub, 1 = scratch) is
mapped to per-modality parameter sets: the audio mapping moves chiefly
the temporal statistics, the tactile mapping chiefly the amplitude
statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "ParameterError",
    "OrderingError",
    "ImpactEvent",
    "ImpactSeriesParams",
    "ActionMapping",
    "ActionState",
    "SequenceStats",
    "default_mapping",
    "generate_impact_sequence",
    "action_to_audio_params",
    "action_to_tactile_params",
    "scale_rate_by_velocity",
    "sequence_statistics",
    "clamp_alpha",
    "events_to_arrays",
]

# Floor applied to interval spreads before log-interpolation; keeps the
# geometric path defined when one endpoint is exactly periodic.
SIGMA_LOG_FLOOR = 1e-9

# Normalized pointer speed below which the engine gates output to silence.
# scale_rate_by_velocity still divides by this floor so the returned
# parameters stay finite at rest.
VELOCITY_FLOOR = 0.05


class ParameterError(ValueError):
    """Invalid impact-series parameters or arguments."""


class OrderingError(ValueError):
    """Event list violates the required time ordering."""


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ImpactEvent:
    """One excitation event: a point in time with a strength in [0, 1]."""

    time_s: float
    amplitude: float

    def __post_init__(self) -> None:
        t = _require_finite("time_s", self.time_s)
        a = _require_finite("amplitude", self.amplitude)
        if t < 0.0:
            raise ParameterError(f"time_s must be >= 0, got {t}")
        if not 0.0 <= a <= 1.0:
            raise ParameterError(f"amplitude must be in [0, 1], got {a}")


@dataclass(frozen=True)
class ImpactSeriesParams:
    """The four generator statistics plus generation guards.

    Intervals are drawn from a Gaussian(mu_interval_s, sigma_interval_s)
    and redrawn until >= min_interval_s; amplitudes are Gaussian
    (mu_amp, sigma_amp) clamped to [0, 1]. `seed` makes a generation run
    reproducible.
    """

    mu_interval_s: float
    sigma_interval_s: float
    mu_amp: float
    sigma_amp: float
    min_interval_s: float = 0.001
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("mu_interval_s", "sigma_interval_s", "mu_amp", "sigma_amp",
                     "min_interval_s"):
            _require_finite(name, getattr(self, name))
        if self.min_interval_s <= 0.0:
            raise ParameterError(
                f"min_interval_s must be > 0, got {self.min_interval_s}")
        if self.mu_interval_s < self.min_interval_s:
            raise ParameterError(
                f"mu_interval_s ({self.mu_interval_s}) must be >= "
                f"min_interval_s ({self.min_interval_s})")
        if self.sigma_interval_s < 0.0:
            raise ParameterError(
                f"sigma_interval_s must be >= 0, got {self.sigma_interval_s}")
        if not 0.0 <= self.mu_amp <= 1.0:
            raise ParameterError(f"mu_amp must be in [0, 1], got {self.mu_amp}")
        if self.sigma_amp < 0.0:
            raise ParameterError(f"sigma_amp must be >= 0, got {self.sigma_amp}")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    @property
    def interval_cv(self) -> float:
        """Normalized interval dispersion sigma_T / mu_T (irregularity)."""
        return self.sigma_interval_s / self.mu_interval_s


@dataclass(frozen=True)
class ActionMapping:
    """Per-modality endpoint parameter sets for the rub<->scratch continuum.

    Audio endpoints must differ in temporal irregularity (scratch more
    dispersed), tactile endpoints in amplitude (scratch stronger); those
    orderings are what make the two channels carry their respective cues.
    """

    rub_audio: ImpactSeriesParams
    scratch_audio: ImpactSeriesParams
    rub_tactile: ImpactSeriesParams
    scratch_tactile: ImpactSeriesParams

    def __post_init__(self) -> None:
        if self.scratch_audio.interval_cv <= self.rub_audio.interval_cv:
            raise ParameterError(
                "audio endpoints: scratch interval dispersion "
                f"({self.scratch_audio.interval_cv:.4g}) must exceed rub "
                f"({self.rub_audio.interval_cv:.4g})")
        if self.scratch_tactile.mu_amp <= self.rub_tactile.mu_amp:
            raise ParameterError(
                "tactile endpoints: scratch mu_amp "
                f"({self.scratch_tactile.mu_amp}) must exceed rub "
                f"({self.rub_tactile.mu_amp})")


@dataclass(frozen=True)
class ActionState:
    """Current continuous action: position on the rub<->scratch axis plus
    normalized pointer speed. alpha is clamped on construction."""

    alpha: float = 0.0
    velocity_norm: float = 0.0

    def __post_init__(self) -> None:
        a = _require_finite("alpha", self.alpha)
        v = _require_finite("velocity_norm", self.velocity_norm)
        if v < 0.0:
            raise ParameterError(f"velocity_norm must be >= 0, got {v}")
        object.__setattr__(self, "alpha", min(1.0, max(0.0, a)))
        object.__setattr__(self, "velocity_norm", v)


def default_mapping() -> ActionMapping:
    """Shipped default endpoints.

    Audio: rub is a dense near-periodic train, scratch a sparse irregular
    one; amplitudes rise with sparsity so channel power stays roughly
    level across the morph (rate * mean-square amplitude balanced).
    Tactile: temporal statistics are held fixed and only the amplitude
    statistics move, weak for rub, strong for scratch.

    These are design defaults chosen for clear endpoint contrast, not
    measured values.
    """
    return ActionMapping(
        rub_audio=ImpactSeriesParams(
            mu_interval_s=0.004, sigma_interval_s=0.0004,
            mu_amp=0.25, sigma_amp=0.05),
        scratch_audio=ImpactSeriesParams(
            mu_interval_s=0.036, sigma_interval_s=0.018,
            mu_amp=0.75, sigma_amp=0.15),
        rub_tactile=ImpactSeriesParams(
            mu_interval_s=0.020, sigma_interval_s=0.004,
            mu_amp=0.15, sigma_amp=0.03),
        scratch_tactile=ImpactSeriesParams(
            mu_interval_s=0.020, sigma_interval_s=0.004,
            mu_amp=0.85, sigma_amp=0.20),
    )


def clamp_alpha(alpha: float) -> tuple[float, bool]:
    """Clamp an action coordinate to [0, 1]; flags whether clamping occurred."""
    a = _require_finite("alpha", alpha)
    clamped = min(1.0, max(0.0, a))
    return clamped, clamped != a


def _lerp(a: float, b: float, t: float) -> float:
    return a + (b - a) * t


def _geometric(a: float, b: float, t: float, floor: float = SIGMA_LOG_FLOOR) -> float:
    a = max(a, floor)
    b = max(b, floor)
    return math.exp((1.0 - t) * math.log(a) + t * math.log(b))


def _interpolate_params(p0: ImpactSeriesParams, p1: ImpactSeriesParams,
                        alpha: float) -> ImpactSeriesParams:
    a, _ = clamp_alpha(alpha)
    # Endpoints are returned field-exact, bypassing the log floor.
    if a == 0.0:
        return p0
    if a == 1.0:
        return p1
    return ImpactSeriesParams(
        mu_interval_s=_geometric(p0.mu_interval_s, p1.mu_interval_s, a),
        sigma_interval_s=_geometric(p0.sigma_interval_s, p1.sigma_interval_s, a),
        mu_amp=_lerp(p0.mu_amp, p1.mu_amp, a),
        sigma_amp=_lerp(p0.sigma_amp, p1.sigma_amp, a),
        # The tighter endpoint floor keeps mu >= min along the whole path.
        min_interval_s=min(p0.min_interval_s, p1.min_interval_s),
        seed=p0.seed,
    )


def action_to_audio_params(alpha: float, mapping: ActionMapping) -> ImpactSeriesParams:
    """Audio-channel parameters for an action coordinate.

    Interval statistics interpolate log-linearly (time constants are
    ratio-like), amplitude statistics linearly. alpha outside [0, 1] is
    clamped; use clamp_alpha() first if the saturation matters.
    """
    return _interpolate_params(mapping.rub_audio, mapping.scratch_audio, alpha)


def action_to_tactile_params(alpha: float, mapping: ActionMapping) -> ImpactSeriesParams:
    """Tactile-channel parameters for an action coordinate; same
    interpolation law as the audio mapping."""
    return _interpolate_params(mapping.rub_tactile, mapping.scratch_tactile, alpha)


def scale_rate_by_velocity(params: ImpactSeriesParams, velocity_norm: float,
                           v_floor: float = VELOCITY_FLOOR) -> ImpactSeriesParams:
    """Scale event density with pointer speed.

    Faster motion meets more surface asperities per second, so both
    interval statistics divide by the speed: density changes, the
    rub/scratch character (sigma/mu) does not. Speed is floored at
    v_floor to keep intervals bounded at rest; mu is floored at the
    generation minimum.
    """
    v = _require_finite("velocity_norm", velocity_norm)
    if v < 0.0:
        raise ParameterError(f"velocity_norm must be >= 0, got {v}")
    v = max(v, v_floor)
    mu = max(params.mu_interval_s / v, params.min_interval_s)
    sigma = params.sigma_interval_s / v
    return replace(params, mu_interval_s=mu, sigma_interval_s=sigma)


class _CompensatedClock:
    """Neumaier-compensated running sum of intervals.

    Plain accumulation drifts by ~n ulps, enough to flip the strict
    t < duration cut at exact multiples; compensated prefix sums are
    correctly rounded, so the zero-variance train lands on exact grid
    times and the boundary event is excluded exactly.
    """

    __slots__ = ("_sum", "_comp")

    def __init__(self, start: float = 0.0) -> None:
        self._sum = start
        self._comp = 0.0

    def advance(self, dt: float) -> None:
        s = self._sum
        t = s + dt
        if abs(s) >= abs(dt):
            self._comp += (s - t) + dt
        else:
            self._comp += (dt - t) + s
        self._sum = t

    def reset(self, value: float) -> None:
        self._sum = value
        self._comp = 0.0

    @property
    def time(self) -> float:
        return self._sum + self._comp


def _draw_interval(rng: np.random.Generator, params: ImpactSeriesParams) -> float:
    # Rejection resampling; mu >= min guarantees acceptance probability >= 1/2.
    while True:
        dt = rng.normal(params.mu_interval_s, params.sigma_interval_s)
        if dt >= params.min_interval_s:
            return dt


def _draw_amplitude(rng: np.random.Generator, params: ImpactSeriesParams) -> float:
    a = rng.normal(params.mu_amp, params.sigma_amp)
    return min(1.0, max(0.0, a))


def generate_impact_sequence(params: ImpactSeriesParams, duration_s: float,
                             random_phase: bool = False) -> list[ImpactEvent]:
    """Generate one impact train as a renewal process.

    The first event sits at t = 0 (or at a uniform random phase offset in
    [0, mu_interval_s) when random_phase is set); each further event
    follows after a truncated-Gaussian interval. Amplitudes are i.i.d.
    clamped Gaussians. Generation stops at the first event whose time
    would reach duration_s. Fully determined by params.seed.
    """
    duration_s = _require_finite("duration_s", duration_s)
    if duration_s < 0.0:
        raise ParameterError(f"duration_s must be >= 0, got {duration_s}")

    rng = np.random.default_rng(params.seed)
    clock = _CompensatedClock(0.0)
    if random_phase:
        clock.reset(rng.uniform(0.0, params.mu_interval_s))

    events: list[ImpactEvent] = []
    while True:
        t = clock.time
        if t >= duration_s:
            break
        events.append(ImpactEvent(time_s=t, amplitude=_draw_amplitude(rng, params)))
        clock.advance(_draw_interval(rng, params))
    return events


def events_to_arrays(events: list[ImpactEvent]) -> tuple[np.ndarray, np.ndarray]:
    """Split an event list into (times, amplitudes) float arrays."""
    if not events:
        return np.empty(0), np.empty(0)
    times = np.fromiter((e.time_s for e in events), dtype=float, count=len(events))
    amps = np.fromiter((e.amplitude for e in events), dtype=float, count=len(events))
    return times, amps


@dataclass(frozen=True)
class SequenceStats:
    """Population statistics of an event list. Interval fields are None
    (absent, distinct from zero) when fewer than two events exist."""

    count: int
    interval_mean: float | None = None
    interval_std: float | None = None
    amp_mean: float | None = None
    amp_std: float | None = None

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "interval_mean": self.interval_mean,
            "interval_std": self.interval_std,
            "amp_mean": self.amp_mean,
            "amp_std": self.amp_std,
        }


def sequence_statistics(events: list[ImpactEvent]) -> SequenceStats:
    """Four-statistic summary of an event list (verification helper)."""
    times, amps = events_to_arrays(events)
    if len(events) >= 2 and np.any(np.diff(times) < 0.0):
        raise OrderingError("events must be sorted by time_s")
    if not events:
        return SequenceStats(count=0)
    amp_mean = float(np.mean(amps))
    amp_std = float(np.std(amps))
    if len(events) < 2:
        return SequenceStats(count=len(events), amp_mean=amp_mean, amp_std=amp_std)
    intervals = np.diff(times)
    return SequenceStats(
        count=len(events),
        interval_mean=float(np.mean(intervals)),
        interval_std=float(np.std(intervals)),
        amp_mean=amp_mean,
        amp_std=amp_std,
    )
