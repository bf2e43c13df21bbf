"""Pointer-frame processing: velocity estimation, parameter slewing, and
block-boundary application of control state to the generator parameters.

The control producer (protocol handler) and the render consumer run
concurrently; the producer publishes complete SmoothedState snapshots,
the consumer reads at most one per block. Everything here is pure or
owns its own state, so the render path never blocks on the producer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .impacts import (
    ActionMapping,
    ImpactSeriesParams,
    ParameterError,
    VELOCITY_FLOOR,
    action_to_audio_params,
    action_to_tactile_params,
    clamp_alpha,
    scale_rate_by_velocity,
)

__all__ = [
    "ControlFrame",
    "SmoothedState",
    "InstalledParams",
    "VelocityEstimator",
    "estimate_velocity",
    "smooth_param",
    "apply_control_at_block_boundary",
    "DEFAULT_V_REF",
    "DEFAULT_VELOCITY_TAU_S",
    "DEFAULT_STALENESS_S",
]

DEFAULT_V_REF = 0.5           # surface-widths per second at velocity_norm = 1
DEFAULT_VELOCITY_TAU_S = 0.03
DEFAULT_STALENESS_S = 0.1


@dataclass(frozen=True)
class ControlFrame:
    """One pointer sample from the exploration surface; coordinates are
    clamped to the unit square on construction."""

    t_s: float
    x: float
    y: float
    pressure: Optional[float] = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.t_s):
            raise ParameterError(f"t_s must be finite, got {self.t_s}")
        object.__setattr__(self, "x", min(1.0, max(0.0, float(self.x))))
        object.__setattr__(self, "y", min(1.0, max(0.0, float(self.y))))
        if self.pressure is not None:
            object.__setattr__(
                self, "pressure", min(1.0, max(0.0, float(self.pressure))))


@dataclass(frozen=True)
class SmoothedState:
    """Snapshot published by the control producer once per update."""

    velocity_norm: float = 0.0
    alpha: float = 0.0
    material_id: str = ""
    gate: str = "silent"  # "open" | "silent"


@dataclass(frozen=True)
class InstalledParams:
    """Generator parameters installed for one render block; constant for
    the whole block by contract."""

    audio: ImpactSeriesParams
    tactile: ImpactSeriesParams
    gate: str = "silent"
    material_id: str = ""
    alpha: float = 0.0
    velocity_norm: float = 0.0


class VelocityEstimator:
    """EMA of finite-difference pointer speeds, normalized by a reference
    speed. Non-monotonic frames are dropped and counted; a stale stream
    (no frame within staleness_s of `now`) reads as zero."""

    def __init__(self, time_constant_s: float = DEFAULT_VELOCITY_TAU_S,
                 v_ref: float = DEFAULT_V_REF,
                 staleness_s: float = DEFAULT_STALENESS_S) -> None:
        if time_constant_s <= 0.0 or v_ref <= 0.0 or staleness_s <= 0.0:
            raise ParameterError("time_constant_s, v_ref, staleness_s must be > 0")
        self.time_constant_s = time_constant_s
        self.v_ref = v_ref
        self.staleness_s = staleness_s
        self.dropped_frames = 0
        self._last: Optional[ControlFrame] = None
        self._ema = 0.0
        self._n_speeds = 0

    def reset(self) -> None:
        self._last = None
        self._ema = 0.0
        self._n_speeds = 0

    def push(self, frame: ControlFrame) -> None:
        last = self._last
        if last is not None and frame.t_s <= last.t_s:
            self.dropped_frames += 1
            return
        if last is not None:
            dt = frame.t_s - last.t_s
            speed = math.hypot(frame.x - last.x, frame.y - last.y) / dt
            self._ema = smooth_param(self._ema, speed / self.v_ref,
                                     self.time_constant_s, dt)
            self._n_speeds += 1
        self._last = frame

    def value(self, now_s: Optional[float] = None) -> float:
        if self._n_speeds < 1:
            return 0.0
        if now_s is not None and self._last is not None \
                and now_s - self._last.t_s > self.staleness_s:
            return 0.0
        return self._ema

    @property
    def last_frame(self) -> Optional[ControlFrame]:
        return self._last


def estimate_velocity(frames: Iterable[ControlFrame],
                      time_constant_s: float = DEFAULT_VELOCITY_TAU_S,
                      v_ref: float = DEFAULT_V_REF,
                      now_s: Optional[float] = None,
                      staleness_s: float = DEFAULT_STALENESS_S) -> float:
    """Velocity estimate over a window of frames (convenience wrapper
    around VelocityEstimator). Zero for fewer than two usable frames or a
    stale newest frame."""
    est = VelocityEstimator(time_constant_s, v_ref, staleness_s)
    for f in frames:
        est.push(f)
    return est.value(now_s)


def smooth_param(current: float, target: float, time_constant_s: float,
                 dt_s: float) -> float:
    """One-pole slew toward target; never overshoots.

    Written as decay-toward-target rather than step-from-current: the
    latter can overshoot by an ulp when the step weight rounds to 1.
    """
    if time_constant_s <= 0.0 or dt_s <= 0.0:
        raise ParameterError("time_constant_s and dt_s must be > 0")
    return target + (current - target) * math.exp(-dt_s / time_constant_s)


def apply_control_at_block_boundary(
        pending: Optional[SmoothedState],
        installed: InstalledParams,
        mapping: ActionMapping,
        v_floor: float = VELOCITY_FLOOR) -> InstalledParams:
    """Compose the action mapping with velocity scaling and install the
    result for the next block. Called exactly once per block, before
    rendering it; with no pending snapshot the installed parameters are
    returned unchanged. A snapshot below the velocity floor (which
    includes a stale control stream, read as velocity 0) gates to silence.
    """
    if pending is None:
        return installed
    alpha, _ = clamp_alpha(pending.alpha)
    audio = scale_rate_by_velocity(
        action_to_audio_params(alpha, mapping), pending.velocity_norm, v_floor)
    tactile = scale_rate_by_velocity(
        action_to_tactile_params(alpha, mapping), pending.velocity_norm, v_floor)
    gate = "silent" if (pending.gate == "silent"
                        or pending.velocity_norm < v_floor) else "open"
    return InstalledParams(
        audio=audio,
        tactile=tactile,
        gate=gate,
        material_id=pending.material_id or installed.material_id,
        alpha=alpha,
        velocity_norm=pending.velocity_norm,
    )
