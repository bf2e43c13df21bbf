"""Waveform rendering: impact trains, modal resonators, tactile shaping.

The chain per stimulus is
    events -> raised-cosine excitation train
           -> (audio)   modal resonator bank evoking an object/material
           -> (tactile) band-pass conditioning for a vibrotactile actuator
           -> soft limiter
Both chains are LTI up to the limiter and stream block-by-block with
state carried across blocks, so streamed and one-shot renders agree
sample-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, lfilter, sosfilt

from .impacts import ImpactEvent, ImpactSeriesParams, ParameterError, \
    generate_impact_sequence

__all__ = [
    "ConfigError",
    "Mode",
    "MaterialPreset",
    "RenderConfig",
    "SampleBuffer",
    "ModalFilterBank",
    "TactileShaper",
    "raised_cosine_kernel",
    "render_impact_train",
    "modal_filter",
    "tactile_shape",
    "soft_limit",
    "render_stimulus",
    "default_materials",
]

MAX_MODES = 64


class ConfigError(ValueError):
    """Invalid render or material configuration."""


@dataclass(frozen=True)
class Mode:
    freq_hz: float
    decay_s: float
    gain: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.freq_hz) and self.freq_hz > 0.0):
            raise ConfigError(f"mode freq_hz must be > 0, got {self.freq_hz}")
        if not (math.isfinite(self.decay_s) and self.decay_s > 0.0):
            raise ConfigError(f"mode decay_s must be > 0, got {self.decay_s}")
        if not math.isfinite(self.gain):
            raise ConfigError(f"mode gain must be finite, got {self.gain}")


@dataclass(frozen=True)
class MaterialPreset:
    """Resonator bank evoking an object/material: one {freq, decay, gain}
    triple per mode. Nyquist validity depends on the render sample rate,
    so it is checked by validate_for_rate(), not at construction."""

    name: str
    modes: tuple[Mode, ...]

    def __post_init__(self) -> None:
        if not self.name:
            raise ConfigError("material name must be non-empty")
        if not 1 <= len(self.modes) <= MAX_MODES:
            raise ConfigError(
                f"material {self.name!r}: mode count must be in "
                f"[1, {MAX_MODES}], got {len(self.modes)}")

    def validate_for_rate(self, sample_rate_hz: float) -> None:
        nyquist = sample_rate_hz / 2.0
        for i, m in enumerate(self.modes):
            if m.freq_hz >= nyquist:
                raise ConfigError(
                    f"material {self.name!r}: modes[{i}].freq_hz "
                    f"({m.freq_hz} Hz) is at or above Nyquist "
                    f"({nyquist} Hz at fs {sample_rate_hz})")


@dataclass(frozen=True)
class RenderConfig:
    sample_rate_hz: int = 44100
    block_size: int = 512
    tactile_f_lo_hz: float = 40.0
    tactile_f_hi_hz: float = 400.0
    kernel_width_s: float = 0.001
    limiter_ceiling: float = 0.98

    def __post_init__(self) -> None:
        fs = self.sample_rate_hz
        if fs <= 0:
            raise ConfigError(f"sample_rate_hz must be > 0, got {fs}")
        b = self.block_size
        if b < 64 or b > 4096 or (b & (b - 1)) != 0:
            raise ConfigError(
                f"block_size must be a power of two in [64, 4096], got {b}")
        if not 0.0 < self.tactile_f_lo_hz < self.tactile_f_hi_hz < fs / 2.0:
            raise ConfigError(
                "tactile_band must satisfy 0 < f_lo < f_hi < fs/2, got "
                f"[{self.tactile_f_lo_hz}, {self.tactile_f_hi_hz}] at fs {fs}")
        if self.kernel_width_samples < 2:
            raise ConfigError(
                f"kernel_width_s ({self.kernel_width_s}) must span >= 2 "
                f"samples at fs {fs}")
        if self.kernel_width_samples > b:
            raise ConfigError(
                f"kernel width ({self.kernel_width_samples} samples) must "
                f"not exceed block_size ({b})")
        if not 0.0 < self.limiter_ceiling <= 1.0:
            raise ConfigError(
                f"limiter_ceiling must be in (0, 1], got {self.limiter_ceiling}")

    @property
    def kernel_width_samples(self) -> int:
        return int(round(self.kernel_width_s * self.sample_rate_hz))

    @property
    def block_duration_s(self) -> float:
        return self.block_size / self.sample_rate_hz


@dataclass
class SampleBuffer:
    """A rendered channel: finite samples plus the role they play."""

    samples: np.ndarray
    channel_role: str  # "audio" | "tactile" | "excitation"
    sample_rate_hz: int

    def __post_init__(self) -> None:
        if self.channel_role not in ("audio", "tactile", "excitation"):
            raise ParameterError(f"unknown channel_role {self.channel_role!r}")

    @property
    def peak(self) -> float:
        return float(np.max(np.abs(self.samples))) if len(self.samples) else 0.0

    @property
    def rms(self) -> float:
        return float(np.sqrt(np.mean(np.square(self.samples)))) \
            if len(self.samples) else 0.0


def raised_cosine_kernel(width_samples: int) -> np.ndarray:
    """Unit-peak raised-cosine pulse of the given width.

    Uses the interior samples of a Hann lobe (no wasted zero endpoints)
    rescaled so the peak sample is exactly 1.0.
    """
    if width_samples < 2:
        raise ParameterError(f"kernel width must be >= 2 samples, got {width_samples}")
    n = np.arange(width_samples)
    w = 0.5 * (1.0 - np.cos(2.0 * np.pi * (n + 1) / (width_samples + 1)))
    return w / w.max()


def add_impacts(out: np.ndarray, events: list[ImpactEvent], kernel: np.ndarray,
                sample_rate_hz: float, start_sample: int = 0) -> None:
    """Accumulate one pulse per event into `out` (in place).

    Pulse k starts at round(time_s * fs) - start_sample and peaks
    kernel-width/2 later; pulses crossing the end of `out` are truncated.
    Overlapping pulses sum.
    """
    w = len(kernel)
    n = len(out)
    for ev in events:
        s = int(round(ev.time_s * sample_rate_hz)) - start_sample
        if s >= n or s + w <= 0:
            continue
        lo = max(s, 0)
        hi = min(s + w, n)
        out[lo:hi] += ev.amplitude * kernel[lo - s:hi - s]


def render_impact_train(events: list[ImpactEvent], duration_s: float,
                        config: RenderConfig,
                        kernel_width_s: float | None = None) -> SampleBuffer:
    """Render events to a raised-cosine excitation train of duration_s."""
    fs = config.sample_rate_hz
    width = kernel_width_s if kernel_width_s is not None else config.kernel_width_s
    w = int(round(width * fs))
    kernel = raised_cosine_kernel(w)
    out = np.zeros(int(round(duration_s * fs)))
    add_impacts(out, events, kernel, fs)
    return SampleBuffer(out, "excitation", fs)


def _mode_coefficients(mode: Mode, fs: float) -> tuple[np.ndarray, np.ndarray]:
    # Two-pole resonator with unit-impulse response
    #   h[n] = gain * r**n * sin(n*theta) / sin(theta),
    # r = exp(-1/(decay*fs)), theta = 2*pi*freq/fs.
    r = math.exp(-1.0 / (mode.decay_s * fs))
    theta = 2.0 * math.pi * mode.freq_hz / fs
    b = np.array([0.0, mode.gain * r])
    a = np.array([1.0, -2.0 * r * math.cos(theta), r * r])
    return b, a


class ModalFilterBank:
    """Streaming sum of two-pole resonators with state carried across
    blocks; process() on consecutive blocks equals a one-shot run
    sample-exactly."""

    def __init__(self, material: MaterialPreset, sample_rate_hz: float) -> None:
        material.validate_for_rate(sample_rate_hz)
        self.material = material
        self.sample_rate_hz = sample_rate_hz
        self._coeffs = [_mode_coefficients(m, sample_rate_hz) for m in material.modes]
        self._state = [np.zeros(2) for _ in material.modes]

    def reset(self) -> None:
        for z in self._state:
            z[:] = 0.0

    def process(self, x: np.ndarray) -> np.ndarray:
        y = np.zeros_like(x)
        for i, (b, a) in enumerate(self._coeffs):
            yi, self._state[i] = lfilter(b, a, x, zi=self._state[i])
            y += yi
        return y


def modal_filter(excitation: SampleBuffer, material: MaterialPreset,
                 config: RenderConfig) -> SampleBuffer:
    """One-shot modal filtering of an excitation buffer."""
    bank = ModalFilterBank(material, config.sample_rate_hz)
    return SampleBuffer(bank.process(excitation.samples), "audio",
                        excitation.sample_rate_hz)


class TactileShaper:
    """Streaming 4th-order Butterworth band-pass that turns the excitation
    train into an actuator drive signal: DC and audio-band content are
    rejected, the vibrotactile band passes at unit gain."""

    def __init__(self, config: RenderConfig) -> None:
        self._sos = butter(2, [config.tactile_f_lo_hz, config.tactile_f_hi_hz],
                           btype="bandpass", fs=config.sample_rate_hz,
                           output="sos")
        self._zi = np.zeros((self._sos.shape[0], 2))

    def reset(self) -> None:
        self._zi[:] = 0.0

    def process(self, x: np.ndarray) -> np.ndarray:
        y, self._zi = sosfilt(self._sos, x, zi=self._zi)
        return y


def tactile_shape(excitation: SampleBuffer, config: RenderConfig) -> SampleBuffer:
    """One-shot tactile band shaping of an excitation buffer."""
    shaper = TactileShaper(config)
    return SampleBuffer(shaper.process(excitation.samples), "tactile",
                        excitation.sample_rate_hz)


def limit_samples(x: np.ndarray, ceiling: float) -> np.ndarray:
    """Odd monotone saturator: identity up to ceiling/2, tanh knee above,
    asymptote at the ceiling."""
    if not 0.0 < ceiling <= 1.0:
        raise ParameterError(f"ceiling must be in (0, 1], got {ceiling}")
    knee = 0.5 * ceiling
    span = ceiling - knee
    ax = np.abs(x)
    soft = knee + span * np.tanh((ax - knee) / span)
    return np.where(ax <= knee, x, np.sign(x) * soft)


def soft_limit(buffer: SampleBuffer, ceiling: float) -> SampleBuffer:
    return SampleBuffer(limit_samples(buffer.samples, ceiling),
                        buffer.channel_role, buffer.sample_rate_hz)


def render_stimulus(audio_params: ImpactSeriesParams,
                    tactile_params: ImpactSeriesParams,
                    material: MaterialPreset | None,
                    duration_s: float,
                    config: RenderConfig) -> tuple[SampleBuffer, SampleBuffer]:
    """Render the two-channel stimulus for one parameter pair.

    Channel 0 (audio): impact train -> modal bank (skipped when material
    is None) -> limiter. Channel 1 (tactile): impact train -> band
    shaping -> limiter. The two trains are generated independently from
    their own seeds; everything is deterministic given the params.
    """
    audio_events = generate_impact_sequence(audio_params, duration_s)
    tactile_events = generate_impact_sequence(tactile_params, duration_s)

    audio_exc = render_impact_train(audio_events, duration_s, config)
    if material is not None:
        audio = modal_filter(audio_exc, material, config)
    else:
        audio = SampleBuffer(audio_exc.samples, "audio", config.sample_rate_hz)
    audio = soft_limit(audio, config.limiter_ceiling)

    tactile_exc = render_impact_train(tactile_events, duration_s, config)
    tactile = soft_limit(tactile_shape(tactile_exc, config), config.limiter_ceiling)
    return audio, tactile


def default_materials() -> list[MaterialPreset]:
    """Placeholder mode tables with plausible spectra and decays for three
    familiar objects; not calibrated against measurements. Gains are tiny
    because resonant buildup under a dense impact train goes as
    1/sin(theta) per mode times the overlap of ring-downs; they are scaled
    so a full-scratch train peaks around 0.65 before the limiter."""
    return [
        MaterialPreset("wood", (
            Mode(197.0, 0.30, 2.2e-4),
            Mode(422.0, 0.24, 1.6e-4),
            Mode(831.0, 0.18, 1.2e-4),
            Mode(1467.0, 0.12, 8.9e-5),
            Mode(2250.0, 0.09, 6.7e-5),
            Mode(3180.0, 0.06, 5.0e-5),
            Mode(4420.0, 0.045, 3.3e-5),
            Mode(6030.0, 0.03, 2.2e-5),
        )),
        MaterialPreset("metal", (
            Mode(312.0, 2.8, 1.9e-4),
            Mode(788.0, 2.4, 1.5e-4),
            Mode(1417.0, 2.0, 1.2e-4),
            Mode(2306.0, 1.6, 9.6e-5),
            Mode(3361.0, 1.2, 7.7e-5),
            Mode(4570.0, 0.9, 5.8e-5),
            Mode(5920.0, 0.7, 4.2e-5),
            Mode(7410.0, 0.5, 2.9e-5),
        )),
        MaterialPreset("glass", (
            Mode(641.0, 1.1, 6.7e-4),
            Mode(1507.0, 0.9, 4.7e-4),
            Mode(2651.0, 0.7, 3.4e-4),
            Mode(4058.0, 0.55, 2.6e-4),
            Mode(5712.0, 0.42, 1.8e-4),
            Mode(7601.0, 0.32, 1.2e-4),
            Mode(9712.0, 0.24, 7.8e-5),
            Mode(12030.0, 0.18, 5.5e-5),
        )),
    ]
