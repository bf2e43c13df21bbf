"""Engine configuration: JSON loading with field-precise validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from .control import DEFAULT_STALENESS_S, DEFAULT_V_REF, DEFAULT_VELOCITY_TAU_S
from .impacts import ActionMapping, ImpactSeriesParams, ParameterError, VELOCITY_FLOOR
from .render import ConfigError, MaterialPreset, Mode, RenderConfig

__all__ = ["ControlSettings", "EngineConfig", "load_config", "default_config",
           "default_config_path", "ConfigError"]


@dataclass(frozen=True)
class ControlSettings:
    v_ref: float = DEFAULT_V_REF
    velocity_time_constant_s: float = DEFAULT_VELOCITY_TAU_S
    staleness_s: float = DEFAULT_STALENESS_S
    v_floor: float = VELOCITY_FLOOR
    default_material: str = ""
    # When set, pointer-driven velocity is ignored and the gate stays
    # open at this speed (used by the offline experiment harness).
    fixed_velocity: Optional[float] = None


@dataclass(frozen=True)
class EngineConfig:
    render: RenderConfig
    mapping: ActionMapping
    materials: tuple[MaterialPreset, ...]
    protocol_port: int = 8765
    output_device: Optional[str] = None
    output_file: Optional[str] = None
    master_seed: int = 0
    control: ControlSettings = field(default_factory=ControlSettings)

    def __post_init__(self) -> None:
        names = [m.name for m in self.materials]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise ConfigError(f"duplicate material names: {sorted(dupes)}")
        if (self.output_device is None) == (self.output_file is None):
            raise ConfigError(
                "exactly one output sink required: set output.device or output.file")
        for m in self.materials:
            m.validate_for_rate(self.render.sample_rate_hz)
        if self.control.default_material and \
                self.control.default_material not in names:
            raise ConfigError(
                f"control.default_material {self.control.default_material!r} "
                f"is not in materials {names}")
        if not 0 < self.protocol_port < 65536:
            raise ConfigError(f"protocol_port must be a TCP port, got "
                              f"{self.protocol_port}")

    def material(self, name: str) -> MaterialPreset:
        for m in self.materials:
            if m.name == name:
                return m
        raise ConfigError(f"unknown material {name!r}; have "
                          f"{[m.name for m in self.materials]}")

    @property
    def default_material_name(self) -> str:
        return self.control.default_material or self.materials[0].name


def _expect(obj: dict, key: str, ctx: str) -> Any:
    if key not in obj:
        raise ConfigError(f"{ctx}: missing required field {key!r}")
    return obj[key]


def _params_from_json(obj: dict, ctx: str) -> ImpactSeriesParams:
    try:
        return ImpactSeriesParams(
            mu_interval_s=_expect(obj, "mu_interval_s", ctx),
            sigma_interval_s=_expect(obj, "sigma_interval_s", ctx),
            mu_amp=_expect(obj, "mu_amp", ctx),
            sigma_amp=_expect(obj, "sigma_amp", ctx),
            min_interval_s=obj.get("min_interval_s", 0.001),
            seed=obj.get("seed", 0),
        )
    except ParameterError as e:
        raise ConfigError(f"{ctx}: {e}") from e


def _material_from_json(obj: dict, ctx: str) -> MaterialPreset:
    name = _expect(obj, "name", ctx)
    modes_json = _expect(obj, "modes", ctx)
    modes = []
    for i, m in enumerate(modes_json):
        mctx = f"{ctx}.modes[{i}]"
        try:
            modes.append(Mode(freq_hz=_expect(m, "freq_hz", mctx),
                              decay_s=_expect(m, "decay_s", mctx),
                              gain=_expect(m, "gain", mctx)))
        except ConfigError as e:
            raise ConfigError(f"{mctx}: {e}") from e
    try:
        return MaterialPreset(name=name, modes=tuple(modes))
    except ConfigError as e:
        raise ConfigError(f"{ctx}: {e}") from e


def config_from_json(doc: dict, source: str = "<config>") -> EngineConfig:
    """Build and validate an EngineConfig from a parsed JSON document.

    Every rejection, including structurally malformed documents, raises
    ConfigError; no other exception type escapes.
    """
    try:
        return _config_from_json(doc, source)
    except ConfigError:
        raise
    except (TypeError, KeyError, AttributeError, ValueError) as e:
        raise ConfigError(f"{source}: invalid config structure: {e!r}") from e


def _config_from_json(doc: dict, source: str) -> EngineConfig:
    render_json = doc.get("render", {})
    band = render_json.get("tactile_band", {})
    try:
        render = RenderConfig(
            sample_rate_hz=render_json.get("sample_rate_hz", 44100),
            block_size=render_json.get("block_size", 512),
            tactile_f_lo_hz=band.get("f_lo_hz", 40.0),
            tactile_f_hi_hz=band.get("f_hi_hz", 400.0),
            kernel_width_s=render_json.get("kernel_width_s", 0.001),
            limiter_ceiling=render_json.get("limiter_ceiling", 0.98),
        )
    except ConfigError as e:
        raise ConfigError(f"{source}: render: {e}") from e

    mapping_json = _expect(doc, "mapping", source)
    endpoints = {}
    for name in ("rub_audio", "scratch_audio", "rub_tactile", "scratch_tactile"):
        endpoints[name] = _params_from_json(
            _expect(mapping_json, name, f"{source}: mapping"),
            f"{source}: mapping.{name}")
    try:
        mapping = ActionMapping(**endpoints)
    except ParameterError as e:
        raise ConfigError(f"{source}: mapping: {e}") from e

    materials_json = _expect(doc, "materials", source)
    materials = tuple(
        _material_from_json(m, f"{source}: materials[{i}]")
        for i, m in enumerate(materials_json))

    output = doc.get("output", {})
    control_json = doc.get("control", {})
    control = ControlSettings(
        v_ref=control_json.get("v_ref", DEFAULT_V_REF),
        velocity_time_constant_s=control_json.get(
            "velocity_time_constant_s", DEFAULT_VELOCITY_TAU_S),
        staleness_s=control_json.get("staleness_s", DEFAULT_STALENESS_S),
        v_floor=control_json.get("v_floor", VELOCITY_FLOOR),
        default_material=control_json.get("default_material", ""),
        fixed_velocity=control_json.get("fixed_velocity"),
    )

    try:
        return EngineConfig(
            render=render,
            mapping=mapping,
            materials=materials,
            protocol_port=doc.get("protocol_port", 8765),
            output_device=output.get("device"),
            output_file=output.get("file"),
            master_seed=doc.get("master_seed", 0),
            control=control,
        )
    except ConfigError as e:
        raise ConfigError(f"{source}: {e}") from e


def load_config(path: str | Path) -> EngineConfig:
    """Load and validate an engine configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"{path}: JSON parse error at line {e.lineno}, column {e.colno}: "
            f"{e.msg}") from e
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return config_from_json(doc, source=str(path))


def default_config_path() -> Path:
    """Path of the shipped default configuration."""
    return Path(str(resources.files("frictionsynth").joinpath(
        "data/default_config.json")))


def default_config() -> EngineConfig:
    return load_config(default_config_path())
