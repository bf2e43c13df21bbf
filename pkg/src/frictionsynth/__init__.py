"""frictionsynth: audio-tactile synthesis of continuous friction
interactions, from rubbing to scratching.

A shared stochastic impact-series model drives two channels: a
modal-filtered audio signal evoking an object, and a band-shaped drive
signal for a vibrotactile actuator. A continuous action coordinate
morphs between rub and scratch per modality, live (block engine with a
WebSocket control protocol) or offline (stimulus banks and response
analysis).
"""

from .impacts import (
    ActionMapping,
    ActionState,
    ImpactEvent,
    ImpactSeriesParams,
    OrderingError,
    ParameterError,
    SequenceStats,
    action_to_audio_params,
    action_to_tactile_params,
    default_mapping,
    generate_impact_sequence,
    scale_rate_by_velocity,
    sequence_statistics,
)
from .render import (
    ConfigError,
    MaterialPreset,
    Mode,
    ModalFilterBank,
    RenderConfig,
    SampleBuffer,
    TactileShaper,
    default_materials,
    modal_filter,
    render_impact_train,
    render_stimulus,
    soft_limit,
    tactile_shape,
)
from .control import (
    ControlFrame,
    InstalledParams,
    SmoothedState,
    VelocityEstimator,
    apply_control_at_block_boundary,
    estimate_velocity,
    smooth_param,
)
from .config import EngineConfig, default_config, load_config
from .engine import FrictionEngine, ImpactStream, render_session, run_live
from .wavio import read_wav, write_wav

__version__ = "0.1.0"
