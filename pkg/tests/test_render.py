import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frictionsynth.impacts import ImpactEvent, ImpactSeriesParams, \
    ParameterError, generate_impact_sequence
from frictionsynth.render import (
    ConfigError,
    MaterialPreset,
    ModalFilterBank,
    Mode,
    RenderConfig,
    SampleBuffer,
    TactileShaper,
    default_materials,
    limit_samples,
    modal_filter,
    raised_cosine_kernel,
    render_impact_train,
    render_stimulus,
    tactile_shape,
)

RC = RenderConfig()
FS = RC.sample_rate_hz


# ----- kernel / impact train -------------------------------------------------


def test_kernel_width_and_unit_peak():
    k = raised_cosine_kernel(44)
    assert len(k) == 44
    assert k.max() == 1.0
    assert np.all(k > 0.0)
    assert np.allclose(k, k[::-1])  # symmetric


def test_kernel_minimum_width():
    assert len(raised_cosine_kernel(2)) == 2
    with pytest.raises(ParameterError):
        raised_cosine_kernel(1)


def test_single_event_pulse():
    # 1 ms at 44.1 kHz -> 44-sample raised cosine, peak 1.0.
    buf = render_impact_train([ImpactEvent(0.0, 1.0)], 0.1, RC)
    assert buf.channel_role == "excitation"
    kernel = raised_cosine_kernel(44)
    assert np.array_equal(buf.samples[:44], kernel)
    assert np.all(buf.samples[44:] == 0.0)
    assert buf.peak == 1.0


def test_empty_events_render_silence():
    buf = render_impact_train([], 0.25, RC)
    assert len(buf.samples) == int(round(0.25 * FS))
    assert np.all(buf.samples == 0.0)


def test_coincident_events_sum():
    events = [ImpactEvent(0.01, 0.3), ImpactEvent(0.01, 0.4)]
    buf = render_impact_train(events, 0.1, RC)
    assert buf.peak == pytest.approx(0.7, rel=1e-12)


def test_pulse_truncated_at_buffer_end():
    buf = render_impact_train([ImpactEvent(0.0999, 1.0)], 0.1, RC)
    assert buf.peak > 0.0  # partially rendered, no error


def test_overlapping_pulses_superpose():
    a = [ImpactEvent(0.010, 0.5)]
    b = [ImpactEvent(0.0104, 0.4)]
    separate = render_impact_train(a, 0.1, RC).samples \
        + render_impact_train(b, 0.1, RC).samples
    together = render_impact_train(a + b, 0.1, RC).samples
    assert np.max(np.abs(separate - together)) < 1e-12


# ----- modal filtering ----------------------------------------------------------


def test_single_mode_matches_closed_form():
    mode = Mode(1000.0, 0.1, 1.0)
    material = MaterialPreset("one", (mode,))
    n = int(0.5 * FS)
    x = np.zeros(n)
    x[0] = 1.0
    y = ModalFilterBank(material, FS).process(x)

    r = math.exp(-1.0 / (mode.decay_s * FS))
    theta = 2.0 * math.pi * mode.freq_hz / FS
    k = np.arange(n)
    closed = mode.gain * r**k * np.sin(k * theta) / math.sin(theta)
    assert np.max(np.abs(y - closed)) < 1e-9


def test_modal_zero_input_zero_output():
    material = default_materials()[0]
    exc = SampleBuffer(np.zeros(4096), "excitation", FS)
    out = modal_filter(exc, material, RC)
    assert np.all(out.samples == 0.0)
    assert out.channel_role == "audio"


def test_modal_linearity_exact_scaling():
    material = default_materials()[0]
    rng = np.random.default_rng(0)
    x = rng.normal(size=8192)
    y1 = ModalFilterBank(material, FS).process(x)
    y2 = ModalFilterBank(material, FS).process(2.0 * x)
    assert np.array_equal(2.0 * y1, y2)  # powers of two scale exactly


def test_modal_streaming_equals_one_shot():
    material = default_materials()[1]
    rng = np.random.default_rng(1)
    x = rng.normal(size=8192)
    one = ModalFilterBank(material, FS).process(x)
    bank = ModalFilterBank(material, FS)
    for size in (64, 128, 256, 512, 1024, 2048, 4096):
        bank.reset()
        parts = [bank.process(x[i:i + size]) for i in range(0, len(x), size)]
        assert np.array_equal(np.concatenate(parts), one)


def test_mode_at_or_above_nyquist_rejected():
    material = MaterialPreset("hot", (Mode(30000.0, 0.1, 1.0),))
    with pytest.raises(ConfigError, match="Nyquist"):
        ModalFilterBank(material, 44100)
    ok_below = MaterialPreset("ok", (Mode(22049.0, 0.1, 1.0),))
    ModalFilterBank(ok_below, 44100)  # just below is allowed


def test_material_preset_validation():
    with pytest.raises(ConfigError):
        MaterialPreset("none", ())
    with pytest.raises(ConfigError):
        MaterialPreset("many", tuple(Mode(100.0 + i, 0.1, 1.0)
                                     for i in range(65)))
    with pytest.raises(ConfigError):
        Mode(100.0, 0.0, 1.0)
    with pytest.raises(ConfigError):
        Mode(0.0, 0.1, 1.0)


def test_energy_decays_for_all_default_materials():
    n = int(1.0 * FS)
    x = np.zeros(n)
    x[0] = 1.0
    for material in default_materials():
        y = ModalFilterBank(material, FS).process(x)
        tenth = n // 10
        head = np.sqrt(np.mean(y[:tenth] ** 2))
        tail = np.sqrt(np.mean(y[-tenth:] ** 2))
        assert tail < head, material.name


# ----- tactile shaping -----------------------------------------------------------


def test_tactile_band_center_unity_gain():
    # Steady sine at the band's geometric center passes within +/- 1 dB.
    f0 = math.sqrt(RC.tactile_f_lo_hz * RC.tactile_f_hi_hz)
    t = np.arange(int(2.0 * FS)) / FS
    x = np.sin(2.0 * np.pi * f0 * t)
    y = tactile_shape(SampleBuffer(x, "excitation", FS), RC).samples
    steady = slice(len(t) // 2, None)
    gain_db = 20.0 * np.log10(np.sqrt(np.mean(y[steady] ** 2))
                              / np.sqrt(np.mean(x[steady] ** 2)))
    assert abs(gain_db) <= 1.0


def test_tactile_rejects_dc():
    x = np.ones(int(2.0 * FS))
    y = tactile_shape(SampleBuffer(x, "excitation", FS), RC).samples
    steady = y[len(y) // 2:]
    atten_db = -20.0 * np.log10(max(np.sqrt(np.mean(steady ** 2)), 1e-300))
    assert atten_db >= 40.0


def test_tactile_zero_in_zero_out():
    y = tactile_shape(SampleBuffer(np.zeros(2048), "excitation", FS), RC)
    assert np.all(y.samples == 0.0)
    assert y.channel_role == "tactile"


def test_tactile_streaming_equals_one_shot():
    rng = np.random.default_rng(2)
    x = rng.normal(size=8192)
    one = TactileShaper(RC).process(x)
    shaper = TactileShaper(RC)
    parts = [shaper.process(x[i:i + 512]) for i in range(0, len(x), 512)]
    assert np.array_equal(np.concatenate(parts), one)


# ----- limiter ----------------------------------------------------------------


def test_limiter_fixed_points_and_bound():
    assert limit_samples(np.array([0.0]), 0.98)[0] == 0.0
    assert abs(limit_samples(np.array([10.0]), 0.98)[0]) <= 0.98
    assert abs(limit_samples(np.array([-10.0]), 0.98)[0]) <= 0.98


def test_limiter_monotone_on_grid():
    x = np.linspace(-2.0, 2.0, 1001)
    y = limit_samples(x, 0.98)
    assert np.all(np.diff(y) > 0.0)


def test_limiter_transparent_below_half_ceiling():
    ceiling = 0.98
    x = np.linspace(-0.5 * ceiling, 0.5 * ceiling, 101)
    y = limit_samples(x, ceiling)
    assert np.max(np.abs(y - x)) <= 0.01 * ceiling


def test_limiter_odd_symmetry():
    x = np.linspace(0.0, 3.0, 301)
    assert np.array_equal(limit_samples(-x, 0.9), -limit_samples(x, 0.9))


@settings(max_examples=50, deadline=None)
@given(st.floats(-1e6, 1e6), st.floats(0.05, 1.0))
def test_limiter_bound_property(value, ceiling):
    out = limit_samples(np.array([value]), ceiling)[0]
    assert abs(out) <= ceiling
    assert math.isfinite(out)


# ----- full stimulus ------------------------------------------------------------


def _stimulus_params(seed):
    return ImpactSeriesParams(0.01, 0.003, 0.5, 0.1, seed=seed)


def test_render_stimulus_deterministic():
    material = default_materials()[0]
    a1, t1 = render_stimulus(_stimulus_params(1), _stimulus_params(2),
                             material, 0.5, RC)
    a2, t2 = render_stimulus(_stimulus_params(1), _stimulus_params(2),
                             material, 0.5, RC)
    assert np.array_equal(a1.samples, a2.samples)
    assert np.array_equal(t1.samples, t2.samples)


def test_render_stimulus_material_none_bypasses_bank():
    audio, _ = render_stimulus(_stimulus_params(1), _stimulus_params(2),
                               None, 0.2, RC)
    exc = render_impact_train(
        generate_impact_sequence(_stimulus_params(1), 0.2), 0.2, RC)
    assert np.array_equal(audio.samples, limit_samples(exc.samples,
                                                       RC.limiter_ceiling))


def test_render_stimulus_outputs_bounded_and_finite():
    material = default_materials()[2]
    audio, tactile = render_stimulus(_stimulus_params(3), _stimulus_params(4),
                                     material, 1.0, RC)
    for buf in (audio, tactile):
        assert np.all(np.isfinite(buf.samples))
        assert buf.peak <= RC.limiter_ceiling
        assert len(buf.samples) == int(round(1.0 * FS))


@settings(max_examples=25, deadline=None)
@given(
    mu_t=st.floats(0.002, 0.05),
    rel_sigma=st.floats(0.0, 1.0),
    mu_a=st.floats(0.0, 1.0),
    sigma_a=st.floats(0.0, 1.0),
    seed=st.integers(0, 2**32 - 1),
    material_idx=st.integers(0, 3),
)
def test_no_nan_inf_fuzz(mu_t, rel_sigma, mu_a, sigma_a, seed, material_idx):
    p = ImpactSeriesParams(mu_t, rel_sigma * mu_t, mu_a, sigma_a, seed=seed)
    materials = [None] + default_materials()
    audio, tactile = render_stimulus(p, p, materials[material_idx], 0.25, RC)
    assert np.all(np.isfinite(audio.samples))
    assert np.all(np.isfinite(tactile.samples))
    assert audio.peak <= RC.limiter_ceiling
    assert tactile.peak <= RC.limiter_ceiling


# ----- config type ---------------------------------------------------------------


def test_render_config_validation():
    with pytest.raises(ConfigError):
        RenderConfig(block_size=100)  # not a power of two
    with pytest.raises(ConfigError):
        RenderConfig(block_size=32)
    with pytest.raises(ConfigError):
        RenderConfig(block_size=8192)
    with pytest.raises(ConfigError):
        RenderConfig(tactile_f_lo_hz=400.0, tactile_f_hi_hz=40.0)
    with pytest.raises(ConfigError):
        RenderConfig(tactile_f_hi_hz=30000.0)
    with pytest.raises(ConfigError):
        RenderConfig(kernel_width_s=0.00001)  # under 2 samples
    with pytest.raises(ConfigError):
        RenderConfig(kernel_width_s=0.1)  # wider than a block
    with pytest.raises(ConfigError):
        RenderConfig(limiter_ceiling=0.0)
    with pytest.raises(ParameterError):
        SampleBuffer(np.zeros(4), "weird", 44100)
