import dataclasses
import json
import threading

import numpy as np
import pytest

from frictionsynth.config import ConfigError, config_from_json, \
    default_config_path, load_config
from frictionsynth.engine import FrictionEngine, ImpactStream, NullSink, \
    WavFileSink, load_trace, render_session, run_live, save_trace
from frictionsynth.impacts import ImpactSeriesParams, generate_impact_sequence
from frictionsynth.wavio import read_wav, write_wav


def fixed_velocity_config(cfg, velocity=1.0, **render_overrides):
    control = dataclasses.replace(cfg.control, fixed_velocity=velocity)
    render = dataclasses.replace(cfg.render, **render_overrides) \
        if render_overrides else cfg.render
    return dataclasses.replace(cfg, control=control, render=render)


# ----- impact stream -----------------------------------------------------------


def test_stream_matches_one_shot_generator():
    p = ImpactSeriesParams(0.01, 0.003, 0.5, 0.1, seed=42)
    stream = ImpactStream(p, 42)
    assert stream.events_until(2.0) == generate_impact_sequence(p, 2.0)


def test_stream_block_size_invariance():
    p = ImpactSeriesParams(0.01, 0.003, 0.5, 0.1, seed=7)
    one = ImpactStream(p, 7).events_until(2.0)
    chunked = ImpactStream(p, 7)
    got = []
    t = 0.0
    for step in (0.0116, 0.0232, 0.0058, 0.1, 0.5):
        while t < 2.0:
            t = min(t + step, 2.0)
            got.extend(chunked.events_until(t))
    assert got == one


def test_stream_param_change_between_blocks():
    p_fast = ImpactSeriesParams(0.005, 0.0, 0.5, 0.0, seed=1)
    p_slow = ImpactSeriesParams(0.05, 0.0, 0.5, 0.0, seed=1)
    stream = ImpactStream(p_fast, 1)
    first = stream.events_until(0.1)
    stream.set_params(p_slow)
    second = stream.events_until(0.5)
    fast_gaps = np.diff([e.time_s for e in first])
    slow_gaps = np.diff([e.time_s for e in second[1:]])
    assert np.allclose(fast_gaps, 0.005)
    assert np.allclose(slow_gaps, 0.05)


def test_stream_skip_to_reanchors():
    p = ImpactSeriesParams(0.01, 0.0, 0.5, 0.0, seed=3)
    stream = ImpactStream(p, 3)
    stream.events_until(0.05)
    stream.skip_to(1.0)
    nxt = stream.events_until(1.02)
    assert nxt[0].time_s == 1.0


# ----- engine rendering ----------------------------------------------------------


def test_render_session_deterministic(cfg):
    fv = fixed_velocity_config(cfg)
    a = render_session(fv, 0.5, seed=11)
    b = render_session(fv, 0.5, seed=11)
    assert np.array_equal(a, b)
    c = render_session(fv, 0.5, seed=12)
    assert not np.array_equal(a, c)


def test_render_session_block_size_invariant(cfg):
    # Same seeds, different block sizes: identical samples.
    out512 = render_session(fixed_velocity_config(cfg, block_size=512), 0.7, seed=5)
    out256 = render_session(fixed_velocity_config(cfg, block_size=256), 0.7, seed=5)
    out1024 = render_session(fixed_velocity_config(cfg, block_size=1024), 0.7, seed=5)
    assert np.array_equal(out512, out256)
    assert np.array_equal(out512, out1024)


def test_render_session_without_control_is_silent(cfg):
    out = render_session(cfg, 0.3, seed=1)
    assert np.all(out == 0.0)


def test_engine_gate_opens_on_pointer_and_times_out(cfg):
    engine = FrictionEngine(cfg, seed=2)
    rc = cfg.render
    block_dur = rc.block_size / rc.sample_rate_hz

    # pointer frames fast enough to register speed near v_ref
    t = 0.0
    for i in range(10):
        engine.submit({"type": "pointer", "t_s": t, "x": (0.05 * i) % 1.0,
                       "y": 0.5})
        t += 0.008
    audio, tactile = engine.render_block()
    assert engine.installed.gate == "open"
    assert np.any(audio != 0.0)

    # no more frames: staleness must silence within timeout + one block
    blocks_to_silence = int(np.ceil(cfg.control.staleness_s / block_dur)) + 1
    for _ in range(blocks_to_silence):
        audio, tactile = engine.render_block()
    assert engine.installed.gate == "silent"
    assert np.all(audio == 0.0) and np.all(tactile == 0.0)


def test_set_alpha_applies_on_next_block(cfg):
    engine = FrictionEngine(fixed_velocity_config(cfg), seed=2)
    engine.render_block()
    reply = engine.submit({"type": "set_alpha", "alpha": 0.8})
    assert reply["type"] == "ack" and reply["alpha"] == 0.8
    assert engine.installed.alpha == 0.0  # unchanged until next boundary
    engine.render_block()
    assert engine.installed.alpha == 0.8


def test_alpha_clamp_reports_saturation(cfg):
    engine = FrictionEngine(cfg)
    reply = engine.submit({"type": "set_alpha", "alpha": 1.7})
    assert reply["alpha"] == 1.0 and reply["saturated"] is True


def test_set_material_switches_bank(cfg):
    engine = FrictionEngine(fixed_velocity_config(cfg), seed=3)
    assert engine.submit({"type": "set_material", "name": "metal"})["type"] == "ack"
    assert engine.submit({"type": "set_material", "name": "granite"})["type"] == "error"
    engine.render_block()
    assert engine.installed.material_id == "metal"


def test_modality_flags_mute_channels(cfg):
    engine = FrictionEngine(fixed_velocity_config(cfg), seed=4)
    engine.submit({"type": "set_modality", "audio_on": False, "tactile_on": True})
    audio, tactile = engine.render_block()
    assert np.all(audio == 0.0)
    assert np.any(tactile != 0.0)


def test_unknown_message_rejected(cfg):
    engine = FrictionEngine(cfg)
    reply = engine.submit({"type": "bogus"})
    assert reply["type"] == "error"
    assert "bogus" in reply["reason"]


def test_diagnostics_fields(cfg):
    engine = FrictionEngine(fixed_velocity_config(cfg), seed=5)
    engine.render_block()
    d = engine.submit({"type": "diagnostics"})
    for key in ("alpha", "velocity_norm", "underruns", "peak_audio",
                "peak_tactile", "gate", "material", "block_index"):
        assert key in d
    assert d["block_index"] == 1
    assert d["gate"] == "open"


def test_live_trace_replays_bit_identically(cfg, tmp_path):
    fv = fixed_velocity_config(cfg)
    engine = FrictionEngine(fv, seed=99)
    captured = []

    msgs = {
        3: [{"type": "set_alpha", "alpha": 0.9}],
        10: [{"type": "set_material", "name": "glass"},
             {"type": "set_alpha", "alpha": 0.2}],
        20: [{"type": "set_modality", "audio_on": True, "tactile_on": False}],
    }
    n_blocks = 40
    for k in range(n_blocks):
        for msg in msgs.get(k, []):
            engine.submit(msg)
        audio, tactile = engine.render_block()
        captured.append(np.column_stack((audio, tactile)))
    live = np.concatenate(captured)

    trace_path = tmp_path / "session.jsonl"
    save_trace(trace_path, engine.trace)
    trace = load_trace(trace_path)
    duration = n_blocks * fv.render.block_size / fv.render.sample_rate_hz
    replay = render_session(fv, duration, seed=99, trace=trace)
    assert np.array_equal(live, replay)


def test_run_live_paces_and_counts(cfg, tmp_path):
    fv = fixed_velocity_config(cfg)
    engine = FrictionEngine(fv, seed=1)
    sink = WavFileSink(tmp_path / "live.wav", fv.render.sample_rate_hz)
    stats = run_live(engine, sink, duration_s=0.3)
    assert stats.blocks == int(np.ceil(0.3 * fv.render.sample_rate_hz
                                       / fv.render.block_size))
    # paced loop should take roughly the rendered duration
    assert stats.elapsed_s >= 0.25
    samples, fs = read_wav(tmp_path / "live.wav")
    assert fs == fv.render.sample_rate_hz
    assert len(samples) == stats.blocks * fv.render.block_size


def test_run_live_stop_event(cfg):
    engine = FrictionEngine(cfg)
    stop = threading.Event()
    stop.set()
    stats = run_live(engine, NullSink(), duration_s=None, stop=stop)
    assert stats.blocks == 0


# ----- wav ----------------------------------------------------------------------


def test_wav_silence_byte_length(tmp_path):
    path = tmp_path / "silence.wav"
    write_wav(np.zeros((44100, 2)), 44100, path, bit_depth=16)
    # canonical RIFF header (44 bytes) + fs * 2 ch * 2 bytes
    assert path.stat().st_size == 44 + 44100 * 2 * 2


def test_wav_roundtrip_quantization_bound(tmp_path):
    rng = np.random.default_rng(0)
    x = np.clip(rng.normal(scale=0.3, size=(5000, 2)), -1.0, 1.0)
    for bits, step in ((16, 2.0**-15), (24, 2.0**-23)):
        path = tmp_path / f"rt{bits}.wav"
        write_wav(x, 44100, path, bit_depth=bits)
        y, fs = read_wav(path)
        assert fs == 44100
        assert y.shape == x.shape
        assert np.max(np.abs(y - x)) <= step


def test_wav_deterministic_bytes(tmp_path):
    x = np.sin(np.linspace(0.0, 20.0, 4410))[:, None] * [0.5, 0.25]
    p1, p2 = tmp_path / "a.wav", tmp_path / "b.wav"
    write_wav(x, 44100, p1)
    write_wav(x, 44100, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_wav_write_error_names_path(tmp_path):
    with pytest.raises(OSError, match="no/such/dir"):
        write_wav(np.zeros((10, 2)), 44100, tmp_path / "no/such/dir/x.wav")


# ----- config --------------------------------------------------------------------


def test_default_config_ships_three_materials(cfg):
    assert len(cfg.materials) >= 3
    assert {m.name for m in cfg.materials} >= {"wood", "metal", "glass"}
    assert cfg.protocol_port == 8765


def test_config_nyquist_error_names_field():
    doc = json.loads(default_config_path().read_text())
    doc["materials"][0]["modes"][0]["freq_hz"] = 30000.0
    with pytest.raises(ConfigError, match=r"30000.*Nyquist|Nyquist.*30000"):
        config_from_json(doc)


def test_config_duplicate_materials_rejected():
    doc = json.loads(default_config_path().read_text())
    doc["materials"].append(doc["materials"][0])
    with pytest.raises(ConfigError, match="duplicate"):
        config_from_json(doc)


def test_config_requires_exactly_one_sink():
    doc = json.loads(default_config_path().read_text())
    doc["output"] = {"file": "x.wav", "device": "default"}
    with pytest.raises(ConfigError, match="exactly one output sink"):
        config_from_json(doc)
    doc["output"] = {}
    with pytest.raises(ConfigError, match="exactly one output sink"):
        config_from_json(doc)


def test_config_missing_mapping_field_named():
    doc = json.loads(default_config_path().read_text())
    del doc["mapping"]["rub_audio"]
    with pytest.raises(ConfigError, match="rub_audio"):
        config_from_json(doc)


def test_config_parse_error_reports_line(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "render": {,}\n}\n')
    with pytest.raises(ConfigError, match="line 2"):
        load_config(bad)


def test_config_bad_mode_names_index():
    doc = json.loads(default_config_path().read_text())
    doc["materials"][1]["modes"][3]["decay_s"] = -1.0
    with pytest.raises(ConfigError, match=r"materials\[1\].modes\[3\]"):
        config_from_json(doc)
