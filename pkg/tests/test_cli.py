import json

import pytest

from frictionsynth.cli import main
from frictionsynth.config import ConfigError
from frictionsynth.experiment import append_response, load_design, \
    load_manifest, read_responses_csv, run_session, ResponseRecord


TINY_DESIGN = {
    "name": "tiny-4",
    "modalities": ["audio", "tactile"],
    "duration_s": 0.25,
    "material": "wood",
    "factors": {
        "mu_interval_s": [0.005, 0.02],
        "sigma_interval_s": [0.002],
        "mu_amp": [0.5],
        "sigma_amp": [0.05],
    },
    "declared_count": 4,
}


@pytest.fixture()
def tiny_design(tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(TINY_DESIGN))
    return path


@pytest.fixture()
def tiny_grid(tmp_path, tiny_design):
    out = tmp_path / "grid"
    rc = main(["grid", "--design", str(tiny_design), "--out", str(out),
               "--seed", "5"])
    assert rc == 0
    return out


# ----- render ---------------------------------------------------------------


def test_render_alpha_zero_stats(tmp_path, capsys, mapping):
    out = tmp_path / "stim.wav"
    rc = main(["render", "--alpha", "0", "--duration", "2", "--seed", "1",
               "--out", str(out)])
    assert rc == 0
    assert out.exists()
    doc = json.loads(capsys.readouterr().out)
    stats = doc["audio"]["stats"]
    assert stats["count"] > 400
    cv = stats["interval_std"] / stats["interval_mean"]
    assert cv == pytest.approx(mapping.rub_audio.interval_cv, rel=0.10)


def test_render_zero_duration_rejected(tmp_path, capsys):
    rc = main(["render", "--alpha", "0", "--duration", "0",
               "--out", str(tmp_path / "x.wav")])
    assert rc == 2
    assert "duration must be > 0" in capsys.readouterr().err


def test_render_deterministic_files(tmp_path, capsys):
    a, b = tmp_path / "a.wav", tmp_path / "b.wav"
    args = ["render", "--alpha", "0.5", "--duration", "0.5", "--seed", "9"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_render_explicit_params(tmp_path, capsys):
    out = tmp_path / "explicit.wav"
    rc = main(["render", "--mu-interval", "0.01", "--sigma-interval", "0.002",
               "--mu-amp", "0.6", "--sigma-amp", "0.1",
               "--duration", "0.5", "--out", str(out), "--material", "none"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["audio"]["params"]["mu_interval_s"] == 0.01
    assert doc["material"] == "none"


def test_render_rejects_mixed_modes(tmp_path, capsys):
    rc = main(["render", "--alpha", "0.2", "--mu-interval", "0.01",
               "--duration", "1", "--out", str(tmp_path / "x.wav")])
    assert rc == 2


# ----- grid -----------------------------------------------------------------


def test_grid_tiny_design(tiny_grid):
    manifest = load_manifest(tiny_grid / "manifest.json")
    assert len(manifest["stimuli"]) == 4
    wavs = sorted(p.name for p in tiny_grid.glob("*.wav"))
    assert len(wavs) == 4
    for entry in manifest["stimuli"]:
        assert (tiny_grid / entry["file"]).exists()
        assert entry["modality"] in ("audio", "tactile")
        assert set(entry["factors"]) == {"mu_interval_s", "sigma_interval_s",
                                         "mu_amp", "sigma_amp"}


def test_grid_rerun_is_identical(tmp_path, tiny_design):
    out1, out2 = tmp_path / "g1", tmp_path / "g2"
    assert main(["grid", "--design", str(tiny_design), "--out", str(out1),
                 "--seed", "5"]) == 0
    assert main(["grid", "--design", str(tiny_design), "--out", str(out2),
                 "--seed", "5"]) == 0
    m1 = (out1 / "manifest.json").read_text()
    m2 = (out2 / "manifest.json").read_text()
    assert m1 == m2
    for entry in json.loads(m1)["stimuli"]:
        assert (out1 / entry["file"]).read_bytes() \
            == (out2 / entry["file"]).read_bytes()


def test_grid_different_seed_differs(tmp_path, tiny_design):
    out1, out2 = tmp_path / "g1", tmp_path / "g2"
    main(["grid", "--design", str(tiny_design), "--out", str(out1), "--seed", "5"])
    main(["grid", "--design", str(tiny_design), "--out", str(out2), "--seed", "6"])
    entry = json.loads((out1 / "manifest.json").read_text())["stimuli"][0]
    assert (out1 / entry["file"]).read_bytes() \
        != (out2 / entry["file"]).read_bytes()


def test_grid_declared_count_mismatch_warns(tmp_path, capsys):
    design = dict(TINY_DESIGN, declared_count=96)
    dpath = tmp_path / "wrong.json"
    dpath.write_text(json.dumps(design))
    assert main(["grid", "--design", str(dpath),
                 "--out", str(tmp_path / "g")]) == 0
    assert "declares 96" in capsys.readouterr().err


def test_design_missing_factor_rejected(tmp_path):
    bad = dict(TINY_DESIGN)
    bad["factors"] = {k: v for k, v in TINY_DESIGN["factors"].items()
                      if k != "mu_amp"}
    dpath = tmp_path / "bad.json"
    dpath.write_text(json.dumps(bad))
    with pytest.raises(ConfigError, match="mu_amp"):
        load_design(dpath)


# ----- experiment -------------------------------------------------------------


def scripted_responses(manifest, value=0.5):
    return {s["id"]: value for s in manifest["stimuli"]}


def test_experiment_scripted_session(tmp_path, tiny_grid, capsys):
    manifest = load_manifest(tiny_grid / "manifest.json")
    responses = tmp_path / "responses.json"
    responses.write_text(json.dumps(scripted_responses(manifest)))
    out_csv = tmp_path / "ratings.csv"
    rc = main(["experiment", "--manifest", str(tiny_grid / "manifest.json"),
               "--subject", "s01", "--out", str(out_csv),
               "--responses", str(responses)])
    assert rc == 0
    records = read_responses_csv(out_csv)
    assert len(records) == 4
    assert all(0.0 <= r.rating <= 1.0 for r in records)
    assert [r.presentation_index for r in records] == [0, 1, 2, 3]
    assert (tiny_grid / "manifest.json").exists()
    first_line = out_csv.read_text().splitlines()[0]
    assert first_line.startswith("#") and "gratter" in first_line


def test_experiment_resumes_remaining(tmp_path, tiny_grid):
    manifest = load_manifest(tiny_grid / "manifest.json")
    out_csv = tmp_path / "partial.csv"
    ids = [s["id"] for s in manifest["stimuli"]]

    # simulate an interrupted session: two rows already present
    from frictionsynth.experiment import presentation_order
    order = presentation_order(manifest, "s02")
    for i, sid in enumerate(order[:2]):
        append_response(out_csv,
                        ResponseRecord("s02", sid, 0.25, i, "t0"),
                        new_file=(i == 0))

    presented = run_session(manifest, "s02", out_csv,
                            rate=lambda entry: 0.75)
    assert presented == 2
    records = read_responses_csv(out_csv)
    assert len(records) == 4
    assert {r.stimulus_id for r in records} == set(ids)
    assert [r.presentation_index for r in records] == [0, 1, 2, 3]
    # resumed rows follow the same seeded order
    assert [r.stimulus_id for r in records] == order


def test_manifest_with_duplicate_ids_rejected(tmp_path, tiny_grid):
    doc = json.loads((tiny_grid / "manifest.json").read_text())
    doc["stimuli"].append(doc["stimuli"][0])
    bad = tmp_path / "dup.json"
    bad.write_text(json.dumps(doc))
    with pytest.raises(ConfigError, match="duplicate"):
        load_manifest(bad)


def test_session_order_is_subject_stable(tiny_grid):
    manifest = load_manifest(tiny_grid / "manifest.json")
    from frictionsynth.experiment import presentation_order
    assert presentation_order(manifest, "alice") \
        == presentation_order(manifest, "alice")
    assert presentation_order(manifest, "alice") \
        != presentation_order(manifest, "bob")


# ----- analyze ----------------------------------------------------------------


def test_analyze_end_to_end(tmp_path, tiny_grid, capsys):
    manifest = load_manifest(tiny_grid / "manifest.json")
    out_csv = tmp_path / "ratings.csv"
    # plant a mu_interval effect: slow intervals read as scratch (0)
    for i, s in enumerate(manifest["stimuli"]):
        rating = 1.0 if s["factors"]["mu_interval_s"] < 0.01 else 0.0
        append_response(out_csv,
                        ResponseRecord("s1", s["id"], rating, i, "t"),
                        new_file=(i == 0))
    report_path = tmp_path / "report.json"
    rc = main(["analyze", "--csv", str(out_csv),
               "--manifest", str(tiny_grid / "manifest.json"),
               "--permutations", "200", "--json", str(report_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "dominant factor: mu_interval_s" in out
    report = json.loads(report_path.read_text())
    assert report["modalities"]["audio"]["dominant_factor"] == "mu_interval_s"


def test_analyze_empty_csv_errors(tmp_path, tiny_grid, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("# comment\nsubject_id,stimulus_id,rating,"
                     "presentation_index,timestamp\n")
    rc = main(["analyze", "--csv", str(empty),
               "--manifest", str(tiny_grid / "manifest.json")])
    assert rc == 2
    assert "no responses" in capsys.readouterr().err
