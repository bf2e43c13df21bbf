"""Offline command-line tools: render | grid | experiment | analyze."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, experiment
from .config import ConfigError, EngineConfig, default_config, load_config
from .impacts import ImpactSeriesParams, ParameterError, \
    action_to_audio_params, action_to_tactile_params, generate_impact_sequence, \
    sequence_statistics
from .render import render_stimulus
from .wavio import write_wav


def _load(config_path: str | None) -> EngineConfig:
    return load_config(config_path) if config_path else default_config()


def _params_json(p: ImpactSeriesParams) -> dict:
    return {
        "mu_interval_s": p.mu_interval_s,
        "sigma_interval_s": p.sigma_interval_s,
        "mu_amp": p.mu_amp,
        "sigma_amp": p.sigma_amp,
        "min_interval_s": p.min_interval_s,
        "seed": p.seed,
    }


# ----- render -------------------------------------------------------------


def cmd_render(args: argparse.Namespace) -> int:
    if args.duration <= 0.0:
        print("error: duration must be > 0", file=sys.stderr)
        return 2
    cfg = _load(args.config)

    explicit = [args.mu_interval, args.sigma_interval, args.mu_amp, args.sigma_amp]
    if args.alpha is not None and any(v is not None for v in explicit):
        print("error: use either --alpha or explicit statistics, not both",
              file=sys.stderr)
        return 2

    try:
        if args.alpha is not None:
            audio_params = action_to_audio_params(args.alpha, cfg.mapping)
            tactile_params = action_to_tactile_params(args.alpha, cfg.mapping)
        else:
            if any(v is None for v in explicit):
                print("error: need --alpha or all four of --mu-interval "
                      "--sigma-interval --mu-amp --sigma-amp", file=sys.stderr)
                return 2
            base = ImpactSeriesParams(
                mu_interval_s=args.mu_interval,
                sigma_interval_s=args.sigma_interval,
                mu_amp=args.mu_amp,
                sigma_amp=args.sigma_amp,
                min_interval_s=args.min_interval,
            )
            audio_params = tactile_params = base

        from dataclasses import replace
        audio_params = replace(
            audio_params, seed=experiment.derive_seed(args.seed, "render:audio"))
        tactile_params = replace(
            tactile_params, seed=experiment.derive_seed(args.seed, "render:tactile"))

        material = None
        material_name = args.material or cfg.default_material_name
        if material_name != "none":
            material = cfg.material(material_name)

        audio, tactile = render_stimulus(
            audio_params, tactile_params, material, args.duration, cfg.render)
    except (ParameterError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    import numpy as np
    write_wav(np.column_stack((audio.samples, tactile.samples)),
              cfg.render.sample_rate_hz, args.out, args.bit_depth)

    stats = {
        "out": str(args.out),
        "material": material_name,
        "duration_s": args.duration,
        "audio": {
            "params": _params_json(audio_params),
            "stats": sequence_statistics(
                generate_impact_sequence(audio_params, args.duration)).to_dict(),
        },
        "tactile": {
            "params": _params_json(tactile_params),
            "stats": sequence_statistics(
                generate_impact_sequence(tactile_params, args.duration)).to_dict(),
        },
    }
    print(json.dumps(stats, indent=2))
    return 0


# ----- grid ---------------------------------------------------------------


def cmd_grid(args: argparse.Namespace) -> int:
    cfg = _load(args.config)
    design_path = args.design or experiment.default_design_path()
    try:
        design = experiment.load_design(design_path)
        master_seed = cfg.master_seed if args.seed is None else args.seed
        manifest = experiment.generate_grid(
            design, args.out, master_seed, cfg.render, list(cfg.materials),
            bit_depth=args.bit_depth,
            warn=lambda s: print(f"warning: {s}", file=sys.stderr))
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(json.dumps({
        "design": manifest["design"],
        "count": len(manifest["stimuli"]),
        "out_dir": str(args.out),
        "manifest": str(Path(args.out) / "manifest.json"),
    }, indent=2))
    return 0


# ----- experiment -----------------------------------------------------------


def _interactive_rater(entry: dict) -> float:
    while True:
        raw = input(f"[{entry['id']}] rating 0=gratter(scratch) .. "
                    f"1=frotter(rub): ").strip()
        try:
            value = float(raw)
        except ValueError:
            print("  please enter a number in [0, 1]")
            continue
        if 0.0 <= value <= 1.0:
            return value
        print("  please enter a number in [0, 1]")


def _make_player(manifest_dir: Path):
    try:
        import sounddevice
    except ImportError:
        sounddevice = None

    def play(entry: dict) -> None:
        path = manifest_dir / entry["file"]
        if sounddevice is None:
            print(f"  (no playback backend; stimulus file: {path})")
            return
        from .wavio import read_wav
        samples, fs = read_wav(path)
        sounddevice.play(samples, fs, blocking=True)

    return play


def cmd_experiment(args: argparse.Namespace) -> int:
    try:
        manifest = experiment.load_manifest(args.manifest)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    if args.responses:
        scripted = json.loads(Path(args.responses).read_text(encoding="utf-8"))

        def rate(entry: dict) -> float:
            if entry["id"] not in scripted:
                raise SystemExit(
                    f"scripted responses missing stimulus {entry['id']!r}")
            return float(scripted[entry["id"]])

        play = None
    else:
        rate = _interactive_rater
        play = _make_player(Path(args.manifest).parent)

    presented = experiment.run_session(
        manifest, args.subject, args.out, rate, play)
    total = len(manifest["stimuli"])
    print(json.dumps({
        "subject": args.subject,
        "presented": presented,
        "total": total,
        "csv": str(args.out),
    }, indent=2))
    return 0


# ----- analyze --------------------------------------------------------------


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        manifest = experiment.load_manifest(args.manifest)
        responses = experiment.read_responses_csv(args.csv)
        report = analysis.analyze(responses, manifest,
                                  n_permutations=args.permutations,
                                  seed=args.seed)
    except (ConfigError, analysis.AnalysisError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(analysis.format_report(report))
    if args.json:
        text = json.dumps(report, indent=2)
        if args.json == "-":
            print(text)
        else:
            Path(args.json).write_text(text + "\n", encoding="utf-8")
    return 0


# ----- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frictionsynth",
        description="Offline tools: render stimuli, generate the factorial "
                    "stimulus bank, run rating sessions, analyze responses.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render one two-channel stimulus WAV")
    p.add_argument("--alpha", type=float, default=None,
                   help="action coordinate, 0=rub .. 1=scratch")
    p.add_argument("--mu-interval", type=float, default=None)
    p.add_argument("--sigma-interval", type=float, default=None)
    p.add_argument("--mu-amp", type=float, default=None)
    p.add_argument("--sigma-amp", type=float, default=None)
    p.add_argument("--min-interval", type=float, default=0.001)
    p.add_argument("--material", default=None,
                   help="material name from config, or 'none' to bypass")
    p.add_argument("--duration", type=float, required=True, help="seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--bit-depth", type=int, choices=(16, 24), default=16)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("grid", help="render the factorial stimulus bank")
    p.add_argument("--design", default=None, help="design JSON (default: shipped)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--bit-depth", type=int, choices=(16, 24), default=16)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("experiment", help="run a rating session over a bank")
    p.add_argument("--manifest", required=True)
    p.add_argument("--subject", required=True)
    p.add_argument("--out", required=True, help="response CSV (appended)")
    p.add_argument("--responses", default=None,
                   help="scripted responder JSON {stimulus_id: rating}")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("analyze", help="per-factor effect analysis of a CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--permutations", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", default=None,
                   help="also write the JSON report (path or '-')")
    p.set_defaults(func=cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
