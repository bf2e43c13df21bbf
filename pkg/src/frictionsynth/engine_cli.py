"""Engine binary: live synthesis with WebSocket control, or offline
rendering when --duration is given."""

from __future__ import annotations

import argparse
import asyncio
import signal
import sys
import threading
from dataclasses import replace as _dc_replace

from .config import ConfigError, default_config, load_config
from .engine import DeviceSink, EngineError, FrictionEngine, WavFileSink, \
    load_trace, render_session, run_live, save_trace
from .protocol import ProtocolServer
from .wavio import write_wav


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frictionsynth-engine",
        description="Real-time friction synthesizer engine. Without "
                    "--duration it runs live with the WebSocket control "
                    "protocol; with --duration it renders offline to the "
                    "output file.")
    parser.add_argument("--config", default=None, help="config JSON path")
    parser.add_argument("--port", type=int, default=None,
                        help="control protocol port (default from config)")
    sink = parser.add_mutually_exclusive_group()
    sink.add_argument("--device", default=None, help="audio output device")
    sink.add_argument("--outfile", default=None, help="output WAV path")
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed (default from config)")
    parser.add_argument("--duration", type=float, default=None,
                        help="seconds; enables offline mode")
    parser.add_argument("--trace", default=None,
                        help="control trace to replay (JSONL)")
    parser.add_argument("--record-trace", default=None,
                        help="record the applied control trace here")
    parser.add_argument("--host", default="127.0.0.1")
    return parser


def _resolve_config(args):
    cfg = load_config(args.config) if args.config else default_config()
    if args.device is not None:
        cfg = _dc_replace(cfg, output_device=args.device, output_file=None)
    elif args.outfile is not None:
        cfg = _dc_replace(cfg, output_device=None, output_file=args.outfile)
    if args.port is not None:
        cfg = _dc_replace(cfg, protocol_port=args.port)
    return cfg


def run_offline(args, cfg) -> int:
    if args.duration <= 0.0:
        print("error: duration must be > 0", file=sys.stderr)
        return 2
    if cfg.output_file is None:
        print("error: offline mode needs an output file "
              "(--outfile or output.file in the config)", file=sys.stderr)
        return 2
    trace = load_trace(args.trace) if args.trace else None
    samples = render_session(cfg, args.duration, seed=args.seed, trace=trace)
    write_wav(samples, cfg.render.sample_rate_hz, cfg.output_file)
    print(f"wrote {cfg.output_file} "
          f"({args.duration:g} s at {cfg.render.sample_rate_hz} Hz)")
    return 0


async def run_live_with_protocol(args, cfg) -> int:
    engine = FrictionEngine(cfg, seed=args.seed)
    if cfg.output_device is not None:
        sink = DeviceSink(cfg.output_device, cfg.render.sample_rate_hz,
                          cfg.render.block_size)
    else:
        sink = WavFileSink(cfg.output_file, cfg.render.sample_rate_hz)

    server = ProtocolServer(engine, args.host, cfg.protocol_port)
    await server.start()
    print(f"control protocol on ws://{args.host}:{server.port}")

    stop = threading.Event()
    loop = asyncio.get_running_loop()
    for sig in (signal.SIGINT, signal.SIGTERM):
        loop.add_signal_handler(sig, stop.set)

    stats = await asyncio.to_thread(run_live, engine, sink, None, stop)
    await server.stop()
    if args.record_trace:
        save_trace(args.record_trace, engine.trace)
        print(f"trace: {args.record_trace} ({len(engine.trace)} messages)")
    print(f"rendered {stats.blocks} blocks in {stats.elapsed_s:.2f} s, "
          f"{stats.underruns} underruns")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        if args.duration is not None:
            return run_offline(args, cfg)
        return asyncio.run(run_live_with_protocol(args, cfg))
    except EngineError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 0


if __name__ == "__main__":
    raise SystemExit(main())
