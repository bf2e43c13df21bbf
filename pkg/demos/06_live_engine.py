"""
Driving the live engine over its control protocol
=================================================

Starts the block engine with its WebSocket server in-process, then acts
as a client: pointer strokes open the gate, the action slider morphs
the texture, diagnostics report what is installed. The rendered session
lands in a WAV (channel 0 audio, channel 1 tactile drive) together with
the recorded control trace; re-rendering the trace offline reproduces
the file byte for byte.

With the browser UI (frontend/) you do the same by hand: point it at
ws://127.0.0.1:8765 while frictionsynth-engine runs.
"""

import asyncio
import json
import threading
from pathlib import Path

from websockets.asyncio.client import connect

from frictionsynth import default_config
from frictionsynth.engine import FrictionEngine, WavFileSink, render_session, \
    run_live, save_trace, load_trace
from frictionsynth.protocol import ProtocolServer
from frictionsynth.wavio import write_wav

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

cfg = default_config()
engine = FrictionEngine(cfg, seed=2024)
live_path = out_dir / "06_live.wav"


async def client_session(port):
    async with connect(f"ws://127.0.0.1:{port}") as ws:
        async def send(msg):
            await ws.send(json.dumps(msg))
            return json.loads(await ws.recv())

        print("ping:", await send({"type": "ping"}))
        await send({"type": "set_material", "name": "metal"})
        await send({"type": "set_alpha", "alpha": 0.15})

        # a two-second stroke at 120 Hz, morphing toward scratch mid-way
        t = 0.0
        for i in range(240):
            await send({"type": "pointer", "t_s": t,
                        "x": (0.02 * i) % 1.0, "y": 0.5})
            if i == 120:
                print("morph:", await send({"type": "set_alpha", "alpha": 0.9}))
            t += 1.0 / 120.0
            await asyncio.sleep(1.0 / 120.0)

        print("diagnostics:", await send({"type": "diagnostics"}))
        # stop moving: the staleness gate silences the tail end


async def main():
    server = ProtocolServer(engine, "127.0.0.1", cfg.protocol_port)
    await server.start()
    print(f"engine listening on ws://127.0.0.1:{server.port}")

    stop = threading.Event()
    sink = WavFileSink(live_path, cfg.render.sample_rate_hz)
    render = threading.Thread(target=run_live, args=(engine, sink),
                              kwargs={"duration_s": 3.0, "stop": stop})
    render.start()
    try:
        await client_session(server.port)
    finally:
        render.join()
        await server.stop()


asyncio.run(main())
print(f"live session -> {live_path}")

trace_path = out_dir / "06_trace.jsonl"
save_trace(trace_path, engine.trace)
print(f"trace ({len(engine.trace)} messages) -> {trace_path}")

# Deterministic replay: the trace plus the same seed reproduce the
# session exactly. The live loop renders whole blocks, so replay for
# the block-aligned duration rather than the nominal 3.0 s.
rendered_s = engine.block_index * cfg.render.block_size / cfg.render.sample_rate_hz
replay = render_session(cfg, rendered_s, seed=2024,
                        trace=load_trace(trace_path))
replay_path = out_dir / "06_replay.wav"
write_wav(replay, cfg.render.sample_rate_hz, replay_path)
identical = replay_path.read_bytes() == live_path.read_bytes()
print(f"replay byte-identical: {identical}")
