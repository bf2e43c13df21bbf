"""WebSocket control protocol: single-object JSON messages in, single
JSON replies out (ack | error | diagnostics).

Accepted message types: pointer, set_alpha, set_material, set_modality,
ping, diagnostics. Malformed JSON or unknown types get an error reply;
the connection stays open and the engine is never disturbed.
"""

from __future__ import annotations

import asyncio
import json
from typing import Optional

from websockets.asyncio.server import serve

from .engine import FrictionEngine

__all__ = ["MESSAGE_TYPES", "handle_raw_message", "serve_control_protocol",
           "ProtocolServer"]

MESSAGE_TYPES = ("pointer", "set_alpha", "set_material", "set_modality",
                 "ping", "diagnostics")


def handle_raw_message(engine: FrictionEngine, raw: str | bytes) -> dict:
    """Parse and dispatch one wire message; always returns a reply dict."""
    try:
        msg = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        return {"type": "error", "reason": f"malformed JSON: {e}"}
    if not isinstance(msg, dict):
        return {"type": "error", "reason": "message must be a JSON object"}
    if "type" not in msg:
        return {"type": "error", "reason": "message missing 'type' field"}
    try:
        return engine.submit(msg)
    except Exception as e:  # protocol must never crash the engine
        return {"type": "error", "reason": f"internal: {e}"}


class ProtocolServer:
    """Asyncio WebSocket server bound to one engine instance."""

    def __init__(self, engine: FrictionEngine, host: str = "127.0.0.1",
                 port: Optional[int] = None) -> None:
        self.engine = engine
        self.host = host
        self.port = port if port is not None else engine.config.protocol_port
        self._server = None

    async def _handler(self, websocket) -> None:
        async for raw in websocket:
            reply = handle_raw_message(self.engine, raw)
            await websocket.send(json.dumps(reply))

    async def start(self) -> None:
        self._server = await serve(self._handler, self.host, self.port)

    async def stop(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None

    async def serve_forever(self) -> None:
        await self.start()
        try:
            await asyncio.Future()
        finally:
            await self.stop()


async def serve_control_protocol(engine: FrictionEngine,
                                 host: str = "127.0.0.1",
                                 port: Optional[int] = None) -> ProtocolServer:
    """Start the control server; returns once it is listening."""
    server = ProtocolServer(engine, host, port)
    await server.start()
    return server
