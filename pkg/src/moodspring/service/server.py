"""WebSocket host for the /session endpoint."""

import asyncio
import json
import logging

import websockets

from .pipeline import Engine
from .protocol import error_frame, handle_frame

log = logging.getLogger("moodspring.server")


async def _handle_connection(connection, engine: Engine) -> None:
    path = getattr(getattr(connection, "request", None), "path", "/session")
    if path.split("?")[0] != "/session":
        await connection.close(code=1008, reason="unknown path")
        return
    session = engine.open_session()
    log.info("session %s opened", session.id)
    try:
        async for message in connection:
            try:
                # sessions stay independent: the blocking pipeline work
                # (MFCC, ASR subprocess) runs off the event loop
                frames = await asyncio.to_thread(handle_frame, session, message)
            except Exception as exc:  # never kill the socket on a pipeline bug
                log.exception("session %s: unhandled pipeline error", session.id)
                frames = [error_frame("internal", f"internal error: {exc}")]
            for frame in frames:
                await connection.send(json.dumps(frame, sort_keys=True))
    finally:
        engine.close_session(session.id)
        log.info("session %s closed", session.id)


async def serve_async(engine: Engine, host: str = "127.0.0.1", port: int = 8765, on_ready=None):
    """Run the endpoint until cancelled; on_ready fires after the bind."""
    async with websockets.serve(lambda ws: _handle_connection(ws, engine), host, port):
        log.info("listening on ws://%s:%d/session", host, port)
        if on_ready is not None:
            on_ready()
        await asyncio.Future()


def serve(engine: Engine, host: str = "127.0.0.1", port: int = 8765, on_ready=None) -> None:
    try:
        asyncio.run(serve_async(engine, host, port, on_ready=on_ready))
    except KeyboardInterrupt:
        pass
