"""Wire protocol of the /session WebSocket endpoint.

Client frames (JSON):
    {"type": "text", "text": "..."}
    {"type": "audio", "rate": 16000, "pcm16_b64": "..."}
    {"type": "config", ...settable keys...}

Server frames:
    {"type": "control", ...ControlSignal fields...}
    {"type": "warning", "code": ..., "message": ...}
    {"type": "error", "code": ..., "message": ...}

handle_frame is pure protocol: it never raises for client mistakes, it
answers them with an error frame and keeps the session alive.
"""

import base64
import binascii
import json
from dataclasses import replace

import numpy as np

from ..control import ControlSignal
from ..errors import ConfigError, InvalidInput, MoodspringError, SessionNotFound
from ..valence import ValenceMapping
from .pipeline import Session, WarningEvent

#: config-frame keys applied to the session's control configuration
_CONTROL_KEYS = ("ema_alpha", "base_tempo", "tempo_floor", "brightness_floor", "tick_interval_ms")


def control_frame(signal: ControlSignal) -> dict:
    return {"type": "control", **signal.to_dict()}


def warning_frame(event: WarningEvent) -> dict:
    return {"type": "warning", "code": event.code, "message": event.message}


def error_frame(code: str, message: str) -> dict:
    return {"type": "error", "code": code, "message": message}


def _encode_events(events) -> list[dict]:
    frames = []
    for event in events:
        if isinstance(event, WarningEvent):
            frames.append(warning_frame(event))
        else:
            frames.append(control_frame(event))
    return frames


def handle_frame(session: Session, frame) -> list[dict]:
    """Process one client frame, returning the server frames to send."""
    if isinstance(frame, (str, bytes)):
        try:
            frame = json.loads(frame)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            return [error_frame("bad_json", f"frame is not valid JSON: {exc}")]
    if not isinstance(frame, dict) or "type" not in frame:
        return [error_frame("bad_frame", 'frame must be a JSON object with a "type" field')]

    kind = frame["type"]
    try:
        if kind == "text":
            return _handle_text(session, frame)
        if kind == "audio":
            return _handle_audio(session, frame)
        if kind == "config":
            return _handle_config(session, frame)
    except MoodspringError as exc:
        return [error_frame(_error_code(exc), str(exc))]
    return [error_frame("unknown_type", f"unknown frame type {kind!r}")]


def _error_code(exc: MoodspringError) -> str:
    if isinstance(exc, SessionNotFound):
        return "session_not_found"
    if isinstance(exc, ConfigError):
        return "config_error"
    return "invalid_input"


def _handle_text(session: Session, frame: dict) -> list[dict]:
    text = frame.get("text")
    if not isinstance(text, str):
        return [error_frame("bad_text", 'text frame needs a string "text" field')]
    return [control_frame(session.handle_text(text))]


def _handle_audio(session: Session, frame: dict) -> list[dict]:
    rate = frame.get("rate")
    encoded = frame.get("pcm16_b64")
    # bool is an int subtype; a JSON true must not pass as rate 1
    if not isinstance(rate, int) or isinstance(rate, bool) or rate <= 0:
        return [error_frame("bad_audio", 'audio frame needs a positive integer "rate"')]
    if not isinstance(encoded, str):
        return [error_frame("bad_audio", 'audio frame needs a base64 "pcm16_b64" field')]
    try:
        raw = base64.b64decode(encoded, validate=True)
    except (binascii.Error, ValueError):
        return [error_frame("bad_audio", "pcm16_b64 is not valid base64")]
    if len(raw) % 2 != 0:
        return [error_frame("bad_audio", "pcm16 payload has an odd byte count")]
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return _encode_events(session.handle_audio_chunk(samples, rate))


def _handle_config(session: Session, frame: dict) -> list[dict]:
    settings = {k: v for k, v in frame.items() if k != "type"}
    unknown = [k for k in settings if k not in _CONTROL_KEYS and k != "pleasant"]
    if unknown:
        return [error_frame("bad_config", f"unknown config keys: {sorted(unknown)}")]
    try:
        control = session.config.control
        control_updates = {k: v for k, v in settings.items() if k in _CONTROL_KEYS}
        if control_updates:
            control = replace(control, **control_updates)
        mapping = session.config.mapping
        if "pleasant" in settings:
            mapping = ValenceMapping(frozenset(settings["pleasant"]))
        session.config = replace(session.config, control=control, mapping=mapping)
    except (InvalidInput, TypeError) as exc:
        return [error_frame("bad_config", str(exc))]
    return []
