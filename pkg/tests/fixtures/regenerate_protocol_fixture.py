"""Regenerate the recorded protocol session (golden file).

Run from the repository root:

    python tests/fixtures/regenerate_protocol_fixture.py

The scenario mixes well-formed text/audio/config frames with malformed
ones; the engine's responses are frozen into protocol_session.json and
the test suite replays the inputs and demands byte-equal output.
"""

import base64
import json
from pathlib import Path

import numpy as np

from moodspring.demo_assets import build_demo_model_set, demo_tone
from moodspring.dsp import resample
from moodspring.service.config import EngineConfig
from moodspring.service.pipeline import Engine
from moodspring.service.protocol import handle_frame

FIXTURE = Path(__file__).parent / "protocol_session.json"


def pcm16_b64(samples: np.ndarray) -> str:
    ints = np.clip(np.round(samples * 32767.0), -32768, 32767).astype("<i2")
    return base64.b64encode(ints.tobytes()).decode("ascii")


def input_frames() -> list:
    tone = resample(demo_tone("happy", seconds=1.5), 8000).samples
    half = tone.size // 2
    return [
        {"type": "config", "ema_alpha": 0.5},
        {"type": "text", "text": "what a lovely sunny day"},
        "this is not json {",
        {"type": "text"},
        {"type": "probe"},
        {"no_type": True},
        {"type": "audio", "rate": 8000, "pcm16_b64": pcm16_b64(tone[:half])},
        {"type": "audio", "rate": 8000, "pcm16_b64": pcm16_b64(tone[half:])},
        {"type": "audio", "rate": 8000, "pcm16_b64": "@@not-base64@@"},
        {"type": "audio", "rate": 0, "pcm16_b64": ""},
        {"type": "config", "tempo": "fast"},
        {"type": "text", "text": "this gloomy rain is horrible"},
    ]


def main() -> None:
    engine = Engine(build_demo_model_set(), EngineConfig(window_s=1.0, hop_s=0.5))
    session = engine.open_session()
    record = {"input": input_frames(), "expected": []}
    for frame in record["input"]:
        payload = frame if isinstance(frame, str) else json.dumps(frame)
        record["expected"].append(handle_frame(session, payload))
    FIXTURE.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {FIXTURE}")


if __name__ == "__main__":
    main()
