"""Regenerate the frontend replay fixtures from the engine.

Run from the repository root:

    python frontend/test/fixtures/generate_fixtures.py

control_signals.json is a recorded session (fast tempo so the phase
sweeps all four seasons); expected_visuals.json is the same sequence
pushed through an independent implementation of the render rule
(season = floor(phase*4), idealized vs storm palette by valence,
opacity = brightness, speed = tempo). The TypeScript view must
reproduce it exactly.
"""

import json
import math
from pathlib import Path

from moodspring.control import ControlConfig
from moodspring.demo_assets import build_demo_model_set, demo_tone
from moodspring.service.config import EngineConfig
from moodspring.service.pipeline import Engine, WarningEvent

HERE = Path(__file__).parent
SEASONS = ["spring", "summer", "autumn", "winter"]

SCRIPT = [
    ("text", "what a lovely sunny day"),
    ("text", "i love this wonderful weather"),
    ("audio", "happy"),
    ("text", "calm gentle peaceful morning"),
    ("text", "this is a horrible miserable mess"),
    ("text", "i hate this terrible awful storm"),
    ("audio", "angry"),
    ("text", "everything is sad and gloomy"),
    ("text", "what a beautiful lovely evening"),
    ("text", "wonderful fantastic great news"),
]


def main() -> None:
    config = EngineConfig(control=ControlConfig(base_tempo=40.0, tick_interval_ms=500))
    engine = Engine(build_demo_model_set(), config)
    session = engine.open_session()
    signals = []
    for kind, payload in SCRIPT:
        if kind == "text":
            signals.append(session.handle_text(payload))
        else:
            for event in session.handle_audio_chunk(demo_tone(payload, seconds=3.0)):
                if not isinstance(event, WarningEvent):
                    signals.append(event)

    control_frames = [{"type": "control", **s.to_dict()} for s in signals]
    expected = []
    for s in signals:
        quadrant = min(3, math.floor(s.season_phase * 4))
        expected.append(
            {
                "season": SEASONS[quadrant],
                "palette": "idealized" if s.valence == "pleasant" else "storm",
                "opacity": s.brightness,
                "speed": s.tempo,
                "seasonProgress": s.season_phase * 4 - quadrant,
            }
        )

    (HERE / "control_signals.json").write_text(json.dumps(control_frames, indent=2) + "\n")
    (HERE / "expected_visuals.json").write_text(json.dumps(expected, indent=2) + "\n")
    seasons_hit = sorted({e["season"] for e in expected})
    palettes_hit = sorted({e["palette"] for e in expected})
    print(f"wrote {len(control_frames)} signals; seasons {seasons_hit}; palettes {palettes_hit}")


if __name__ == "__main__":
    main()
