"""End-to-end session: text and audio through the full pipeline.

Builds the bundled demo model set (two text classifiers, one audio
classifier, trained fusion layer), opens a session, and streams typed
messages plus synthetic speech through it, printing every wire frame a
WebSocket client would receive.

To run the same models behind a real socket:

    python -m moodspring.service.cli serve --models <dir>

after saving the set with moodspring.demo_assets.write_demo_model_set.
"""

import json

from moodspring.demo_assets import build_demo_model_set, demo_tone
from moodspring.service.pipeline import Engine
from moodspring.service.protocol import handle_frame

engine = Engine(build_demo_model_set())
session = engine.open_session()
print(f"opened {session.id}; classifier slots:",
      [f"{s.name}({s.modality})" for s in engine.model_set.classifiers])

script = [
    {"type": "text", "text": "what a lovely sunny day"},
    {"type": "text", "text": "i love this wonderful weather"},
    {"type": "text", "text": "this is a horrible miserable mess"},
    {"type": "oops"},
]

for frame in script:
    for out in handle_frame(session, json.dumps(frame)):
        print(f"  -> {json.dumps(out)[:110]}")

print("\nstreaming 5 s of bright audio in 0.5 s chunks (ticks at 3, 4, 5 s):")
chunk = demo_tone("happy", seconds=0.5)
received = 0
for i in range(10):
    for event in session.handle_audio_chunk(chunk):
        received += 1
        print(f"  t={0.5 * (i + 1):.1f}s -> seq={event.seq} valence={event.valence} "
              f"p={event.p_smoothed:.3f} phase={event.season_phase:.4f}")
print(f"{received} audio-driven signals; fusion saw", session.fusion_inputs().round(3))
print("the text slots still hold the last typed (hostile) message: each")
print("modality keeps its freshest value until new input replaces it.")
