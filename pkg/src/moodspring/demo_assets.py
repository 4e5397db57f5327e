"""Small deterministic fixtures: a toy corpus, synthetic audio, and a
ready-to-serve model set.

These power the demo scripts, the latency benchmarks, and UI round-trip
testing without shipping any real dataset. Everything is seeded, so two
builds of the same fixture are identical.
"""

import numpy as np

from .dsp import AudioClip, audio_features
from .fusion import FusionInput, train_fusion
from .models import predict_proba, train
from .service.config import EngineConfig
from .service.modelset import ClassifierSlot, ModelSet, save_model_set
from .textfeat import build_vocab, tokenize, vectorize
from .valence import to_valence

# tiny valence-polarized corpus; enough signal for naive Bayes to latch on
DEMO_TEXTS = [
    ("what a lovely sunny day i love this", "happy"),
    ("this is wonderful great fantastic news", "happy"),
    ("such a beautiful calm peaceful morning", "calm"),
    ("everything feels quiet calm and gentle today", "calm"),
    ("i am so happy and grateful for this lovely weather", "happy"),
    ("calm seas gentle breeze a peaceful lovely walk", "calm"),
    ("this is terrible awful horrible news", "angry"),
    ("i hate this miserable rotten day", "angry"),
    ("everything is sad gloomy and hopeless", "sad"),
    ("such a dreadful storm ruined the miserable evening", "sad"),
    ("i am angry furious about this horrible mess", "angry"),
    ("the gloomy rain makes me sad and tired", "sad"),
]

DEMO_SAMPLE_RATE = 16000


def demo_tone(emotion: str, seed: int = 0, seconds: float = 1.0) -> AudioClip:
    """Synthetic stand-in for emotional speech: pleasant emotions get a
    bright two-tone chord, unpleasant ones a low rumble; a seeded noise
    floor keeps clips distinct."""
    rng = np.random.default_rng([seed, sum(emotion.encode())])
    t = np.arange(int(seconds * DEMO_SAMPLE_RATE)) / DEMO_SAMPLE_RATE
    if emotion in ("happy", "calm", "neutral", "surprised"):
        wave = 0.4 * np.sin(2 * np.pi * 660.0 * t) + 0.2 * np.sin(2 * np.pi * 880.0 * t)
    else:
        wave = 0.5 * np.sin(2 * np.pi * 110.0 * t) + 0.2 * np.sin(2 * np.pi * 165.0 * t)
    wave += 0.02 * rng.standard_normal(t.size)
    return AudioClip(np.clip(wave, -1.0, 1.0), DEMO_SAMPLE_RATE)


def build_demo_model_set(config: EngineConfig | None = None, seed: int = 0) -> ModelSet:
    """Two text classifiers + one audio classifier + a trained fusion layer."""
    config = config or EngineConfig()

    token_docs = [tokenize(text) for text, _ in DEMO_TEXTS]
    vocab = build_vocab(token_docs, min_df=1)
    text_features = [vectorize(doc, vocab, config.vector_mode) for doc in token_docs]
    text_labels = [label for _, label in DEMO_TEXTS]
    text_nb = train("gaussian-nb", text_features, text_labels, seed=seed)
    text_knn = train("knn", text_features, text_labels, seed=seed, knn_k=3)

    audio_emotions = ["happy", "calm", "sad", "angry"] * 3
    audio_clips = [demo_tone(e, seed=seed + i) for i, e in enumerate(audio_emotions)]
    audio_feats = [audio_features(clip, config.mfcc) for clip in audio_clips]
    audio_knn = train("knn", audio_feats, audio_emotions, seed=seed, knn_k=3)

    slots = (
        ClassifierSlot("text-nb", "text", text_nb),
        ClassifierSlot("text-knn", "text", text_knn),
        ClassifierSlot("audio-knn", "audio", audio_knn),
    )

    # fusion trained on the classifiers' own outputs over the fixture data
    inputs = []
    for features, label, group in zip(
        text_features, text_labels, ["A", "B"] * (len(DEMO_TEXTS) // 2)
    ):
        p_row = [
            to_valence(predict_proba(text_nb, features), text_nb.classes, config.mapping),
            to_valence(predict_proba(text_knn, features), text_knn.classes, config.mapping),
            0.5,
        ]
        truth = 1 if config.mapping.is_pleasant(label) else 0
        inputs.append(FusionInput(p=np.array(p_row), group=group, label=truth))
    for features, label, group in zip(audio_feats, audio_emotions, ["A", "B"] * (len(audio_feats) // 2)):
        p_row = [
            0.5,
            0.5,
            to_valence(predict_proba(audio_knn, features), audio_knn.classes, config.mapping),
        ]
        truth = 1 if config.mapping.is_pleasant(label) else 0
        inputs.append(FusionInput(p=np.array(p_row), group=group, label=truth))

    fusion = train_fusion(inputs, fairness_weight=1.0, lr=0.5, epochs=300, seed=seed)
    baseline = train_fusion(inputs, fairness_weight=0.0, lr=0.5, epochs=300, seed=seed)
    return ModelSet(slots, vocab=vocab, fusion=fusion, fusion_baseline=baseline)


def write_demo_model_set(directory, config: EngineConfig | None = None, seed: int = 0) -> None:
    save_model_set(build_demo_model_set(config, seed), directory)
