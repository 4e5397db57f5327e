import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from moodspring.dsp import AudioClip
from moodspring.fusion import FusionModel
from moodspring.models import train
from moodspring.service.config import EngineConfig
from moodspring.service.modelset import ClassifierSlot, ModelSet
from moodspring.textfeat import Vocabulary, tokenize, vectorize

STUB_DIR = Path(__file__).parent / "asr_stubs"


def stub_command(name: str) -> str:
    return f"{sys.executable} {STUB_DIR / name}"


@pytest.fixture
def saturated_text_model_set():
    """Two text classifiers that emit p_pleasant of exactly 1.0 for 'sunny'
    and 0.0 for 'awful', fused through w=(1,1), b=-1.

    Class means are pushed far enough apart that the Gaussian posterior
    saturates to 1.0 in float64, which makes hand-composed expectations
    exact.
    """
    vocab = Vocabulary(("awful", "sunny"), (2, 2), n_docs=4)
    docs = ["sunny", "sunny", "awful", "awful"]
    labels = ["happy", "happy", "sad", "sad"]
    feats = [vectorize(tokenize(d), vocab) for d in docs]
    model_a = train("gaussian-nb", feats, labels)
    model_b = train("gaussian-nb", feats, labels, seed=1)
    fusion = FusionModel(np.array([1.0, 1.0]), -1.0)
    return ModelSet(
        (ClassifierSlot("text-a", "text", model_a), ClassifierSlot("text-b", "text", model_b)),
        vocab=vocab,
        fusion=fusion,
    )


@pytest.fixture
def engine_config():
    return EngineConfig()


def tone_clip(freq: float, seconds: float, rate: int = 16000, amplitude: float = 0.5) -> AudioClip:
    t = np.arange(int(seconds * rate)) / rate
    return AudioClip(amplitude * np.sin(2 * np.pi * freq * t), rate)
