"""moodspring: valence detection from speech and text with fairness-aware
decision fusion, emitting animation control signals to live clients."""

from .control import ControlConfig, ControlSignal, confidence_from_probability, make_control, step
from .dsp import (
    AudioClip,
    FeatureVector,
    MfccConfig,
    audio_features,
    compute_mfcc,
    mel_filterbank,
    pool,
    resample,
)
from .fusion import (
    DisparityReport,
    FusionInput,
    FusionModel,
    bernstein_disparity,
    complementary_experts_dataset,
    fuse,
    gradient,
    majority_vote,
    train_fusion,
)
from .models import TrainedModel, load, predict_label, predict_proba, save, train
from .textfeat import Vocabulary, build_vocab, tokenize, vectorize
from .valence import EMOTIONS, PLEASANT, UNPLEASANT, ValenceMapping, to_valence, valence_class

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "FeatureVector",
    "MfccConfig",
    "resample",
    "compute_mfcc",
    "mel_filterbank",
    "pool",
    "audio_features",
    "Vocabulary",
    "tokenize",
    "build_vocab",
    "vectorize",
    "TrainedModel",
    "train",
    "predict_proba",
    "predict_label",
    "save",
    "load",
    "EMOTIONS",
    "PLEASANT",
    "UNPLEASANT",
    "ValenceMapping",
    "to_valence",
    "valence_class",
    "FusionInput",
    "FusionModel",
    "DisparityReport",
    "majority_vote",
    "fuse",
    "train_fusion",
    "gradient",
    "bernstein_disparity",
    "complementary_experts_dataset",
    "ControlConfig",
    "ControlSignal",
    "step",
    "make_control",
    "confidence_from_probability",
    "__version__",
]
