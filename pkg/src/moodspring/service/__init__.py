"""Live pipeline orchestration: sessions, ASR contract, protocol, CLI."""

from .asr import AsrClient
from .config import EngineConfig, load_engine_config
from .modelset import ClassifierSlot, ModelSet, load_model_set, save_model_set
from .pipeline import Engine, Session, WarningEvent, evaluate_decisions, evaluate_manifest
from .protocol import handle_frame

__all__ = [
    "AsrClient",
    "EngineConfig",
    "load_engine_config",
    "ClassifierSlot",
    "ModelSet",
    "load_model_set",
    "save_model_set",
    "Engine",
    "Session",
    "WarningEvent",
    "evaluate_decisions",
    "evaluate_manifest",
    "handle_frame",
]
