"""Engine configuration file (TOML).

One file configures the control-signal behavior, the valence mapping,
and the audio windowing; every section and key is optional and falls
back to the defaults below.
"""

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..control import ControlConfig
from ..dsp import MfccConfig
from ..errors import ConfigError
from ..valence import ValenceMapping


@dataclass(frozen=True)
class EngineConfig:
    control: ControlConfig = field(default_factory=ControlConfig)
    mapping: ValenceMapping = field(default_factory=ValenceMapping)
    mfcc: MfccConfig = field(default_factory=MfccConfig)
    sample_rate: int = 16000
    window_s: float = 3.0
    hop_s: float = 1.0
    vector_mode: str = "tfidf"
    asr_timeout_s: float = 2.0


def load_engine_config(path=None) -> EngineConfig:
    """Parse a TOML config file; None gives the built-in defaults."""
    if path is None:
        return EngineConfig()
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

    try:
        control_doc = doc.get("control", {})
        control = ControlConfig(
            ema_alpha=control_doc.get("ema_alpha", 0.2),
            base_tempo=control_doc.get("base_tempo", 1.0),
            tempo_floor=control_doc.get("tempo_floor", 0.05),
            brightness_floor=control_doc.get("brightness_floor", 0.3),
            tick_interval_ms=control_doc.get("tick_interval_ms", 500),
        )
        valence_doc = doc.get("valence", {})
        mapping = ValenceMapping()
        if "pleasant" in valence_doc:
            mapping = ValenceMapping(frozenset(valence_doc["pleasant"]))
        audio_doc = doc.get("audio", {})
        asr_doc = doc.get("asr", {})
        text_doc = doc.get("text", {})
        return EngineConfig(
            control=control,
            mapping=mapping,
            sample_rate=int(audio_doc.get("sample_rate", 16000)),
            window_s=float(audio_doc.get("window_s", 3.0)),
            hop_s=float(audio_doc.get("hop_s", 1.0)),
            vector_mode=str(text_doc.get("vector_mode", "tfidf")),
            asr_timeout_s=float(asr_doc.get("timeout_s", 2.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value in config {path}: {exc}") from exc
