"""Smoothed animation control signals from fused valence probabilities.

Each tick turns the smoothed pleasant-probability into the wire unit the
visual client consumes: valence class, an entropy-based confidence, a
brightness scaled onto [brightness_floor, 1], a season-cycle tempo, and
the accumulated season phase. Timestamps are logical (seq * tick
interval) so identical input streams produce bit-identical signal
streams.
"""

import math
from dataclasses import dataclass

from .errors import InvalidInput
from .valence import valence_class, PLEASANT


@dataclass(frozen=True)
class ControlConfig:
    ema_alpha: float = 0.2
    base_tempo: float = 1.0        # season cycles per minute at full certainty
    tempo_floor: float = 0.05
    brightness_floor: float = 0.3
    tick_interval_ms: int = 500

    def __post_init__(self):
        if not 0.0 < self.ema_alpha <= 1.0:
            raise InvalidInput("ema_alpha must lie in (0, 1]")
        if not 0.0 <= self.tempo_floor <= 1.0:
            raise InvalidInput("tempo_floor must lie in [0, 1]")
        if not 0.0 <= self.brightness_floor < 1.0:
            raise InvalidInput("brightness_floor must lie in [0, 1)")
        if self.base_tempo <= 0 or self.tick_interval_ms <= 0:
            raise InvalidInput("base_tempo and tick_interval_ms must be positive")


@dataclass(frozen=True)
class ControlSignal:
    valence: str
    p_smoothed: float
    confidence: float
    tempo: float
    brightness: float
    season_phase: float
    seq: int
    timestamp: int  # logical milliseconds since session start

    def to_dict(self) -> dict:
        return {
            "valence": self.valence,
            "p_smoothed": self.p_smoothed,
            "confidence": self.confidence,
            "tempo": self.tempo,
            "brightness": self.brightness,
            "season_phase": self.season_phase,
            "seq": self.seq,
            "timestamp": self.timestamp,
        }


def step(prev_p: float, new_p: float, cfg: ControlConfig | None = None) -> float:
    """Exponential moving average: (1 - alpha) * prev + alpha * new.

    Sessions seed prev with 0.5 before the first observation.
    """
    cfg = cfg or ControlConfig()
    for name, value in (("prev_p", prev_p), ("new_p", new_p)):
        if not 0.0 <= value <= 1.0:
            raise InvalidInput(f"{name} must lie in [0, 1], got {value}")
    return (1.0 - cfg.ema_alpha) * prev_p + cfg.ema_alpha * new_p


def confidence_from_probability(p: float) -> float:
    """1 - H(p)/ln 2 with H the natural-log binary entropy.

    0 at p = 0.5 (no information), 1 at p in {0, 1} (H(0) = H(1) = 0
    by limit).
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidInput(f"probability must lie in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 1.0
    entropy = -(p * math.log(p) + (1.0 - p) * math.log(1.0 - p))
    return 1.0 - entropy / math.log(2.0)


def make_control(p_smoothed: float, cfg: ControlConfig | None = None,
                 prev: ControlSignal | None = None) -> ControlSignal:
    """Build the next control signal from the smoothed pleasant-probability.

    Tempo follows the winning side's probability mass (unpleasant weather
    intensifies under the same rate law as pleasant seasons), floored at
    tempo_floor so the scene never freezes. The season phase advances by
    tempo * tick_interval and wraps on [0, 1).
    """
    cfg = cfg or ControlConfig()
    if not 0.0 <= p_smoothed <= 1.0:
        raise InvalidInput(f"p_smoothed must lie in [0, 1], got {p_smoothed}")
    valence = valence_class(p_smoothed)
    confidence = confidence_from_probability(p_smoothed)
    brightness = cfg.brightness_floor + (1.0 - cfg.brightness_floor) * confidence
    winning_mass = p_smoothed if valence == PLEASANT else 1.0 - p_smoothed
    tempo = cfg.base_tempo * max(winning_mass, cfg.tempo_floor)
    prev_phase = prev.season_phase if prev is not None else 0.0
    season_phase = (prev_phase + tempo * cfg.tick_interval_ms / 60000.0) % 1.0
    seq = prev.seq + 1 if prev is not None else 0
    return ControlSignal(
        valence=valence,
        p_smoothed=p_smoothed,
        confidence=confidence,
        tempo=tempo,
        brightness=brightness,
        season_phase=season_phase,
        seq=seq,
        timestamp=seq * cfg.tick_interval_ms,
    )
