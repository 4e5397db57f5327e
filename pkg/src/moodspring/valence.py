"""Binary pleasant/unpleasant projection of emotion distributions.

The engine works over eight discrete emotion labels but every decision
downstream of the classifiers (fusion, control, UI) lives on the binary
valence axis. The partition of labels into pleasant and unpleasant is
configuration, not code: installations can move labels between sides.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput

#: closed emotion taxonomy; tuple order defines ordinal indices 0..7
EMOTIONS = ("neutral", "calm", "happy", "sad", "angry", "fearful", "disgust", "surprised")

PLEASANT = "pleasant"
UNPLEASANT = "unpleasant"

#: default partition; placing "surprised" on the pleasant side is a
#: documented choice, flip it in config if an installation disagrees
DEFAULT_PLEASANT = frozenset({"neutral", "calm", "happy", "surprised"})


def emotion_index(label: str) -> int:
    try:
        return EMOTIONS.index(label)
    except ValueError:
        raise InvalidInput(f"unknown emotion label {label!r}") from None


@dataclass(frozen=True)
class ValenceMapping:
    """Partition of the emotion taxonomy into pleasant / unpleasant sets."""

    pleasant: frozenset = field(default_factory=lambda: DEFAULT_PLEASANT)

    def __post_init__(self):
        pleasant = frozenset(self.pleasant)
        unknown = pleasant - set(EMOTIONS)
        if unknown:
            raise InvalidInput(f"unknown emotion labels in mapping: {sorted(unknown)}")
        if not pleasant or pleasant == set(EMOTIONS):
            raise InvalidInput("pleasant/unpleasant sets must both be non-empty")
        object.__setattr__(self, "pleasant", pleasant)

    @property
    def unpleasant(self) -> frozenset:
        return frozenset(EMOTIONS) - self.pleasant

    def is_pleasant(self, label: str) -> bool:
        emotion_index(label)
        return label in self.pleasant


def to_valence(probs, classes=EMOTIONS, mapping: ValenceMapping | None = None) -> float:
    """Probability of the pleasant side: sum of probs over pleasant labels.

    `classes` names the label each probability refers to; models trained
    on a label subset pass their own class tuple.
    """
    mapping = mapping or ValenceMapping()
    probs = np.asarray(probs, dtype=np.float64)
    if probs.shape != (len(classes),):
        raise InvalidInput("probability vector does not align with the class list")
    p = float(sum(pr for pr, label in zip(probs, classes) if label in mapping.pleasant))
    # clip away float dust so callers can rely on [0, 1]
    return min(1.0, max(0.0, p))


def valence_class(p_pleasant: float) -> str:
    """Binary decision; the 0.5 tie goes to pleasant."""
    if not 0.0 <= p_pleasant <= 1.0:
        raise InvalidInput(f"p_pleasant must be in [0,1], got {p_pleasant}")
    return PLEASANT if p_pleasant >= 0.5 else UNPLEASANT
