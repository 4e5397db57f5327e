"""Exception types shared across the engine."""


class MoodspringError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(MoodspringError):
    """An argument violates an operation's preconditions."""


class TooShort(InvalidInput):
    """Audio clip shorter than one analysis frame."""


class InsufficientData(MoodspringError):
    """Not enough examples to train or to certify a bound."""


class InsufficientGroups(InsufficientData):
    """Fairness-weighted training needs both demographic groups present."""


class NumericalError(MoodspringError):
    """Training produced a non-finite loss."""


class FormatError(MoodspringError):
    """A file or payload does not match its declared format."""


class ConfigError(MoodspringError):
    """Model set or configuration is missing a required piece."""


class SessionNotFound(MoodspringError):
    """Operation referenced an unknown session id."""


class AsrError(MoodspringError):
    """The external speech recognizer failed or returned garbage."""


class AsrTimeout(AsrError):
    """The external speech recognizer missed its deadline."""
