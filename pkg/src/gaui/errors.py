"""Exception types shared across the engine."""


class GauiError(Exception):
    """Base class for engine errors."""


class ConfigurationError(GauiError):
    """A configuration cannot produce a usable artifact (e.g. layout does not fit)."""


class StreamOrderError(GauiError):
    """A timestamped stream was fed out of order; state is left unchanged."""
