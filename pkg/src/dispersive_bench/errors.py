"""Exception types raised across the workbench."""


class BenchError(Exception):
    """Base class for all workbench errors."""


class InvalidField(BenchError, ValueError):
    pass


class InvalidSpectrum(BenchError, ValueError):
    pass


class GridTooLarge(BenchError, ValueError):
    pass


class KMaxTooLarge(BenchError, ValueError):
    pass


class NonFinite(BenchError, RuntimeError):
    """Integration produced NaN/Inf; ``step`` holds the failing step index."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class SmallnessViolated(BenchError, ValueError):
    pass


class DeltaTooSmall(BenchError, ValueError):
    pass


class BandOutOfRange(BenchError, ValueError):
    pass


class TooFewPoints(BenchError, ValueError):
    pass


class EmptySeries(BenchError, ValueError):
    pass


class ConfigError(BenchError, ValueError):
    pass
