class FoxPopException(Exception):
    """Base class for exceptions in foxpop"""

    pass


class AgeOutOfRange(FoxPopException):
    """Age lies outside ``[0, 12]``; over-age agents must be eliminated first"""

    pass


class EstimationError(FoxPopException):
    """Survival table can't be estimated from the given cohort.

    ``cell`` is the offending ``(AgeClass, Sex)`` pair, or a marginal like ``(AgeClass.ADULT, None)``."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class FileFormatError(FoxPopException):
    """Cohort or targets file is malformed"""

    pass


class ConfigurationError(FoxPopException):
    """Configuration document is invalid. ``path`` is the dotted key path."""

    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path


class EmptyResults(FoxPopException):
    """Can't aggregate an empty set of runs"""

    pass


class CalibrationError(FoxPopException):
    """No calibration candidate within tolerance"""

    pass


class CountMismatch(FoxPopException):
    """Cached home range counts disagree with the agent roster"""

    pass
