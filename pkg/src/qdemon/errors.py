"""Exception hierarchy shared by all qdemon modules."""


class QDemonError(Exception):
    """Base class for every error raised by qdemon."""


class InvalidDimensionError(QDemonError, ValueError):
    pass


class ShapeError(QDemonError, ValueError):
    pass


class InvalidStateError(QDemonError, ValueError):
    """A matrix failed density-matrix (or effect-operator) validation."""


class IntegratorAccuracyError(QDemonError, RuntimeError):
    """Positivity or spectrum drift beyond tolerance during time evolution.

    Usually fixed by tightening the integrator tolerance.
    """


class WeakDriveViolated(QDemonError, ValueError):
    pass


class CalibrationRequired(QDemonError, ValueError):
    pass


class CalibrationFailed(QDemonError, RuntimeError):
    pass


class TruncationUnsafe(QDemonError, ValueError):
    pass


class ParameterError(QDemonError, ValueError):
    pass


class UnreachableTemperature(QDemonError, ValueError):
    pass


class NegativeTemperature(QDemonError, ValueError):
    pass


class InconsistentContrast(QDemonError, ValueError):
    pass


class GainModelDomainError(QDemonError, ValueError):
    pass


class InsufficientData(QDemonError, ValueError):
    pass
