"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2,
InfeasibleTargetError -> 3, NumericError (and subclasses) -> 4.
"""


class SecnetError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(SecnetError):
    """Invalid configuration file or experiment specification."""


class InfeasibleTargetError(SecnetError):
    """QoS targets cannot be met by any FD-tier density."""


class NumericError(SecnetError):
    """A numerical routine failed to reach its accuracy contract."""


class QuadratureError(NumericError):
    """Adaptive quadrature did not converge.

    Carries the achieved absolute-error estimate so callers can decide
    whether the partial result is usable.
    """

    def __init__(self, message: str, achieved_tolerance: float = float("nan")):
        super().__init__(message)
        self.achieved_tolerance = achieved_tolerance


class BracketError(NumericError):
    """A root/maximum bracket could not be established."""


class PartitionLimitError(NumericError):
    """Requested integer-partition table exceeds the configured cap."""
