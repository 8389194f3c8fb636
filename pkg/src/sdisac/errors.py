"""Exception types raised across the package."""


class SdIsacError(Exception):
    """Base class for all errors raised by :mod:`sdisac`."""


class DimensionMismatch(SdIsacError, ValueError):
    pass


class NullSpaceEmpty(SdIsacError):
    """The channel has as many users as antennas, so no null space exists."""


class RankDeficient(SdIsacError):
    """The channel is numerically rank deficient.

    The ``basis`` attribute carries the (larger than ``Nt - K``) null-space
    basis so the caller can decide whether to proceed with it.
    """

    def __init__(self, message, basis=None, rank=None):
        super().__init__(message)
        self.basis = basis
        self.rank = rank


class DelayOutOfRange(SdIsacError, ValueError):
    pass


class PowerBudgetExceeded(SdIsacError):
    """The communication power required by the QoS exceeds the total budget."""


class InvalidRho(SdIsacError, ValueError):
    pass


class SolverNotConverged(SdIsacError):
    pass


class BracketingFailed(SdIsacError):
    pass


class NoSidelobeRegion(SdIsacError):
    pass


class NoMainlobeRegion(SdIsacError):
    pass


class ZeroPoint(SdIsacError):
    """Retraction of a (numerically) zero matrix onto the power sphere."""


class ConfigError(SdIsacError, ValueError):
    pass
