"""Exception hierarchy for driftcert."""


class DriftcertError(Exception):
    """Base class for all library errors."""


class RowError(DriftcertError, ValueError):
    """A materialized transition row is not a valid probability distribution."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class NegativeProbability(RowError):
    pass


class RowSumOutOfTolerance(RowError):
    pass


class NegativeTargetState(RowError):
    pass


class BandViolation(RowError):
    pass


class InvalidParams(DriftcertError, ValueError):
    pass


class UnknownBuiltin(DriftcertError, KeyError):
    pass


class SpecParseError(DriftcertError, ValueError):
    pass


class TailInconsistent(DriftcertError, ValueError):
    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class ZOutOfRange(DriftcertError, ValueError):
    pass


class RangeTooSmall(DriftcertError, ValueError):
    pass


class HorizonTooSmallForBand(DriftcertError, ValueError):
    pass


class MissingDownBound(DriftcertError, ValueError):
    pass


class MissingBounds(DriftcertError, ValueError):
    pass


class NoTailCertificate(DriftcertError, ValueError):
    pass


class ContradictoryVerdicts(DriftcertError):
    def __init__(self, message, verdicts=()):
        super().__init__(message)
        self.verdicts = list(verdicts)


class ZeroProbability(DriftcertError, ValueError):
    pass


class HintInconsistent(DriftcertError, ValueError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
