"""Exception types raised across the package.

All inherit ValueError so callers that only care about "bad input" can
catch one class.
"""


class NegoodError(ValueError):
    pass


class ConfigError(NegoodError):
    pass


class NonUnitRow(NegoodError):
    def __init__(self, index: int, norm: float):
        super().__init__(f"row {index} has norm {norm:.6g}; expected unit norm")
        self.index = index
        self.norm = norm


class LabelCountMismatch(NegoodError):
    pass


class EmptyMatrix(NegoodError):
    pass


class DimensionMismatch(NegoodError):
    pass


class AlphaTooLarge(NegoodError):
    pass


class TooFewRows(NegoodError):
    pass


class LNotAvailable(NegoodError):
    pass


class ZeroNormResult(NegoodError):
    pass


class EmptyAffinities(NegoodError):
    pass


class EmptyGroups(NegoodError):
    pass


class NonPositiveMean(NegoodError):
    pass


class EnumerationTooLarge(NegoodError):
    pass


class InsufficientTrials(NegoodError):
    pass


class InfeasibleSeparation(NegoodError):
    pass


class EmptyScores(NegoodError):
    pass
