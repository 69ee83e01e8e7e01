"""Exception hierarchy.

Each family carries the process exit code the CLI maps it to:
2 parse, 3 validation, 4 hypothesis violation, 5 internal / theorem violation.
"""


class MagcharError(Exception):
    exit_code = 5


class ParseError(MagcharError):
    exit_code = 2


class ValidationError(MagcharError):
    exit_code = 3


class AsymmetricMatrix(ValidationError):
    def __init__(self, i, j):
        super().__init__(f"distance matrix is not symmetric at ({i}, {j})")
        self.indices = (i, j)


class NegativeOrZeroOffDiagonal(ValidationError):
    def __init__(self, i, j):
        super().__init__(f"off-diagonal distance at ({i}, {j}) is not positive")
        self.indices = (i, j)


class NonZeroDiagonal(ValidationError):
    def __init__(self, i):
        super().__init__(f"diagonal entry ({i}, {i}) is not zero")
        self.indices = (i,)


class TriangleViolation(ValidationError):
    def __init__(self, i, j, k):
        super().__init__(
            f"triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})"
        )
        self.indices = (i, j, k)


class DisconnectedGraph(ValidationError):
    pass


class SelfLoop(ValidationError):
    pass


class DuplicateEdge(ValidationError):
    pass


class NonPositiveFactor(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class InvalidGluing(ValidationError):
    pass


class DuplicatePosition(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class NegativeExponent(ValidationError):
    pass


class BasisMismatch(ValidationError):
    pass


class OracleLimitExceeded(ValidationError):
    pass


class NotAMetric(ValidationError):
    pass


class HypothesisViolation(MagcharError):
    exit_code = 4


class NotWeak3Generic(HypothesisViolation):
    pass


class InconsistentData(HypothesisViolation):
    pass


class MalformedTau(HypothesisViolation):
    pass


class UnrecognizedPattern(HypothesisViolation):
    pass


class NoRealization(HypothesisViolation):
    pass


class SingularSimilarityMatrix(HypothesisViolation):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class PrecisionExhausted(MagcharError):
    """Two exactly-distinct scalars could not be separated numerically."""


class TheoremViolation(MagcharError):
    pass
