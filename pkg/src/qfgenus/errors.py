"""Error hierarchy with the CLI exit code each error maps to.

Exit codes: 1 is a definitive negative answer, 2 means a randomized search
ran out of budget and may be retried, 3 means an internal invariant broke.
"""


class QFGenusError(Exception):
    exit_code = 3


class NegativeResult(QFGenusError):
    exit_code = 1


class RetryableFailure(QFGenusError):
    exit_code = 2


class InvariantViolation(QFGenusError):
    exit_code = 3


# definitive negatives
class NotASquare(NegativeResult):
    pass


class NonCoprimeModuli(NegativeResult):
    pass


class BadFactorization(NegativeResult):
    pass


class NotPrimitive(NegativeResult):
    pass


class DimensionMismatch(NegativeResult):
    pass


class SingularForm(NegativeResult):
    pass


class FactorizationNeeded(NegativeResult):
    pass


class InvalidSymbol(NegativeResult):
    pass


class NotRepresentable(NegativeResult):
    pass


class NotEquivalent(NegativeResult):
    pass


class SearchSpaceTooLarge(NegativeResult):
    pass


class SchemaError(NegativeResult):
    pass


# retryable
class SearchExhausted(RetryableFailure):
    pass


class EquivalenceNotFound(RetryableFailure):
    pass


class GenerationFailed(RetryableFailure):
    pass


# bugs
class ScaleOverflow(InvariantViolation):
    pass


class NoCaseApplies(InvariantViolation):
    pass


class ChildInvalid(InvariantViolation):
    pass


class NonIntegralAssembly(InvariantViolation):
    pass


class CaseMismatch(InvariantViolation):
    pass
