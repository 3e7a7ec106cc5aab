"""Exception hierarchy shared by every module."""


class ModkError(Exception):
    """Base class for all library errors."""


class ContractViolation(ModkError, ValueError):
    """An instance or parameter breaks the contract of its problem family."""


class InvalidTrivialDegree(ContractViolation):
    pass


class NonBipartiteOutput(ContractViolation):
    pass


class NoTrivialVertex(ContractViolation):
    pass


class InvalidParameters(ContractViolation):
    pass


class PreconditionFailed(ContractViolation):
    pass


class NotPrime(ContractViolation):
    pass


class NotDivisor(ContractViolation):
    pass


class PrimesNotDistinct(ContractViolation):
    pass


class TrivialDegenerate(ContractViolation):
    """Edge filtering changed the degree of the trivial vertex."""


class MalformedCandidate(ModkError, ValueError):
    """A candidate solution does not fit the instance (width or tag)."""


class KindMismatch(ModkError, TypeError):
    pass


class PullbackError(ModkError):
    """A pull-back could not produce a valid witness.

    Raised only when the output solution is not actually a solution, or when a
    construction is buggy; it never signals a legitimate outcome.
    """


class NoMultiplier(ModkError, ValueError):
    pass


class NotCoprime(ModkError, ValueError):
    pass


class RankOutOfRange(ModkError, ValueError):
    pass


class SearchSpaceTooLarge(ModkError):
    pass


class NoSolutionFound(ModkError):
    pass


class PlanNondeterminism(ModkError):
    pass


class PlanError(ModkError):
    """A query plan is degenerate or exceeds its declared bounds."""
