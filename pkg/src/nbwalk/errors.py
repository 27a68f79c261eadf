"""Exception types.

Every error carries the CLI exit code it maps to: 2 for invalid input or
configuration, 3 for a mathematical refusal, 4 for a resource cap.
"""


class NBWalkError(Exception):
    exit_code = 2


class InvalidInput(NBWalkError, ValueError):
    exit_code = 2


class Refusal(NBWalkError):
    exit_code = 3


class ResourceCap(NBWalkError):
    exit_code = 4


# graph
class NotRegular(InvalidInput):
    pass


class SelfLoop(InvalidInput):
    pass


class DuplicateEdge(InvalidInput):
    pass


class BadVertexId(InvalidInput):
    pass


class UnknownName(InvalidInput):
    pass


class OddDegreeSum(InvalidInput):
    pass


class EdgeListFormatError(InvalidInput):
    pass


class AttemptsExhausted(ResourceCap):
    pass


class Infeasible(Refusal):
    pass


# spectral
class NegativeInput(InvalidInput):
    pass


class DegreeTooSmall(InvalidInput):
    pass


class HorizonExceeded(ResourceCap):
    pass


class NoConvergence(ResourceCap):
    pass


class CapExceeded(ResourceCap):
    pass


class BipartiteOrDisconnected(Refusal):
    pass


# walk
class BadStart(InvalidInput):
    pass


# sieve
class NegativeMean(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class NotAPmf(InvalidInput):
    pass


class EmptyEnsemble(InvalidInput):
    pass


class OverflowRisk(ResourceCap):
    pass


class TableTooSmall(InvalidInput):
    pass


class OutOfRange(InvalidInput):
    pass


# stats
class DomainTooSmall(InvalidInput):
    pass
