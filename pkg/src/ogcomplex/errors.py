"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class OGCError(Exception):
    """Base class for every error raised by this package."""


class GraphError(OGCError, ValueError):
    pass


class OutOfRangeEndpoint(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class InadmissibleInput(GraphError):
    pass


class EdgeOutOfRange(GraphError):
    pass


class ContainsEE(GraphError):
    pass


class Disconnected(GraphError):
    pass


class ResourceLimitExceeded(OGCError):
    """A configurable enumeration or elimination cap was hit."""


class MissingBasis(OGCError):
    pass


class CorruptCache(OGCError):
    pass


class VersionMismatch(OGCError):
    pass


class UnsupportedLoopOrder(OGCError, ValueError):
    pass


class WrongStage(OGCError, ValueError):
    pass


class NotAChainMap(OGCError):
    pass


class PrimeDisagreement(OGCError):
    """Ranks over two primes differ; callers escalate to the rational oracle."""


class IncompleteRange(OGCError):
    pass
