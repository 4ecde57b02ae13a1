"""Exception hierarchy shared by all modules."""


class SteinerCutError(Exception):
    """Base class for all errors raised by this package."""


class EmptySideError(SteinerCutError):
    """Cut side is empty."""


class FullSideError(SteinerCutError):
    """Cut side is the whole vertex set."""


class UnknownEdgeIdError(SteinerCutError):
    """Edge id does not exist in the graph."""


class SelfLoopError(SteinerCutError):
    """Self loops are rejected."""


class OverlappingGroupsError(SteinerCutError):
    """Contraction groups are not disjoint."""


class NotConnectedError(SteinerCutError):
    """Operation requires a connected graph."""


class NotEnoughTerminalsError(SteinerCutError):
    """Operation requires at least two terminals."""


class OverlappingTerminalsError(SteinerCutError):
    """Flow sources and sinks intersect."""


class SameVertexError(SteinerCutError):
    """Query requires two distinct vertices."""


class SameEdgeError(SteinerCutError):
    """Query requires two distinct edges."""


class TooLargeError(SteinerCutError):
    """Instance exceeds the exhaustive-enumeration guard."""


class NotABunchError(SteinerCutError):
    """Terminal subset is not separated at mincut capacity."""


class NotAClassError(SteinerCutError):
    """Vertex set is not a connectivity class."""


class VertexNotInClassError(SteinerCutError):
    """Vertex does not belong to the queried class."""


class KTooLargeForSmallMincutError(SteinerCutError):
    """Multi-vertex membership query requires class-graph mincut >= 4."""


class NotAProperPathError(SteinerCutError):
    """Path is not a proper path of the skeleton."""


class InvalidMinimalCutError(SteinerCutError):
    """Argument is not a minimal cut of the skeleton."""


class IntraUnitEdgeError(SteinerCutError):
    """Edge has both endpoints in one connectivity class."""


class ClassHasTerminalError(SteinerCutError):
    """Covering construction requires a class without terminals."""


class NoWitnessError(SteinerCutError):
    """No witness cut exists for the decision."""


class IncompleteFamilyError(SteinerCutError):
    """Cut family for the labeling pass is incomplete."""


class InfeasibleParametersError(SteinerCutError):
    """Generator parameters cannot produce a valid instance."""


class ConstructionError(SteinerCutError):
    """An internal structural invariant failed during construction."""
