"""Exception taxonomy shared across the package."""


class TeamSimError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(TeamSimError):
    pass


class UnknownNode(GraphError):
    pass


class DuplicateNode(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class MissingEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class EmptySubgraph(GraphError):
    pass


class Disconnected(GraphError):
    """Raised when an operation requires a connected subgraph."""


class PatternError(TeamSimError):
    pass


class UnknownPatternNode(PatternError):
    pass


class DuplicatePatternNode(PatternError):
    pass


class DuplicatePatternEdge(PatternError):
    pass


class MissingPatternEdge(PatternError):
    pass


class InvalidInterval(PatternError):
    pass


class DisconnectedPattern(PatternError):
    """Pattern graphs must stay connected."""


# Update-set rejection uses the same condition; kept as an alias so both
# names from the public contracts resolve to one exception type.
PatternDisconnected = DisconnectedPattern


class EmptyPattern(PatternError):
    pass


class UnsatisfiablePattern(PatternError):
    pass


class InvalidH(TeamSimError):
    pass


class UnknownBall(TeamSimError):
    pass


class InvalidConfig(TeamSimError):
    pass


class ParseError(TeamSimError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SnapshotError(TeamSimError):
    pass
