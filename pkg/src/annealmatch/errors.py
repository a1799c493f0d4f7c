"""Exception hierarchy shared across the matcher."""


class MatcherError(Exception):
    """Base class for every error raised by annealmatch."""


class MalformedInput(MatcherError):
    """Input bytes are not well-formed in the declared format."""


class CyclicHierarchy(MatcherError):
    pass


class EmptyOntology(MatcherError):
    pass


class UnknownEntity(MatcherError, KeyError):
    pass


class KindMismatch(MatcherError, TypeError):
    pass


class EmptyName(MatcherError, ValueError):
    pass


class EmptyBag(MatcherError, ValueError):
    pass


class NoMoveAvailable(MatcherError):
    pass


class DuplicateCell(MalformedInput):
    pass


class MissingReference(MatcherError):
    pass


class TaskLoadFailure(MatcherError):
    pass
