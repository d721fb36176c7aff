class PfarError(Exception):
    """Base class for all errors raised by this package."""


class AssignmentIncomplete(PfarError):
    pass


class PathsNotAttached(PfarError):
    pass


class SameEndpoints(PfarError):
    pass


class InstanceTooLarge(PfarError):
    pass


class UnknownVariable(PfarError):
    pass


class MultiplePathsSelected(PfarError):
    pass


class ShapeMismatch(PfarError):
    pass


class TooFewNodes(PfarError):
    pass
