"""Priority flow admission and routing: exact and genetic solvers.

Admit a subset of prioritized flows into a capacitated directed network,
routing each admitted flow on a simple path, so that the total admitted
priority is maximal (exact) or close to it within a time budget (GA).
"""

from pfar.errors import (
    AssignmentIncomplete,
    InstanceTooLarge,
    MultiplePathsSelected,
    PathsNotAttached,
    PfarError,
    SameEndpoints,
    ShapeMismatch,
    TooFewNodes,
    UnknownVariable,
)
from pfar.model import (
    DROP,
    CheckReport,
    Flow,
    Network,
    PfarInstance,
    PriorityFn,
    RouteAssignment,
    Violation,
    check_solution,
    is_connected,
    objective_value,
    residual_capacities,
    validate_path,
)
from pfar.paths import PathEnumConfig, attach_paths, enumerate_paths

__all__ = [
    "DROP",
    "AssignmentIncomplete",
    "CheckReport",
    "Flow",
    "InstanceTooLarge",
    "MultiplePathsSelected",
    "Network",
    "PathEnumConfig",
    "PathsNotAttached",
    "PfarError",
    "PfarInstance",
    "PriorityFn",
    "RouteAssignment",
    "SameEndpoints",
    "ShapeMismatch",
    "TooFewNodes",
    "UnknownVariable",
    "Violation",
    "attach_paths",
    "check_solution",
    "enumerate_paths",
    "is_connected",
    "objective_value",
    "residual_capacities",
    "validate_path",
]

__version__ = "0.1.0"
