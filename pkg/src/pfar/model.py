"""Core domain types, path validity, feasibility checks and the objective.

Nodes are dense integer indices ``0..node_count-1``. A path is a tuple of
directed edges ``((u, v), (v, w), ...)``; the empty tuple is the DROP path.
All types are immutable after construction.
"""

from __future__ import annotations

import dataclasses
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Tuple

from pfar.errors import AssignmentIncomplete, PathsNotAttached

Edge = Tuple[int, int]
Path = Tuple[Edge, ...]

#: Value stored in a :class:`RouteAssignment` for a flow that is not admitted.
DROP = None

DEFAULT_HEADER_BITS = 32
DEFAULT_MAX_PATH_LEN = 4


def path_nodes(path: Path) -> Tuple[int, ...]:
    """Node sequence visited by a chained path (empty for DROP)."""
    if not path:
        return ()
    return (path[0][0],) + tuple(e[1] for e in path)


def path_from_nodes(nodes: Sequence[int]) -> Path:
    return tuple((nodes[k], nodes[k + 1]) for k in range(len(nodes) - 1))


def header_from_int(value: int, bits: int = DEFAULT_HEADER_BITS) -> str:
    """Fixed-width big-endian bit string for ``value``."""
    if value < 0 or value >= 1 << bits:
        raise ValueError(f"{value} does not fit in {bits} header bits")
    return format(value, f"0{bits}b")


@dataclass(frozen=True)
class Network:
    """Directed graph with positive integer per-edge bandwidth capacities.

    Edges are kept in ascending lexicographic order regardless of the order
    they were supplied in.
    """

    node_count: int
    capacity: Mapping[Edge, int]
    edges: Tuple[Edge, ...] = field(init=False)
    edge_index: Mapping[Edge, int] = field(init=False, repr=False, compare=False)
    successors: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("a network needs at least one node")
        cap = {}
        for (u, v), c in self.capacity.items():
            u, v, c = int(u), int(v), int(c)
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"edge ({u}, {v}) references an unknown node")
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if (u, v) in cap:
                raise ValueError(f"duplicate edge ({u}, {v})")
            if c < 1:
                raise ValueError(f"edge ({u}, {v}) has capacity {c} < 1")
            cap[(u, v)] = c
        edges = tuple(sorted(cap))
        succ = [[] for _ in range(self.node_count)]
        for u, v in edges:
            succ[u].append(v)
        object.__setattr__(self, "capacity", {e: cap[e] for e in edges})
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "edge_index", {e: k for k, e in enumerate(edges)})
        object.__setattr__(self, "successors", tuple(tuple(s) for s in succ))

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[Tuple[int, int, int]]) -> "Network":
        """Build from ``(src, dst, capacity)`` triples."""
        cap = {}
        for u, v, c in edges:
            if (u, v) in cap:
                raise ValueError(f"duplicate edge ({u}, {v})")
            cap[(u, v)] = c
        return cls(node_count, cap)

    def capacity_vector(self) -> list:
        return [self.capacity[e] for e in self.edges]

    def out_capacity(self, node: int) -> int:
        return sum(self.capacity[(node, v)] for v in self.successors[node])


@dataclass(frozen=True)
class Flow:
    src: int
    dst: int
    bandwidth: int
    header: str = "0" * DEFAULT_HEADER_BITS

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError(f"flow source and destination are both {self.src}")
        if self.bandwidth < 1:
            raise ValueError(f"flow bandwidth {self.bandwidth} < 1")
        if not self.header or set(self.header) - {"0", "1"}:
            raise ValueError(f"header must be a non-empty bit string, got {self.header!r}")


@dataclass(frozen=True)
class PriorityFn:
    """Maps header bit patterns to non-negative priorities.

    Headers absent from ``table`` get ``default``.
    """

    table: Mapping[str, int] = field(default_factory=dict)
    default: int = 1

    def __post_init__(self):
        if self.default < 0 or any(p < 0 for p in self.table.values()):
            raise ValueError("priorities must be non-negative")

    def lookup(self, header: str) -> int:
        return self.table.get(header, self.default)


@dataclass(frozen=True)
class PfarInstance:
    """A network, an ordered flow list, a priority function and per-flow paths.

    ``paths`` is ``None`` until :func:`pfar.paths.attach_paths` fills it with
    one ordered tuple of candidate paths per flow.
    """

    network: Network
    flows: Tuple[Flow, ...]
    priorities: PriorityFn = field(default_factory=PriorityFn)
    max_path_len: int = DEFAULT_MAX_PATH_LEN
    paths: Optional[Tuple[Tuple[Path, ...], ...]] = None
    header_bits: int = DEFAULT_HEADER_BITS
    meta: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "flows", tuple(self.flows))
        n = self.network.node_count
        for i, f in enumerate(self.flows, start=1):
            if not (0 <= f.src < n and 0 <= f.dst < n):
                raise ValueError(f"flow {i} references a node outside 0..{n - 1}")
        if self.max_path_len < 1:
            raise ValueError("max_path_len must be >= 1")
        if self.paths is not None:
            paths = tuple(tuple(p) for p in self.paths)
            if len(paths) != len(self.flows):
                raise ValueError("one path list per flow is required")
            object.__setattr__(self, "paths", paths)

    @cached_property
    def flow_priorities(self) -> Tuple[int, ...]:
        return tuple(self.priorities.lookup(f.header) for f in self.flows)

    @property
    def priority_bound(self) -> int:
        """Objective if every flow could be admitted."""
        return sum(self.flow_priorities)

    def require_paths(self) -> Tuple[Tuple[Path, ...], ...]:
        if self.paths is None:
            raise PathsNotAttached("call attach_paths() on the instance first")
        return self.paths

    def with_paths(self, paths) -> "PfarInstance":
        return dataclasses.replace(self, paths=paths)


@dataclass(frozen=True)
class RouteAssignment:
    """Per-flow choice: an index into that flow's path list, or DROP (None)."""

    choice: Tuple[Optional[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "choice", tuple(self.choice))

    @classmethod
    def all_drop(cls, flow_count: int) -> "RouteAssignment":
        return cls((DROP,) * flow_count)

    @classmethod
    def from_mapping(cls, instance: PfarInstance, mapping: Mapping[int, Optional[int]]) -> "RouteAssignment":
        """Build from ``{flow_index (1-based): path_index (0-based) | None}``."""
        missing = [i for i in range(1, len(instance.flows) + 1) if i not in mapping]
        if missing:
            raise AssignmentIncomplete(f"no decision for flows {missing}")
        return cls(tuple(mapping[i] for i in range(1, len(instance.flows) + 1)))

    def __len__(self):
        return len(self.choice)

    def admitted(self) -> Tuple[int, ...]:
        """0-based indices of flows that are not dropped."""
        return tuple(i for i, m in enumerate(self.choice) if m is not DROP)

    def chosen_paths(self, instance: PfarInstance) -> Tuple[Path, ...]:
        paths = instance.require_paths()
        return tuple(() if m is DROP else paths[i][m] for i, m in enumerate(self.choice))


@dataclass(frozen=True)
class Violation:
    kind: str  # "path-invalid" | "capacity-exceeded"
    detail: object  # flow index (1-based) or edge
    amount: int


@dataclass(frozen=True)
class CheckReport:
    valid: bool
    objective: int
    violations: Tuple[Violation, ...] = ()


def validate_path(network: Network, flow: Flow, path: Path) -> bool:
    """True iff ``path`` is DROP or a simple chained path from flow.src to flow.dst."""
    if not path:
        return True
    if path[0][0] != flow.src or path[-1][1] != flow.dst:
        return False
    for k, e in enumerate(path):
        if e not in network.edge_index:
            return False
        if k and path[k - 1][1] != e[0]:
            return False
    nodes = path_nodes(path)
    return len(set(nodes)) == len(nodes)


def _require_complete(instance: PfarInstance, assignment: RouteAssignment) -> None:
    if len(assignment.choice) != len(instance.flows):
        raise AssignmentIncomplete(
            f"assignment covers {len(assignment.choice)} flows, instance has {len(instance.flows)}"
        )


def objective_value(instance: PfarInstance, assignment: RouteAssignment) -> int:
    _require_complete(instance, assignment)
    prio = instance.flow_priorities
    return sum(prio[i] for i in assignment.admitted())


def _resolve_path(instance: PfarInstance, i: int, m: Optional[int]) -> Optional[Path]:
    """Path object for choice ``m`` of flow ``i``; None if the index is bad."""
    if m is DROP:
        return ()
    paths = instance.require_paths()[i]
    if not isinstance(m, int) or not 0 <= m < len(paths):
        return None
    return paths[m]


def residual_capacities(instance: PfarInstance, assignment: RouteAssignment) -> dict:
    """Capacity minus routed bandwidth per edge; negative when overloaded."""
    _require_complete(instance, assignment)
    net = instance.network
    residual = dict(net.capacity)
    for i, m in enumerate(assignment.choice):
        path = _resolve_path(instance, i, m)
        if not path:
            continue
        bw = instance.flows[i].bandwidth
        for e in path:
            if e in residual:
                residual[e] -= bw
    return residual


def check_solution(instance: PfarInstance, assignment: RouteAssignment) -> CheckReport:
    _require_complete(instance, assignment)
    violations = []
    net = instance.network
    for i, m in enumerate(assignment.choice):
        path = _resolve_path(instance, i, m)
        if path is None or not validate_path(net, instance.flows[i], path):
            violations.append(Violation("path-invalid", i + 1, instance.flows[i].bandwidth))
    residual = residual_capacities(instance, assignment)
    for e in net.edges:
        if residual[e] < 0:
            violations.append(Violation("capacity-exceeded", e, net.capacity[e] - residual[e]))
    return CheckReport(
        valid=not violations,
        objective=objective_value(instance, assignment),
        violations=tuple(violations),
    )


def _reaches_all(n: int, adj: Sequence[Sequence[int]]) -> bool:
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    return all(seen)


def is_connected(network: Network) -> bool:
    """Strong connectivity: every node reaches every other along directed edges."""
    n = network.node_count
    pred = [[] for _ in range(n)]
    for u, v in network.edges:
        pred[v].append(u)
    return _reaches_all(n, network.successors) and _reaches_all(n, pred)


@dataclass(frozen=True)
class CompiledInstance:
    """Index-based view used by the solvers' inner loops.

    ``path_edges[i][m]`` holds the edge indices (into ``network.edges``) of
    candidate path ``m`` of flow ``i``.
    """

    path_edges: Tuple[Tuple[Tuple[int, ...], ...], ...]
    bandwidth: Tuple[int, ...]
    priority: Tuple[int, ...]
    capacity: Tuple[int, ...]


def compile_instance(instance: PfarInstance) -> CompiledInstance:
    paths = instance.require_paths()
    index = instance.network.edge_index
    shared = {}
    path_edges = []
    for plist in paths:
        key = id(plist)
        if key not in shared:
            shared[key] = tuple(tuple(index[e] for e in p) for p in plist)
        path_edges.append(shared[key])
    return CompiledInstance(
        path_edges=tuple(path_edges),
        bandwidth=tuple(f.bandwidth for f in instance.flows),
        priority=instance.flow_priorities,
        capacity=tuple(instance.network.capacity_vector()),
    )
