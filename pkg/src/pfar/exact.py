"""Exact solvers.

* :func:`solve_brute_force` exhaustive oracle for small instances.
* :func:`solve_exact` depth-first branch-and-bound, dependency-free.
* :func:`solve_strict` priority classes solved one after another.
* :func:`solve_ilp` builds the ILP model and hands it to the HiGHS MILP
  solver shipped with scipy, then decodes the path variables.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from pfar.errors import InstanceTooLarge
from pfar.ilp import assignment_to_values, build_ilp, decode_assignment, rho_name, verify_ilp_values
from pfar.model import DROP, PfarInstance, RouteAssignment, compile_instance, objective_value

BRUTE_FORCE_LIMIT = 10**7


@dataclass(frozen=True)
class ExactConfig:
    time_limit: Optional[float] = None  # seconds
    node_limit: Optional[int] = None

    def __post_init__(self):
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValueError("node_limit must be positive")


@dataclass
class SolveResult:
    assignment: RouteAssignment
    objective: int
    proven_optimal: bool
    stats: Dict[str, object] = field(default_factory=dict)


def search_space_size(instance: PfarInstance) -> int:
    """Number of complete assignments: product over flows of (paths + 1)."""
    return math.prod(len(p) + 1 for p in instance.require_paths())


def solve_brute_force(instance: PfarInstance) -> SolveResult:
    """Enumerate every feasible combination of per-flow choices.

    Choices are tried in order (each path, then DROP). Partial assignments that
    already overload an edge are abandoned, which is exact because loads only
    grow. No objective bound is used.
    """
    size = search_space_size(instance)
    if size > BRUTE_FORCE_LIMIT:
        raise InstanceTooLarge(f"{size} assignments exceed the brute-force limit {BRUTE_FORCE_LIMIT}")
    start = time.perf_counter()
    ci = compile_instance(instance)
    n = len(ci.bandwidth)
    residual = list(ci.capacity)
    choice: List[Optional[int]] = [DROP] * n
    best = [-1, None]
    leaves = 0

    def visit(i: int, value: int) -> None:
        nonlocal leaves
        if i == n:
            leaves += 1
            if value > best[0]:
                best[0], best[1] = value, tuple(choice)
            return
        bw = ci.bandwidth[i]
        for m, edges in enumerate(ci.path_edges[i]):
            if all(residual[e] >= bw for e in edges):
                for e in edges:
                    residual[e] -= bw
                choice[i] = m
                visit(i + 1, value + ci.priority[i])
                for e in edges:
                    residual[e] += bw
        choice[i] = DROP
        visit(i + 1, value)

    visit(0, 0)
    assignment = RouteAssignment(best[1])
    return SolveResult(
        assignment,
        best[0],
        True,
        {"leaves": leaves, "elapsed": time.perf_counter() - start},
    )


class _Search:
    """Depth-first branch-and-bound over a subset of flows.

    Flows are branched in non-increasing priority order (ties by index). At
    every node the bound is the value admitted so far plus the priorities of
    all undecided flows.
    """

    def __init__(self, ci, flows: Sequence[int], capacity: Sequence[int], cfg: ExactConfig, trace=None):
        self.ci = ci
        self.order = sorted(flows, key=lambda i: (-ci.priority[i], i))
        prio = [ci.priority[i] for i in self.order]
        self.suffix = [0] * (len(prio) + 1)
        for k in range(len(prio) - 1, -1, -1):
            self.suffix[k] = self.suffix[k + 1] + prio[k]
        self.residual = list(capacity)
        self.cfg = cfg
        self.trace = trace

    def run(self):
        ci, order, suffix, residual = self.ci, self.order, self.suffix, self.residual
        depth = len(order)
        cfg = self.cfg
        deadline = None if cfg.time_limit is None else time.perf_counter() + cfg.time_limit
        choice = {i: DROP for i in order}
        best_value, best_choice = 0, dict(choice)
        nodes = 0
        interrupted = False

        # frame: [level, next option, applied path edges or None, value at node]
        stack = []

        def enter(level, value):
            nonlocal nodes, best_value, best_choice
            nodes += 1
            bound = value + suffix[level]
            if self.trace is not None:
                self.trace(level, [choice[i] for i in order[:level]], value, bound)
            if level == depth:
                if value > best_value:
                    best_value, best_choice = value, dict(choice)
                return
            if bound <= best_value:
                return
            stack.append([level, 0, None, value])

        enter(0, 0)
        while stack:
            if cfg.node_limit is not None and nodes >= cfg.node_limit:
                interrupted = True
                break
            if deadline is not None and nodes % 256 == 0 and time.perf_counter() > deadline:
                interrupted = True
                break
            frame = stack[-1]
            level, opt, applied, value = frame
            i = order[level]
            bw = ci.bandwidth[i]
            if applied is not None:
                for e in applied:
                    residual[e] += bw
                frame[2] = None
            if value + suffix[level] <= best_value:
                stack.pop()
                choice[i] = DROP
                continue
            options = ci.path_edges[i]
            while opt < len(options) and not all(residual[e] >= bw for e in options[opt]):
                opt += 1
            if opt < len(options):
                edges = options[opt]
                for e in edges:
                    residual[e] -= bw
                frame[1], frame[2] = opt + 1, edges
                choice[i] = opt
                enter(level + 1, value + ci.priority[i])
            elif opt == len(options):
                frame[1] = opt + 1
                choice[i] = DROP
                enter(level + 1, value)
            else:
                stack.pop()
                choice[i] = DROP

        bound = best_value
        if interrupted:
            bound = max([best_value] + [f[3] + suffix[f[0]] for f in stack])
        return best_choice, best_value, not interrupted, nodes, bound


def _result_from_choice(instance, choice_map, proven, stats):
    n = len(instance.flows)
    assignment = RouteAssignment(tuple(choice_map.get(i, DROP) for i in range(n)))
    return SolveResult(assignment, objective_value(instance, assignment), proven, stats)


def solve_exact(
    instance: PfarInstance,
    cfg: ExactConfig = ExactConfig(),
    trace: Optional[Callable] = None,
) -> SolveResult:
    """Branch-and-bound with paths tried in candidate order and DROP last.

    ``trace(level, prefix_choices, value, bound)`` is called at every search
    node when given. If a limit in ``cfg`` stops the search the best
    incumbent is returned with ``proven_optimal=False``.
    """
    start = time.perf_counter()
    ci = compile_instance(instance)
    search = _Search(ci, range(len(ci.bandwidth)), ci.capacity, cfg, trace)
    choice, value, proven, nodes, bound = search.run()
    stats = {"nodes_explored": nodes, "bound": bound, "elapsed": time.perf_counter() - start}
    result = _result_from_choice(instance, choice, proven, stats)
    assert result.objective == value
    return result


def solve_strict(instance: PfarInstance, cfg: ExactConfig = ExactConfig()) -> SolveResult:
    """Solve priority classes in decreasing order on the residual network.

    Each class is solved to optimality on what the higher classes left, so no
    set of lower-priority flows displaces a higher-priority one. ``cfg``
    limits apply per class.
    """
    start = time.perf_counter()
    ci = compile_instance(instance)
    classes: Dict[int, List[int]] = {}
    for i, p in enumerate(ci.priority):
        classes.setdefault(p, []).append(i)
    residual = list(ci.capacity)
    merged = {}
    proven = True
    nodes = 0
    for p in sorted(classes, reverse=True):
        search = _Search(ci, classes[p], residual, cfg)
        choice, _, ok, n, _ = search.run()
        proven &= ok
        nodes += n
        for i, m in choice.items():
            merged[i] = m
            if m is not DROP:
                for e in ci.path_edges[i][m]:
                    residual[e] -= ci.bandwidth[i]
    stats = {"nodes_explored": nodes, "classes": len(classes), "elapsed": time.perf_counter() - start}
    return _result_from_choice(instance, merged, proven, stats)


def _full_model(instance):
    """Matrix form of the full ILP model: (names, objective, rows, cols, data, lo, hi)."""
    program = build_ilp(instance)
    names = program.variable_names()
    col = {name: k for k, name in enumerate(names)}
    c = np.zeros(len(names))
    for coef, name in program.objective:
        c[col[name]] = coef
    rows, cols, data, lo, hi = [], [], [], [], []
    r = 0
    for row in program.constraints:
        if not row.terms:
            continue
        for coef, name in row.terms:
            rows.append(r)
            cols.append(col[name])
            data.append(coef)
        lo.append(-np.inf if row.sense == "<=" else row.rhs)
        hi.append(np.inf if row.sense == ">=" else row.rhs)
        r += 1
    return names, c, (rows, cols, data, lo, hi)


def _path_model(instance):
    """Route variables only, plus dominance rows.

    Rows: at most one path per flow; per-edge load of the chosen paths within
    capacity. Among flows sharing endpoints and priority, sorted by
    (bandwidth, index), a flow may only be admitted if its predecessor is;
    swapping the two never hurts, so some optimum always satisfies this.
    """
    ci = compile_instance(instance)
    paths = instance.require_paths()
    nflows, nedges = len(ci.bandwidth), len(ci.capacity)
    names, c, owner = [], [], []
    for i, plist in enumerate(ci.path_edges):
        for m in range(len(plist)):
            names.append(rho_name(i, m))
            c.append(ci.priority[i])
            owner.append((i, m))
    rows, cols, data = [], [], []
    by_flow: Dict[int, List[int]] = {}
    for k, (i, m) in enumerate(owner):
        by_flow.setdefault(i, []).append(k)
        rows.append(i)
        cols.append(k)
        data.append(1)
        for e in ci.path_edges[i][m]:
            rows.append(nflows + e)
            cols.append(k)
            data.append(ci.bandwidth[i])
    hi = [1.0] * nflows + [float(x) for x in ci.capacity]
    r = nflows + nedges
    groups: Dict[tuple, List[int]] = {}
    for i, f in enumerate(instance.flows):
        if paths[i]:
            groups.setdefault((f.src, f.dst, ci.priority[i]), []).append(i)
    for members in groups.values():
        members.sort(key=lambda i: (ci.bandwidth[i], i))
        for a, b in zip(members, members[1:]):
            for k in by_flow[b]:
                rows.append(r)
                cols.append(k)
                data.append(1)
            for k in by_flow[a]:
                rows.append(r)
                cols.append(k)
                data.append(-1)
            hi.append(0.0)
            r += 1
    lo = [-np.inf] * len(hi)
    return names, np.array(c, dtype=float), (rows, cols, data, lo, hi)


def solve_ilp(instance: PfarInstance, cfg: ExactConfig = ExactConfig(), formulation: str = "path") -> SolveResult:
    """Solve the ILP with HiGHS and decode the route variables.

    ``formulation="full"`` hands HiGHS the model exactly as :func:`build_ilp`
    writes it. ``"path"`` (default) solves the equivalent route-only model,
    whose LP relaxation is much tighter. Either way the decoded assignment is
    encoded back into full-model values and verified against every row.

    ``proven_optimal`` is True only when HiGHS reports optimality with a zero
    relative gap. Without any incumbent the result is all DROP.
    """
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import coo_matrix

    start = time.perf_counter()
    if formulation == "full":
        names, c, (rows, cols, data, lo, hi) = _full_model(instance)
    elif formulation == "path":
        names, c, (rows, cols, data, lo, hi) = _path_model(instance)
    else:
        raise ValueError(f"unknown formulation {formulation!r}")

    options = {"mip_rel_gap": 0.0, "disp": False}
    if cfg.time_limit is not None:
        options["time_limit"] = cfg.time_limit
    if cfg.node_limit is not None:
        options["node_limit"] = cfg.node_limit
    if names:
        constraints = []
        if hi:
            a = coo_matrix((data, (rows, cols)), shape=(len(hi), len(names))).tocsr()
            constraints.append(LinearConstraint(a, np.array(lo), np.array(hi)))
        res = milp(
            -c,
            constraints=constraints,
            integrality=np.ones(len(names)),
            bounds=Bounds(0, 1),
            options=options,
        )
        status, x = res.status, res.x
        dual_bound = None if getattr(res, "mip_dual_bound", None) is None else -res.mip_dual_bound
    else:
        status, x, dual_bound = 0, np.zeros(0), 0.0

    if x is None:
        assignment = RouteAssignment.all_drop(len(instance.flows))
        proven = False
    else:
        values = {name: int(round(v)) for name, v in zip(names, x)}
        assignment = decode_assignment(instance, values)
        proven = status == 0
    ok, violated = verify_ilp_values(build_ilp(instance), assignment_to_values(instance, assignment))
    if not ok:
        raise RuntimeError(f"MILP solution violates {violated[:5]}")
    stats = {
        "solver": "highs",
        "formulation": formulation,
        "status": int(status),
        "bound": dual_bound,
        "elapsed": time.perf_counter() - start,
    }
    return SolveResult(assignment, objective_value(instance, assignment), proven, stats)
