"""ILP model of an instance: build, LP-format export, verification, decoding.

Variables are binary:

* ``a_i``     flow *i* is admitted
* ``r_i_m``   flow *i* is routed on its *m*-th candidate path
* ``e_i_j_l`` flow *i* may use edge *(j, l)*

All indices in variable and row names are 1-based, node numbers included:
edge ``(0, 2)`` of the network appears as ``e_i_1_3``.

Rows come in four groups, exported in this order:

1. ``c1_i``     sum_m r_i_m - a_i = 0
2. ``c2_i_m``   sum of e over the edges of path m - |path| r_i_m >= 0
3. ``c3_j_l``   sum_i bw_i e_i_j_l <= capacity(j, l)
4. ``c4_i``     sum of e over edges on no candidate path of flow i = 0
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Tuple

from pfar.errors import MultiplePathsSelected, UnknownVariable
from pfar.model import DROP, PfarInstance, RouteAssignment

ALPHA, RHO, EPSILON = "alpha", "rho", "epsilon"

Term = Tuple[int, str]


def alpha_name(i: int) -> str:
    """Name of the admission variable of 0-based flow ``i``."""
    return f"a_{i + 1}"


def rho_name(i: int, m: int) -> str:
    return f"r_{i + 1}_{m + 1}"


def epsilon_name(i: int, edge: Tuple[int, int]) -> str:
    return f"e_{i + 1}_{edge[0] + 1}_{edge[1] + 1}"


@dataclass(frozen=True)
class IlpVariable:
    kind: str
    indices: Tuple[int, ...]  # 1-based, as in the name
    name: str


@dataclass(frozen=True)
class Constraint:
    name: str
    group: int
    terms: Tuple[Term, ...]
    sense: str  # "<=", ">=", "="
    rhs: int

    def lhs(self, values: Mapping[str, int]) -> int:
        return sum(c * values.get(v, 0) for c, v in self.terms)

    def satisfied(self, values: Mapping[str, int]) -> bool:
        lhs = self.lhs(values)
        if self.sense == "<=":
            return lhs <= self.rhs
        if self.sense == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class IlpProgram:
    objective: Tuple[Term, ...]
    constraints: Tuple[Constraint, ...]
    variables: Tuple[IlpVariable, ...]

    def count(self, group: int) -> int:
        return sum(1 for c in self.constraints if c.group == group)

    def variable_names(self) -> List[str]:
        return [v.name for v in self.variables]

    def by_kind(self, kind: str) -> List[IlpVariable]:
        return [v for v in self.variables if v.kind == kind]


def build_ilp(instance: PfarInstance) -> IlpProgram:
    paths = instance.require_paths()
    net = instance.network
    prio = instance.flow_priorities
    nflows = len(instance.flows)

    variables = [IlpVariable(ALPHA, (i + 1,), alpha_name(i)) for i in range(nflows)]
    for i in range(nflows):
        variables += [IlpVariable(RHO, (i + 1, m + 1), rho_name(i, m)) for m in range(len(paths[i]))]
    for i in range(nflows):
        variables += [
            IlpVariable(EPSILON, (i + 1, e[0] + 1, e[1] + 1), epsilon_name(i, e)) for e in net.edges
        ]

    objective = tuple((prio[i], alpha_name(i)) for i in range(nflows))

    rows = []
    for i in range(nflows):
        terms = tuple((1, rho_name(i, m)) for m in range(len(paths[i]))) + ((-1, alpha_name(i)),)
        rows.append(Constraint(f"c1_{i + 1}", 1, terms, "=", 0))
    for i in range(nflows):
        for m, path in enumerate(paths[i]):
            terms = tuple((1, epsilon_name(i, e)) for e in path) + ((-len(path), rho_name(i, m)),)
            rows.append(Constraint(f"c2_{i + 1}_{m + 1}", 2, terms, ">=", 0))
    for e in net.edges:
        terms = tuple((f.bandwidth, epsilon_name(i, e)) for i, f in enumerate(instance.flows))
        rows.append(Constraint(f"c3_{e[0] + 1}_{e[1] + 1}", 3, terms, "<=", net.capacity[e]))
    for i in range(nflows):
        used = {e for path in paths[i] for e in path}
        unused = [e for e in net.edges if e not in used]
        if unused:
            rows.append(Constraint(f"c4_{i + 1}", 4, tuple((1, epsilon_name(i, e)) for e in unused), "=", 0))

    return IlpProgram(objective, tuple(rows), tuple(variables))


_LINE_WIDTH = 250


def _linear(terms, prefix: str) -> List[str]:
    """Render ``terms`` as one or more LP-format lines starting with ``prefix``."""
    pieces = []
    for k, (c, v) in enumerate(terms):
        if k == 0:
            pieces.append(f"{c} {v}")
        elif c < 0:
            pieces.append(f"- {-c} {v}")
        else:
            pieces.append(f"+ {c} {v}")
    lines = []
    line = prefix
    for piece in pieces:
        if len(line) + len(piece) + 1 > _LINE_WIDTH and line.strip():
            lines.append(line)
            line = "   "
        line = f"{line} {piece}" if line.strip() else f"{line}{piece}"
    lines.append(line)
    return lines


def export_lp(program: IlpProgram) -> str:
    """CPLEX LP text for ``program``; integer coefficients only."""
    out = ["\\ Priority flow admission and routing", "Maximize"]
    if program.objective:
        out += _linear(program.objective, " obj:")
    else:
        out.append(" obj: 0")
    out.append("Subject To")
    for row in program.constraints:
        if not row.terms:
            continue
        lines = _linear(row.terms, f" {row.name}:")
        lines[-1] += f" {row.sense} {row.rhs}"
        out += lines
    if program.variables:
        out.append("Binary")
        out += [f" {v.name}" for v in program.variables]
    out.append("End")
    return "\n".join(out) + "\n"


def read_values(text: str) -> Dict[str, int]:
    """Parse a ``name value`` per line solution file; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'name value', got {raw!r}")
        name, val = parts
        number = float(val)
        if number != int(number):
            raise ValueError(f"line {lineno}: {name} = {val} is not integral")
        values[name] = int(number)
    return values


def write_values(values: Mapping[str, int]) -> str:
    return "".join(f"{k} {v}\n" for k, v in values.items())


def verify_ilp_values(program: IlpProgram, values: Mapping[str, int]) -> Tuple[bool, List[str]]:
    """Check every row and every binary domain.

    Variables absent from ``values`` count as 0. Returns ``(ok, violated)``
    where ``violated`` lists row names and ``binary:<var>`` entries.
    """
    known = set(program.variable_names())
    unknown = sorted(set(values) - known)
    if unknown:
        raise UnknownVariable(f"not in the program: {', '.join(unknown[:5])}")
    violated = [f"binary:{k}" for k, v in values.items() if v not in (0, 1)]
    violated += [row.name for row in program.constraints if not row.satisfied(values)]
    return not violated, violated


def assignment_to_values(instance: PfarInstance, assignment: RouteAssignment) -> Dict[str, int]:
    """Minimal variable values encoding ``assignment``: e set only on chosen edges."""
    program_vars = build_variable_names(instance)
    values = dict.fromkeys(program_vars, 0)
    for i, path in enumerate(assignment.chosen_paths(instance)):
        m = assignment.choice[i]
        if m is DROP:
            continue
        values[alpha_name(i)] = 1
        values[rho_name(i, m)] = 1
        for e in path:
            values[epsilon_name(i, e)] = 1
    return values


def build_variable_names(instance: PfarInstance) -> List[str]:
    paths = instance.require_paths()
    n = len(instance.flows)
    names = [alpha_name(i) for i in range(n)]
    names += [rho_name(i, m) for i in range(n) for m in range(len(paths[i]))]
    names += [epsilon_name(i, e) for i in range(n) for e in instance.network.edges]
    return names


def decode_assignment(instance: PfarInstance, values: Mapping[str, int]) -> RouteAssignment:
    """Pick, per flow, the path whose r variable is 1; DROP when there is none."""
    paths = instance.require_paths()
    choice = []
    for i in range(len(instance.flows)):
        chosen = [m for m in range(len(paths[i])) if values.get(rho_name(i, m), 0) == 1]
        if len(chosen) > 1:
            raise MultiplePathsSelected(f"flow {i + 1} selects paths {[m + 1 for m in chosen]}")
        choice.append(chosen[0] if chosen else DROP)
    return RouteAssignment(tuple(choice))
