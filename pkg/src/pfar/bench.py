"""Exact-vs-GA benchmark over generated instances of growing size."""

from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from pfar.exact import ExactConfig, SolveResult, solve_exact, solve_ilp
from pfar.ga import GaConfig, run_ga
from pfar.generator import L0_DEFAULT, L1_DEFAULT, L2_DEFAULT, FlowGenConfig, TopoConfig, gen_instance
from pfar.model import DEFAULT_MAX_PATH_LEN, check_solution

log = logging.getLogger(__name__)

CSV_HEADER = ("nodes", "flows", "optimal", "exact_s", "proven", "ga_value", "ga_s", "ratio")
DEFAULT_EXACT_LIMIT = 300.0


@dataclass
class BenchRow:
    node_count: int
    flow_count: int
    exact_objective: Optional[int]
    exact_time: Optional[float]
    exact_proven: bool
    ga_objective: Optional[int]
    ga_time: Optional[float]
    seed: int = 0
    error: Optional[str] = None

    @property
    def ratio(self) -> Optional[float]:
        """GA value over the optimum; None unless the optimum is proven."""
        if not self.exact_proven or self.ga_objective is None or self.exact_objective is None:
            return None
        if self.exact_objective == 0:
            return 1.0
        return self.ga_objective / self.exact_objective


def instance_seeds(seed: int, node_count: int) -> Tuple[int, int]:
    """Topology and flow seeds for one (run seed, size) pair."""
    base = seed * 10007 + node_count
    return 2 * base, 2 * base + 1


def parse_sizes(text: str) -> List[int]:
    """``"2..20"``, ``"5,7,9"`` or a mix like ``"2..4,10"``."""
    sizes = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            sizes.extend(range(int(lo), int(hi) + 1))
        else:
            sizes.append(int(part))
    return sizes


def _solve_exact(instance, cfg: ExactConfig, method: str) -> SolveResult:
    if method == "ilp":
        return solve_ilp(instance, cfg)
    if method == "bnb":
        return solve_exact(instance, cfg)
    raise ValueError(f"unknown exact method {method!r}")


def run_benchmark(
    sizes: Iterable[int],
    seeds: Sequence[int] = (0,),
    exact_cfg: ExactConfig = ExactConfig(time_limit=DEFAULT_EXACT_LIMIT),
    ga_cfg: GaConfig = GaConfig(),
    exact_method: str = "ilp",
    max_path_len: int = DEFAULT_MAX_PATH_LEN,
    l0: int = L0_DEFAULT,
    l1: int = L1_DEFAULT,
    l2: int = L2_DEFAULT,
    on_row: Optional[Callable[[BenchRow], None]] = None,
) -> List[BenchRow]:
    """One row per (size, seed): generate, solve exactly, run the GA.

    A failing row is recorded with its error message and the run continues.
    """
    rows = []
    for n in sizes:
        for seed in seeds:
            row = BenchRow(n, 0, None, None, False, None, None, seed=seed)
            try:
                topo_seed, flow_seed = instance_seeds(seed, n)
                inst = gen_instance(
                    TopoConfig(n, l0, l1, l2, seed=topo_seed), FlowGenConfig(seed=flow_seed), max_path_len
                )
                row.flow_count = len(inst.flows)
                t = time.perf_counter()
                exact = _solve_exact(inst, exact_cfg, exact_method)
                row.exact_time = time.perf_counter() - t
                row.exact_objective, row.exact_proven = exact.objective, exact.proven_optimal
                t = time.perf_counter()
                ga, _ = run_ga(inst, _with_seed(ga_cfg, seed))
                row.ga_time = time.perf_counter() - t
                row.ga_objective = ga.objective
                if not check_solution(inst, ga.assignment).valid:
                    raise AssertionError("GA returned an infeasible assignment")
            except Exception as exc:  # noqa: BLE001 - recorded per row
                log.exception("benchmark row nodes=%d seed=%d failed", n, seed)
                row.error = f"{type(exc).__name__}: {exc}"
            rows.append(row)
            if on_row is not None:
                on_row(row)
    return rows


def _with_seed(cfg: GaConfig, seed: int) -> GaConfig:
    if cfg.seed is not None:
        return cfg
    from dataclasses import replace

    return replace(cfg, seed=seed)


def _fmt(value, spec: str) -> str:
    return "" if value is None else format(value, spec)


def csv_row(row: BenchRow) -> List[str]:
    return [
        str(row.node_count),
        str(row.flow_count),
        _fmt(row.exact_objective, "d"),
        _fmt(row.exact_time, ".3f"),
        "true" if row.exact_proven else "false",
        _fmt(row.ga_objective, "d"),
        _fmt(row.ga_time, ".3f"),
        _fmt(row.ratio, ".4f"),
    ]


def emit_report(rows: Sequence[BenchRow]) -> Tuple[str, dict]:
    """CSV text plus a JSON-ready summary of ``rows``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(csv_row(row))
    ratios = [r.ratio for r in rows if r.ratio is not None]
    summary = {
        "rows": [dict(asdict(r), ratio=r.ratio) for r in rows],
        "proven_rows": len(ratios),
        "mean_ratio": sum(ratios) / len(ratios) if ratios else None,
        "min_ratio": min(ratios) if ratios else None,
    }
    return buf.getvalue(), summary
