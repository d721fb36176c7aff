"""Command line interface: ``pfar <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from pfar import io as pio
from pfar.bench import DEFAULT_EXACT_LIMIT, emit_report, parse_sizes, run_benchmark
from pfar.exact import ExactConfig, solve_exact, solve_ilp, solve_strict
from pfar.ga import GaConfig, run_ga
from pfar.generator import L0_DEFAULT, L1_DEFAULT, L2_DEFAULT, FlowGenConfig, TopoConfig, gen_instance
from pfar.ilp import build_ilp, decode_assignment, export_lp, read_values, verify_ilp_values
from pfar.model import DEFAULT_MAX_PATH_LEN, check_solution

log = logging.getLogger("pfar")


def _write(text: str, out) -> None:
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_gen(args) -> int:
    topo_seed, flow_seed = 2 * args.seed, 2 * args.seed + 1
    inst = gen_instance(
        TopoConfig(args.nodes, args.l0, args.l1, args.l2, seed=topo_seed),
        FlowGenConfig(seed=flow_seed),
        args.max_path_len,
    )
    _write(pio.dumps(pio.instance_to_dict(inst)), args.out)
    log.info("generated %d nodes, %d edges, %d flows", args.nodes, len(inst.network.edges), len(inst.flows))
    return 0


def cmd_export_lp(args) -> int:
    inst = pio.load_instance(args.instance)
    _write(export_lp(build_ilp(inst)), args.out)
    return 0


def _report_dict(report) -> dict:
    return {
        "valid": report.valid,
        "objective": report.objective,
        "violations": [
            {"kind": v.kind, "detail": list(v.detail) if isinstance(v.detail, tuple) else v.detail, "amount": v.amount}
            for v in report.violations
        ],
    }


def cmd_check(args) -> int:
    inst = pio.load_instance(args.instance)
    out = {}
    if args.values:
        program = build_ilp(inst)
        values = read_values(Path(args.values).read_text())
        ok, violated = verify_ilp_values(program, values)
        out["ilp_valid"] = ok
        out["violated_rows"] = violated
        if not ok:
            _write(pio.dumps(out), args.out)
            return 1
        assignment = decode_assignment(inst, values)
    else:
        assignment = pio.assignment_from_dict(inst, json.loads(Path(args.solution).read_text()))
    report = check_solution(inst, assignment)
    out.update(_report_dict(report))
    _write(pio.dumps(out), args.out)
    return 0 if report.valid else 1


def cmd_solve_exact(args) -> int:
    inst = pio.load_instance(args.instance)
    cfg = ExactConfig(time_limit=args.time_limit, node_limit=args.node_limit)
    start = time.perf_counter()
    if args.method == "ilp":
        result = solve_ilp(inst, cfg, formulation=args.formulation)
    elif args.method == "strict":
        result = solve_strict(inst, cfg)
    else:
        result = solve_exact(inst, cfg)
    elapsed = time.perf_counter() - start
    # wall-clock figures go to the log only, so the output file is reproducible
    stats = {k: v for k, v in result.stats.items() if k != "elapsed"}
    _write(pio.dumps(pio.solution_to_dict(inst, result.assignment, result.objective, result.proven_optimal, stats)), args.out)
    log.info("objective %d (proven=%s) in %.3f s", result.objective, result.proven_optimal, elapsed)
    return 0


def cmd_solve_ga(args) -> int:
    inst = pio.load_instance(args.instance)
    cfg = GaConfig(
        population_size=args.population,
        time_budget=args.budget_secs,
        seed=args.seed,
        max_generations=args.generations,
        init_path_prob=args.init_path_prob,
        mutation_path_prob=args.mutation_path_prob,
    )
    result, stats = run_ga(inst, cfg)
    _write(pio.dumps(pio.solution_to_dict(inst, result.assignment, result.objective, False, result.stats)), args.out)
    if args.stats:
        Path(args.stats).write_text(stats.to_csv())
    log.info("objective %d after %d generations in %.3f s", result.objective, stats.generations, stats.elapsed)
    return 0


def cmd_bench(args) -> int:
    sizes = parse_sizes(args.sizes)
    seeds = list(range(args.seed, args.seed + args.repeats))
    ga_cfg = GaConfig(time_budget=args.ga_budget, population_size=args.population)
    exact_cfg = ExactConfig(time_limit=args.exact_limit)

    def progress(row):
        ratio = "" if row.ratio is None else f" ratio={row.ratio:.4f}"
        log.info("nodes=%d flows=%d optimal=%s ga=%s%s", row.node_count, row.flow_count,
                 row.exact_objective, row.ga_objective, ratio)

    rows = run_benchmark(
        sizes, seeds, exact_cfg, ga_cfg, exact_method=args.exact_method,
        max_path_len=args.max_path_len, on_row=progress,
    )
    text, summary = emit_report(rows)
    _write(text, args.out)
    if args.out and args.out != "-":
        Path(args.out).with_suffix(".json").write_text(pio.dumps(summary))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pfar", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a benchmark instance")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--l0", type=int, default=L0_DEFAULT)
    g.add_argument("--l1", type=int, default=L1_DEFAULT)
    g.add_argument("--l2", type=int, default=L2_DEFAULT)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-path-len", type=int, default=DEFAULT_MAX_PATH_LEN)
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("export-lp", help="write the ILP model in CPLEX LP format")
    e.add_argument("--instance", required=True)
    e.add_argument("--out", default="-")
    e.set_defaults(func=cmd_export_lp)

    c = sub.add_parser("check", help="verify ILP variable values or a solution file")
    c.add_argument("--instance", required=True)
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--values", help="'name value' per line")
    src.add_argument("--solution", help="solution JSON")
    c.add_argument("--out", default="-")
    c.set_defaults(func=cmd_check)

    x = sub.add_parser("solve-exact", help="solve to optimality")
    x.add_argument("--instance", required=True)
    x.add_argument("--method", choices=("bnb", "ilp", "strict"), default="bnb")
    x.add_argument("--formulation", choices=("path", "full"), default="path", help="ILP model given to HiGHS")
    x.add_argument("--time-limit", type=float)
    x.add_argument("--node-limit", type=int)
    x.add_argument("--out", default="-")
    x.set_defaults(func=cmd_solve_exact)

    s = sub.add_parser("solve-ga", help="run the genetic algorithm")
    s.add_argument("--instance", required=True)
    s.add_argument("--budget-secs", type=float, default=10.0)
    s.add_argument("--generations", type=int, help="stop after this many generations (reproducible runs)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--population", type=int, default=100)
    s.add_argument("--init-path-prob", type=float, default=0.0001)
    s.add_argument("--mutation-path-prob", type=float, default=0.0001)
    s.add_argument("--out", default="-")
    s.add_argument("--stats", help="per-generation CSV")
    s.set_defaults(func=cmd_solve_ga)

    b = sub.add_parser("bench", help="compare exact and GA over instance sizes")
    b.add_argument("--sizes", default="2..20")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeats", type=int, default=1, help="seeds per size")
    b.add_argument("--ga-budget", type=float, default=10.0)
    b.add_argument("--population", type=int, default=100)
    b.add_argument("--exact-limit", type=float, default=DEFAULT_EXACT_LIMIT)
    b.add_argument("--exact-method", choices=("ilp", "bnb"), default="ilp")
    b.add_argument("--max-path-len", type=int, default=DEFAULT_MAX_PATH_LEN)
    b.add_argument("--out", default="-")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
