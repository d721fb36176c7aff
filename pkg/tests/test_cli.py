import json
import subprocess
import sys

import pytest

from pfar.cli import main
from pfar.ilp import assignment_to_values, write_values
from pfar.io import dumps, instance_to_dict, load_instance
from pfar.model import DROP, RouteAssignment
from pfar.samples import example_instance


@pytest.fixture
def example_file(tmp_path):
    path = tmp_path / "example.json"
    path.write_text(dumps(instance_to_dict(example_instance())))
    return path


def test_gen(tmp_path):
    out = tmp_path / "inst.json"
    assert main(["gen", "--nodes", "7", "--seed", "3", "--out", str(out)]) == 0
    inst = load_instance(out)
    assert inst.network.node_count == 7
    assert inst.meta["topo_seed"] == 6 and inst.meta["flow_seed"] == 7


def test_export_lp(example_file, tmp_path):
    from pathlib import Path

    out = tmp_path / "model.lp"
    assert main(["export-lp", "--instance", str(example_file), "--out", str(out)]) == 0
    golden = Path(__file__).parent / "data" / "example.lp"
    assert out.read_text() == golden.read_text()


@pytest.mark.parametrize("method", ["bnb", "ilp", "strict"])
def test_solve_exact(example_file, tmp_path, method):
    out = tmp_path / "sol.json"
    assert main(["solve-exact", "--instance", str(example_file), "--method", method, "--out", str(out)]) == 0
    sol = json.loads(out.read_text())
    assert sol["objective"] == 1110 and sol["proven_optimal"] is True
    assert sol["assignment"]["3"] is None
    assert "elapsed" not in sol["stats"]


def test_solve_ga_and_check(example_file, tmp_path):
    out, stats = tmp_path / "ga.json", tmp_path / "ga.csv"
    args = ["solve-ga", "--instance", str(example_file), "--generations", "5", "--seed", "2",
            "--out", str(out), "--stats", str(stats)]
    assert main(args) == 0
    assert json.loads(out.read_text())["objective"] == 1110
    assert stats.read_text().startswith("generation,best_fitness,MR,CR,elapsed_ms\n")
    report = tmp_path / "report.json"
    assert main(["check", "--instance", str(example_file), "--solution", str(out), "--out", str(report)]) == 0
    assert json.loads(report.read_text())["valid"] is True


def test_check_rejects_overload(example_file, tmp_path):
    sol = tmp_path / "bad.json"
    sol.write_text(json.dumps({"assignment": {"1": [0, 1], "2": [0, 1], "3": None, "4": None}}))
    report = tmp_path / "r.json"
    assert main(["check", "--instance", str(example_file), "--solution", str(sol), "--out", str(report)]) == 1
    data = json.loads(report.read_text())
    assert data["valid"] is False
    assert data["violations"][0] == {"kind": "capacity-exceeded", "detail": [0, 1], "amount": 4}


def test_check_values(example_file, tmp_path):
    inst = example_instance()
    good = tmp_path / "good.txt"
    good.write_text(write_values(assignment_to_values(inst, RouteAssignment((2, 0, DROP, 1)))))
    report = tmp_path / "r.json"
    assert main(["check", "--instance", str(example_file), "--values", str(good), "--out", str(report)]) == 0
    assert json.loads(report.read_text())["objective"] == 1110
    bad = tmp_path / "bad.txt"
    bad.write_text("a_1 1\nr_1_1 1\ne_1_1_2 1\na_2 1\nr_2_1 1\ne_2_1_2 1\n")
    assert main(["check", "--instance", str(example_file), "--values", str(bad), "--out", str(report)]) == 1
    assert json.loads(report.read_text())["violated_rows"] == ["c3_1_2"]


def test_bench(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--sizes", "2..3", "--ga-budget", "0.2", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "nodes,flows,optimal,exact_s,proven,ga_value,ga_s,ratio"
    assert len(lines) == 3
    summary = json.loads(out.with_suffix(".json").read_text())
    assert summary["proven_rows"] == 2


def test_module_entry_point(example_file):
    proc = subprocess.run(
        [sys.executable, "-m", "pfar.cli", "solve-exact", "--instance", str(example_file)],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(proc.stdout)["objective"] == 1110


def test_missing_command():
    with pytest.raises(SystemExit):
        main([])
