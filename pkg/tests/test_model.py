import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _instances import random_small_instance
from pfar import (
    DROP,
    AssignmentIncomplete,
    Flow,
    Network,
    PathsNotAttached,
    PfarInstance,
    PriorityFn,
    RouteAssignment,
    check_solution,
    is_connected,
    objective_value,
    residual_capacities,
    validate_path,
)
from pfar.model import path_from_nodes, path_nodes
from pfar.samples import EXAMPLE_CAPACITIES, example_instance, example_network

# path indices for flows N1->N2: 0 (0,1), 1 (0,2,1), 2 (0,3,1), 3 (0,2,3,1), 4 (0,3,2,1)
NARRATED = RouteAssignment((2, 0, DROP, 1))


def test_network_sorts_edges_and_indexes_them():
    net = example_network()
    assert net.edges == tuple(sorted(EXAMPLE_CAPACITIES))
    assert len(net.edges) == 12
    assert all(net.edges[k] == e for e, k in net.edge_index.items())
    assert net.successors[1] == (0, 2, 3)


@pytest.mark.parametrize(
    "cap",
    [{(0, 0): 1}, {(0, 1): 0}, {(0, 5): 1}],
    ids=["self-loop", "zero-capacity", "unknown-node"],
)
def test_network_rejects_bad_edges(cap):
    with pytest.raises(ValueError):
        Network(2, cap)


def test_network_rejects_duplicate_triples():
    with pytest.raises(ValueError):
        Network.from_edges(2, [(0, 1, 1), (0, 1, 2)])


def test_flow_invariants():
    with pytest.raises(ValueError):
        Flow(1, 1, 1)
    with pytest.raises(ValueError):
        Flow(0, 1, 0)
    with pytest.raises(ValueError):
        Flow(0, 1, 1, "01x")


def test_flow_with_unknown_node_is_rejected():
    with pytest.raises(ValueError):
        PfarInstance(Network(2, {(0, 1): 1}), (Flow(0, 3, 1),))


def test_priority_lookup_defaults():
    fn = PriorityFn({"01": 7}, default=3)
    assert fn.lookup("01") == 7
    assert fn.lookup("11") == 3
    assert PriorityFn().lookup("0") == 1
    with pytest.raises(ValueError):
        PriorityFn({"0": -1})


def test_path_node_round_trip():
    p = path_from_nodes([0, 2, 3, 1])
    assert p == ((0, 2), (2, 3), (3, 1))
    assert path_nodes(p) == (0, 2, 3, 1)
    assert path_nodes(()) == ()


class TestValidatePath:
    def test_three_hop_path_is_valid(self, example):
        f1 = example.flows[0]
        assert validate_path(example.network, f1, ((0, 2), (2, 3), (3, 1)))

    def test_drop_is_valid(self, example):
        assert validate_path(example.network, example.flows[0], ())

    def test_chain_break(self, example):
        assert not validate_path(example.network, example.flows[0], ((0, 2), (3, 1)))

    def test_wrong_endpoints(self, example):
        assert not validate_path(example.network, example.flows[0], ((0, 2),))
        assert not validate_path(example.network, example.flows[0], ((2, 1),))

    def test_repeated_node(self):
        net = Network(3, {(0, 1): 1, (1, 0): 1, (1, 2): 1})
        assert not validate_path(net, Flow(0, 2, 1), ((0, 1), (1, 0), (0, 1), (1, 2)))

    def test_missing_edge(self):
        net = Network(3, {(0, 1): 1, (1, 2): 1})
        assert not validate_path(net, Flow(0, 2, 1), ((0, 2),))


class TestCheckSolution:
    def test_narrated_solution(self, example):
        report = check_solution(example, NARRATED)
        assert report.valid
        assert report.objective == 1110
        assert report.violations == ()

    def test_all_drop(self, example):
        report = check_solution(example, RouteAssignment.all_drop(4))
        assert report.valid and report.objective == 0

    def test_two_flows_on_direct_edge(self, example):
        report = check_solution(example, RouteAssignment((0, 0, DROP, DROP)))
        assert not report.valid
        assert report.objective == 1010
        (v,) = report.violations
        assert (v.kind, v.detail, v.amount) == ("capacity-exceeded", (0, 1), 4)

    def test_bad_path_index(self, example):
        report = check_solution(example, RouteAssignment((7, DROP, DROP, DROP)))
        assert not report.valid
        assert report.violations[0].kind == "path-invalid"
        assert report.violations[0].detail == 1

    def test_incomplete(self, example):
        with pytest.raises(AssignmentIncomplete):
            check_solution(example, RouteAssignment((0, 1)))

    def test_needs_paths(self):
        inst = example_instance(attach=False)
        with pytest.raises(PathsNotAttached):
            check_solution(inst, RouteAssignment((0, DROP, DROP, DROP)))


class TestObjective:
    def test_narrated(self, example):
        assert objective_value(example, NARRATED) == 1110

    def test_all_drop(self, example):
        assert objective_value(example, RouteAssignment.all_drop(4)) == 0

    def test_everything_admitted_even_if_infeasible(self, example):
        assert objective_value(example, RouteAssignment((0, 0, 0, 0))) == 1111

    def test_incomplete(self, example):
        with pytest.raises(AssignmentIncomplete):
            objective_value(example, RouteAssignment(()))

    def test_from_mapping_requires_every_flow(self, example):
        with pytest.raises(AssignmentIncomplete):
            RouteAssignment.from_mapping(example, {1: 0, 2: None, 3: None})
        a = RouteAssignment.from_mapping(example, {1: 2, 2: 0, 3: None, 4: 1})
        assert a == NARRATED


class TestResidual:
    def test_all_drop_leaves_capacity(self, example):
        assert residual_capacities(example, RouteAssignment.all_drop(4)) == dict(EXAMPLE_CAPACITIES)

    def test_single_flow(self, example):
        res = residual_capacities(example, RouteAssignment((DROP, 0, DROP, DROP)))
        expected = dict(EXAMPLE_CAPACITIES)
        expected[(0, 1)] = 0
        assert res == expected

    def test_overload_goes_negative(self, example):
        res = residual_capacities(example, RouteAssignment((0, 0, DROP, DROP)))
        assert res[(0, 1)] == -2


class TestConnectivity:
    def test_example_network(self):
        assert is_connected(example_network())

    def test_one_way_pair(self):
        assert not is_connected(Network(2, {(0, 1): 1}))

    def test_single_node(self):
        assert is_connected(Network(1, {}))

    def test_weakly_connected_chain(self):
        assert not is_connected(Network(3, {(0, 1): 1, (1, 0): 1, (1, 2): 1}))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.data())
def test_check_properties(seed, data):
    inst = random_small_instance(random.Random(seed))
    choice = tuple(
        data.draw(st.one_of(st.none(), st.integers(0, len(p) - 1))) if p else None for p in inst.paths
    )
    a = RouteAssignment(choice)
    report = check_solution(inst, a)
    assert report.objective == objective_value(inst, a)
    assert report.valid == (not report.violations)
    for p in a.chosen_paths(inst):
        assert p == () or 1 <= len(p) <= inst.network.node_count - 1
    if report.valid:
        # dropping any admitted flow keeps feasibility and never raises the objective
        for i in a.admitted():
            dropped = list(choice)
            dropped[i] = DROP
            r2 = check_solution(inst, RouteAssignment(tuple(dropped)))
            assert r2.valid and r2.objective <= report.objective
    none = check_solution(inst, RouteAssignment.all_drop(len(inst.flows)))
    assert none.valid and not any(v.kind == "capacity-exceeded" for v in none.violations)
