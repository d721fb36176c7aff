import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _instances import random_small_instance
from pfar import Network, PathEnumConfig, SameEndpoints, attach_paths, enumerate_paths, validate_path
from pfar.model import Flow, PfarInstance, path_from_nodes, path_nodes
from pfar.samples import example_instance, example_network

# Paths as listed for the worked example, in that order (nodes 0-based).
EXAMPLE_PATHS_FROM_0_TO_1 = [(0, 1), (0, 2, 1), (0, 3, 1), (0, 2, 3, 1), (0, 3, 2, 1)]
EXAMPLE_PATHS_FROM_2_TO_1 = [(2, 1), (2, 0, 1), (2, 3, 1), (2, 0, 3, 1), (2, 3, 0, 1)]


def brute_force_paths(net: Network, src, dst, limit):
    """Every ordered choice of distinct intermediate nodes, kept if all edges exist."""
    others = [v for v in range(net.node_count) if v not in (src, dst)]
    out = set()
    for k in range(0, min(limit - 1, len(others)) + 1):
        for mid in itertools.permutations(others, k):
            nodes = (src,) + mid + (dst,)
            if all(e in net.capacity for e in zip(nodes, nodes[1:])):
                out.add(nodes)
    return out


def test_example_paths_n1_n2():
    paths = enumerate_paths(example_network(), 0, 1, PathEnumConfig(3))
    assert [path_nodes(p) for p in paths] == EXAMPLE_PATHS_FROM_0_TO_1


def test_example_paths_n3_n2():
    paths = enumerate_paths(example_network(), 2, 1, PathEnumConfig(3))
    assert [path_nodes(p) for p in paths] == EXAMPLE_PATHS_FROM_2_TO_1


def test_two_nodes():
    net = Network(2, {(0, 1): 1, (1, 0): 1})
    assert enumerate_paths(net, 0, 1, PathEnumConfig(1)) == [((0, 1),)]


def test_same_endpoints():
    with pytest.raises(SameEndpoints):
        enumerate_paths(example_network(), 1, 1, PathEnumConfig(3))


def test_config_rejects_zero_length():
    with pytest.raises(ValueError):
        PathEnumConfig(0)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_complete_graph_count(n):
    net = Network(n, {(u, v): 1 for u in range(n) for v in range(n) if u != v})
    expected = sum(math.factorial(n - 2) // math.factorial(n - 2 - k) for k in range(n - 1))
    paths = enumerate_paths(net, 0, 1, PathEnumConfig(n - 1))
    assert len(paths) == expected == len(brute_force_paths(net, 0, 1, n - 1))
    if n == 4:
        assert expected == 5


def test_attach_paths_example():
    inst = example_instance(max_path_len=3)
    assert sum(len(p) for p in inst.paths) == 20
    assert inst.paths[0] is inst.paths[1] is inst.paths[3]
    assert [path_nodes(p) for p in inst.paths[2]] == EXAMPLE_PATHS_FROM_2_TO_1


def test_attach_paths_direct_edges_only():
    inst = example_instance(max_path_len=1)
    assert inst.paths[0] == inst.paths[1] == inst.paths[3] == (((0, 1),),)
    assert inst.paths[2] == (((2, 1),),)


def test_unreachable_within_limit_gives_empty_list():
    net = Network(3, {(0, 1): 1, (1, 2): 1, (2, 0): 1})
    inst = attach_paths(PfarInstance(net, (Flow(0, 2, 1),), max_path_len=1))
    assert inst.paths == ((),)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_matches_brute_force(seed, limit):
    rng = random.Random(seed)
    inst = random_small_instance(rng, max_nodes=6, max_flows=0)
    net = inst.network
    src, dst = rng.sample(range(net.node_count), 2) if net.node_count > 1 else (0, 0)
    if src == dst:
        return
    cfg = PathEnumConfig(limit)
    paths = enumerate_paths(net, src, dst, cfg)
    nodes = [path_nodes(p) for p in paths]
    assert set(nodes) == brute_force_paths(net, src, dst, limit)
    assert len(set(nodes)) == len(nodes)
    assert nodes == sorted(nodes, key=lambda t: (len(t), t))
    flow = Flow(src, dst, 1)
    for p in paths:
        assert 1 <= len(p) <= limit
        assert validate_path(net, flow, p)
    assert enumerate_paths(net, src, dst, cfg) == paths
    assert [path_from_nodes(t) for t in nodes] == paths
