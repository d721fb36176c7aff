"""Benchmark instance family: double-star topologies with congesting flows.

Topology for ``N`` nodes, with ``n`` the floor of the positive root of
``N = n^2 + n + 1``:

* root ``0`` linked both ways to the first level ``1..n``;
* a bus between consecutive first-level nodes;
* first-level node ``i`` linked both ways to its children ``i*n+1..i*n+n``;
* a mesh between the first sub-cluster's children ``n+1..2n`` and nodes
  ``{2, 3}``, clipped to existing nodes and skipping self-loops and edges
  already present;
* every remaining node ``n^2+n+1..N-1`` linked both ways to the root.

Capacities are ``floor(L / r)`` outbound and ``floor(L / (2 r'))`` on return
links, with ``r, r'`` uniform integers in ``[1, 10]``, clamped to >= 1.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from pfar.errors import TooFewNodes
from pfar.model import DEFAULT_MAX_PATH_LEN, Edge, Flow, Network, PfarInstance, PriorityFn, header_from_int, is_connected
from pfar.paths import attach_paths

# Default link scales in kbps.
L0_DEFAULT = 30000
L1_DEFAULT = 10000
L2_DEFAULT = 2000

PRIORITY_LEVELS = (1, 10, 100, 1000, 10000)
PRIORITY_WEIGHTS = (0.50, 0.27, 0.13, 0.07, 0.03)


@dataclass(frozen=True)
class TopoConfig:
    node_count: int
    l0: int = L0_DEFAULT
    l1: int = L1_DEFAULT
    l2: int = L2_DEFAULT
    seed: int = 0

    def __post_init__(self):
        if self.node_count < 2:
            raise TooFewNodes(f"need at least 2 nodes, got {self.node_count}")
        if not (self.l0 >= self.l1 >= self.l2 >= 10):
            raise ValueError("bandwidth constants must satisfy L0 >= L1 >= L2 >= 10")


@dataclass(frozen=True)
class FlowGenConfig:
    priority_levels: Tuple[int, ...] = PRIORITY_LEVELS
    priority_weights: Tuple[float, ...] = PRIORITY_WEIGHTS
    seed: int = 0

    def __post_init__(self):
        if len(self.priority_levels) != len(self.priority_weights):
            raise ValueError("one weight per priority level")
        if not math.isclose(sum(self.priority_weights), 1.0):
            raise ValueError("priority weights must sum to 1")
        if any(b <= a for a, b in zip(self.priority_levels, self.priority_levels[1:])):
            raise ValueError("priority levels must be strictly increasing")


def children_per_node(node_count: int) -> int:
    """Floor of the positive root of ``N = n^2 + n + 1``."""
    n = (math.isqrt(4 * node_count - 3) - 1) // 2
    return max(n, 0)


def _share(limit: int, divisor: int) -> int:
    return max(1, limit // divisor)


def gen_topology(cfg: TopoConfig) -> Network:
    if cfg.node_count < 2:
        raise TooFewNodes(f"need at least 2 nodes, got {cfg.node_count}")
    rng = random.Random(cfg.seed)
    big_n = cfg.node_count
    n = children_per_node(big_n)
    cap: Dict[Edge, int] = {}

    def draw() -> int:
        return rng.randint(1, 10)

    def add(u: int, v: int, c: int) -> None:
        if u != v and (u, v) not in cap and u < big_n and v < big_n:
            cap[(u, v)] = c

    for i in range(1, n + 1):
        add(0, i, _share(cfg.l0, draw()))
        add(i, 0, _share(cfg.l0, 2 * draw()))
    for i in range(1, n):
        add(i, i + 1, _share(cfg.l1, draw()))
        add(i + 1, i, _share(cfg.l1, draw()))
    for i in range(1, n + 1):
        for j in range(i * n + 1, i * n + n + 1):
            add(i, j, _share(cfg.l1, draw()))
            add(j, i, _share(cfg.l1, 2 * draw()))
    if n >= 1:
        for j in range(n + 1, 2 * n + 1):
            for k in (2, 3):
                if j == k or k >= big_n:
                    continue
                add(j, k, _share(cfg.l2, draw()))
                add(k, j, _share(cfg.l2, draw()))
    for i in range(n * n + n + 1, big_n):
        add(0, i, _share(cfg.l0, draw()))
        add(i, 0, _share(cfg.l0, 2 * draw()))

    net = Network(big_n, cap)
    if not is_connected(net):
        raise AssertionError(f"generated topology with {big_n} nodes is not strongly connected")
    return net


def _flow_bandwidth(rng: random.Random, l2: int) -> int:
    r = rng.randint(1, 10)
    low = max(1, l2 // (2 * r))
    high = max(1, l2 // r - 1)
    if low > high:
        return max(1, low)
    return rng.randint(low, high)


def gen_flows(network: Network, l2: int, cfg: FlowGenConfig) -> List[Tuple[Flow, int]]:
    """Flows per source node until its demand strictly exceeds its out-capacity.

    Returns ``(flow, priority)`` pairs; headers encode the 1-based flow index.
    """
    rng = random.Random(cfg.seed)
    levels, weights = list(cfg.priority_levels), list(cfg.priority_weights)
    out = []
    for v in range(network.node_count):
        budget = network.out_capacity(v)
        if budget <= 0:
            continue
        others = [u for u in range(network.node_count) if u != v]
        demand = 0
        while demand <= budget:
            dst = rng.choice(others)
            bw = _flow_bandwidth(rng, l2)
            prio = rng.choices(levels, weights)[0]
            out.append((Flow(v, dst, bw, header_from_int(len(out) + 1)), prio))
            demand += bw
    return out


def gen_instance(topo_cfg: TopoConfig, flow_cfg: FlowGenConfig, max_path_len: int = DEFAULT_MAX_PATH_LEN) -> PfarInstance:
    network = gen_topology(topo_cfg)
    pairs = gen_flows(network, topo_cfg.l2, flow_cfg)
    flows = tuple(f for f, _ in pairs)
    table = {f.header: p for f, p in pairs}
    min_cap = min(network.capacity.values())
    meta = {
        "generator": "double-star",
        "node_count": topo_cfg.node_count,
        "children_per_node": children_per_node(topo_cfg.node_count),
        "l0": topo_cfg.l0,
        "l1": topo_cfg.l1,
        "l2": topo_cfg.l2,
        "topo_seed": topo_cfg.seed,
        "flow_seed": flow_cfg.seed,
        "mesh_rule": "first sub-cluster children x {2,3}, clipped",
        "flows_fit_smallest_link": all(f.bandwidth <= min_cap for f in flows),
    }
    inst = PfarInstance(network, flows, PriorityFn(table), max_path_len=max_path_len, meta=meta)
    return attach_paths(inst)
