"""Random small instances shared by property tests and the acceptance suite."""

import math
import random

from pfar.model import Flow, Network, PfarInstance, PriorityFn, header_from_int
from pfar.paths import attach_paths

PRIORITY_CHOICES = (0, 1, 1, 2, 3, 5, 10, 10, 60, 100)


def random_small_instance(rng: random.Random, max_nodes=5, max_flows=8, max_len=3, space_limit=200_000):
    """Random instance on <= max_nodes nodes with a bounded search space."""
    while True:
        n = rng.randint(2, max_nodes)
        density = rng.uniform(0.3, 1.0)
        cap = {}
        for u in range(n):
            for v in range(n):
                if u != v and rng.random() < density:
                    cap[(u, v)] = rng.randint(1, 5)
        if not cap:
            continue
        net = Network(n, cap)
        flows, table = [], {}
        for k in range(rng.randint(0, max_flows)):
            s, d = rng.sample(range(n), 2)
            h = header_from_int(k + 1, 8)
            flows.append(Flow(s, d, rng.randint(1, 3), h))
            table[h] = rng.choice(PRIORITY_CHOICES)
        inst = attach_paths(PfarInstance(net, tuple(flows), PriorityFn(table), max_path_len=rng.randint(1, max_len), header_bits=8))
        if math.prod(len(p) + 1 for p in inst.paths) <= space_limit:
            return inst
