"""The four-node example network with its four flows.

Node ``k`` here is ``N{k+1}`` in the usual drawing of this example.
"""

from pfar.model import Flow, Network, PfarInstance, PriorityFn, header_from_int
from pfar.paths import attach_paths

EXAMPLE_CAPACITIES = {
    (0, 1): 2, (0, 2): 2, (0, 3): 2,
    (1, 0): 1, (1, 2): 3, (1, 3): 1,
    (2, 0): 3, (2, 1): 2, (2, 3): 1,
    (3, 0): 4, (3, 1): 2, (3, 2): 2,
}  # fmt: skip

# (src, dst, bandwidth, priority)
EXAMPLE_FLOWS = [
    (0, 1, 2, 10),
    (0, 1, 2, 1000),
    (2, 1, 1, 1),
    (0, 1, 2, 100),
]


def example_network() -> Network:
    return Network(4, EXAMPLE_CAPACITIES)


def example_instance(max_path_len: int = 3, attach: bool = True) -> PfarInstance:
    flows = []
    table = {}
    for k, (s, d, bw, prio) in enumerate(EXAMPLE_FLOWS, start=1):
        header = header_from_int(k)
        flows.append(Flow(s, d, bw, header))
        table[header] = prio
    inst = PfarInstance(example_network(), tuple(flows), PriorityFn(table), max_path_len=max_path_len)
    return attach_paths(inst) if attach else inst
