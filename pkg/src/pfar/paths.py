"""Hop-limited simple path enumeration.

Candidate paths for a flow are ordered by hop count first and then by node
sequence, so ``(0,1)`` precedes ``(0,2)(2,1)`` which precedes
``(0,3)(3,1)`` which precedes ``(0,2)(2,3)(3,1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from pfar.errors import SameEndpoints
from pfar.model import DEFAULT_MAX_PATH_LEN, Network, Path, PfarInstance, path_from_nodes


@dataclass(frozen=True)
class PathEnumConfig:
    max_path_len: int = DEFAULT_MAX_PATH_LEN

    def __post_init__(self):
        if self.max_path_len < 1:
            raise ValueError("max_path_len must be >= 1")


def _path_order(nodes: Tuple[int, ...]):
    return (len(nodes), nodes)


def enumerate_paths(network: Network, src: int, dst: int, cfg: PathEnumConfig) -> List[Path]:
    """All simple paths from ``src`` to ``dst`` with at most ``cfg.max_path_len`` edges."""
    if src == dst:
        raise SameEndpoints(f"source and destination are both {src}")
    n = network.node_count
    if not (0 <= src < n and 0 <= dst < n):
        raise ValueError(f"endpoints ({src}, {dst}) outside 0..{n - 1}")

    limit = cfg.max_path_len
    succ = network.successors
    found = []
    stack = [src]
    on_path = [False] * n
    on_path[src] = True

    # iterative DFS; each frame is an iterator over the successors of stack[-1]
    frames = [iter(succ[src])]
    while frames:
        nxt = next(frames[-1], None)
        if nxt is None:
            frames.pop()
            on_path[stack.pop()] = False
            continue
        if on_path[nxt]:
            continue
        if nxt == dst:
            found.append(tuple(stack) + (dst,))
            continue
        if len(stack) < limit:
            stack.append(nxt)
            on_path[nxt] = True
            frames.append(iter(succ[nxt]))

    found.sort(key=_path_order)
    return [path_from_nodes(nodes) for nodes in found]


def attach_paths(instance: PfarInstance) -> PfarInstance:
    """Return a copy of ``instance`` with candidate paths for every flow.

    Flows with the same endpoints share one path tuple. A flow may end up
    with no candidate path at all; it can then only be dropped.
    """
    cfg = PathEnumConfig(instance.max_path_len)
    cache = {}
    paths = []
    for f in instance.flows:
        key = (f.src, f.dst)
        if key not in cache:
            cache[key] = tuple(enumerate_paths(instance.network, f.src, f.dst, cfg))
        paths.append(cache[key])
    return instance.with_paths(tuple(paths))
