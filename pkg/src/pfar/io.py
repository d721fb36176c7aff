"""JSON instance and solution formats.

Instance::

    {"nodes": 4,
     "edges": [{"src": 0, "dst": 1, "cap": 2}, ...],
     "flows": [{"src": 0, "dst": 1, "bw": 2, "header": "0...1", "priority": 10}, ...],
     "max_path_len": 3}

``priority`` may be omitted per flow, in which case the header is looked up
in the optional ``priority_table`` (``{"header": priority}``) with
``default_priority`` (default 1) as fallback. Candidate paths are not stored;
they are recomputed on load.

Solution::

    {"assignment": {"1": [0, 2, 1], "2": null, ...},
     "objective": 1110, "proven_optimal": true, "stats": {...}}

Flow keys are 1-based; path entries are node lists.
"""

from __future__ import annotations

import json
from pathlib import Path as FsPath
from typing import Mapping, Optional

from pfar.model import (
    DEFAULT_HEADER_BITS,
    DEFAULT_MAX_PATH_LEN,
    DROP,
    Flow,
    Network,
    PfarInstance,
    PriorityFn,
    RouteAssignment,
    path_from_nodes,
    path_nodes,
)
from pfar.paths import attach_paths


def instance_from_dict(data: Mapping, with_paths: bool = True) -> PfarInstance:
    network = Network.from_edges(
        int(data["nodes"]),
        ((int(e["src"]), int(e["dst"]), int(e["cap"])) for e in data["edges"]),
    )
    header_bits = int(data.get("header_bits", DEFAULT_HEADER_BITS))
    table = {str(h): int(p) for h, p in data.get("priority_table", {}).items()}
    flows = []
    for k, fd in enumerate(data["flows"], start=1):
        header = str(fd.get("header", format(k, f"0{header_bits}b")))
        flow = Flow(int(fd["src"]), int(fd["dst"]), int(fd["bw"]), header)
        if "priority" in fd and fd["priority"] is not None:
            prio = int(fd["priority"])
            if table.get(header, prio) != prio:
                raise ValueError(f"flow {k}: header {header} already maps to priority {table[header]}")
            table[header] = prio
        flows.append(flow)
    inst = PfarInstance(
        network=network,
        flows=tuple(flows),
        priorities=PriorityFn(table, int(data.get("default_priority", 1))),
        max_path_len=int(data.get("max_path_len", DEFAULT_MAX_PATH_LEN)),
        header_bits=header_bits,
        meta=dict(data.get("meta", {})),
    )
    return attach_paths(inst) if with_paths else inst


def instance_to_dict(instance: PfarInstance) -> dict:
    """Canonical JSON form with priorities inlined per flow."""
    net = instance.network
    prio = instance.flow_priorities
    out = {
        "nodes": net.node_count,
        "edges": [{"src": u, "dst": v, "cap": net.capacity[(u, v)]} for u, v in net.edges],
        "flows": [
            {"src": f.src, "dst": f.dst, "bw": f.bandwidth, "header": f.header, "priority": p}
            for f, p in zip(instance.flows, prio)
        ],
        "max_path_len": instance.max_path_len,
        "header_bits": instance.header_bits,
    }
    if instance.meta:
        out["meta"] = dict(instance.meta)
    return out


def _compact(value) -> str:
    return json.dumps(value, separators=(", ", ": "))


def dumps(obj: Mapping) -> str:
    """JSON with one line per top-level key and per element of top-level containers."""
    lines = ["{"]
    items = list(obj.items())
    for k, (key, value) in enumerate(items):
        tail = "," if k < len(items) - 1 else ""
        head = f" {json.dumps(key)}: "
        if isinstance(value, list) and value:
            inner = [f"  {_compact(v)}" for v in value]
            lines.append(head + "[")
            lines.append(",\n".join(inner))
            lines.append(f" ]{tail}")
        elif isinstance(value, dict) and value:
            inner = [f"  {json.dumps(str(kk))}: {_compact(v)}" for kk, v in value.items()]
            lines.append(head + "{")
            lines.append(",\n".join(inner))
            lines.append(f" }}{tail}")
        else:
            lines.append(head + _compact(value) + tail)
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_instance(path) -> PfarInstance:
    return instance_from_dict(json.loads(FsPath(path).read_text()))


def save_instance(instance: PfarInstance, path) -> None:
    FsPath(path).write_text(dumps(instance_to_dict(instance)))


def solution_to_dict(
    instance: PfarInstance,
    assignment: RouteAssignment,
    objective: int,
    proven_optimal: Optional[bool] = None,
    stats: Optional[Mapping] = None,
) -> dict:
    chosen = assignment.chosen_paths(instance)
    out = {
        "assignment": {
            str(i): (list(path_nodes(p)) if m is not DROP else None)
            for i, (m, p) in enumerate(zip(assignment.choice, chosen), start=1)
        },
        "objective": objective,
    }
    if proven_optimal is not None:
        out["proven_optimal"] = proven_optimal
    if stats is not None:
        out["stats"] = dict(stats)
    return out


def assignment_from_dict(instance: PfarInstance, data: Mapping) -> RouteAssignment:
    """Map node lists in a solution back to path indices.

    A node list that is not among the flow's candidate paths raises ValueError.
    """
    paths = instance.require_paths()
    mapping = {}
    for key, nodes in data["assignment"].items():
        i = int(key)
        if nodes is None:
            mapping[i] = DROP
            continue
        target = path_from_nodes([int(v) for v in nodes])
        try:
            mapping[i] = paths[i - 1].index(target)
        except ValueError:
            raise ValueError(f"flow {i}: path {nodes} is not a candidate path") from None
    return RouteAssignment.from_mapping(instance, mapping)
