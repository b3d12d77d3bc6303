"""Cluster configuration documents: node specs plus an optional overload rule.

Kept separate from workload traces so the same workload can run on many
clusters.  Heartbeat phases default to index * (interval / node_count) so
nodes do not all heartbeat in lockstep.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .errors import ConfigError, TraceError
from .model import NodeSpec
from .overload import OverloadRule, rule_from_dict

_NODE_FIELDS = {
    "node_id",
    "cpu_capacity",
    "mem_capacity",
    "slots",
    "heartbeat_interval",
    "heartbeat_phase",
}
_REQUIRED_NODE_FIELDS = {"node_id", "cpu_capacity", "mem_capacity"}
_CLUSTER_FIELDS = {"nodes", "overload_rule"}


def default_phase(index: int, count: int, interval: float) -> float:
    return index * (interval / count)


def make_nodes(
    capacities: Sequence[float],
    slots: int = 2,
    heartbeat_interval: float = 1.0,
    mem_capacities: Sequence[float] | None = None,
) -> tuple[NodeSpec, ...]:
    """Convenience builder: one node per capacity, ids n0..nK, phased heartbeats."""
    if mem_capacities is None:
        mem_capacities = capacities
    if len(mem_capacities) != len(capacities):
        raise ConfigError("mem_capacities must match capacities in length")
    count = len(capacities)
    return tuple(
        NodeSpec(
            node_id=f"n{i}",
            cpu_capacity=cpu,
            mem_capacity=mem,
            slots=slots,
            heartbeat_interval=heartbeat_interval,
            heartbeat_phase=default_phase(i, count, heartbeat_interval),
        )
        for i, (cpu, mem) in enumerate(zip(capacities, mem_capacities))
    )


def cluster_from_dict(obj: dict) -> tuple[tuple[NodeSpec, ...], OverloadRule | None]:
    if not isinstance(obj, dict):
        raise TraceError("cluster document must be a JSON object")
    unknown = set(obj) - _CLUSTER_FIELDS
    if unknown:
        raise TraceError(f"cluster document has unknown fields: {sorted(unknown)}")
    raw_nodes = obj.get("nodes")
    if not isinstance(raw_nodes, list) or not raw_nodes:
        raise TraceError("cluster document needs a non-empty 'nodes' list")

    specs = []
    count = len(raw_nodes)
    for i, raw in enumerate(raw_nodes):
        if not isinstance(raw, dict):
            raise TraceError(f"node entry {i} must be a JSON object")
        unknown = set(raw) - _NODE_FIELDS
        if unknown:
            raise TraceError(f"node entry {i} has unknown fields: {sorted(unknown)}")
        missing = _REQUIRED_NODE_FIELDS - set(raw)
        if missing:
            raise TraceError(f"node entry {i} missing fields: {sorted(missing)}")
        interval = raw.get("heartbeat_interval", 1.0)
        phase = raw.get("heartbeat_phase")
        if phase is None:
            phase = default_phase(i, count, interval)
        try:
            specs.append(
                NodeSpec(
                    node_id=raw["node_id"],
                    cpu_capacity=raw["cpu_capacity"],
                    mem_capacity=raw["mem_capacity"],
                    slots=raw.get("slots", 2),
                    heartbeat_interval=interval,
                    heartbeat_phase=phase,
                )
            )
        except (ValueError, TypeError) as exc:
            raise TraceError(f"node entry {i}: {exc}") from exc
    ids = [spec.node_id for spec in specs]
    if len(set(ids)) != len(ids):
        raise TraceError(f"duplicate node ids: {ids}")

    rule = None
    if obj.get("overload_rule") is not None:
        rule = rule_from_dict(obj["overload_rule"])
    return tuple(specs), rule


def cluster_to_dict(nodes: Sequence[NodeSpec], rule: OverloadRule | None = None) -> dict:
    doc: dict = {
        "nodes": [
            {
                "node_id": spec.node_id,
                "cpu_capacity": spec.cpu_capacity,
                "mem_capacity": spec.mem_capacity,
                "slots": spec.slots,
                "heartbeat_interval": spec.heartbeat_interval,
                "heartbeat_phase": spec.heartbeat_phase,
            }
            for spec in nodes
        ]
    }
    if rule is not None:
        doc["overload_rule"] = rule.to_dict()
    return doc


def load_cluster(path: str | Path) -> tuple[tuple[NodeSpec, ...], OverloadRule | None]:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TraceError(f"cluster file {path}: invalid JSON: {exc.msg}") from exc
    return cluster_from_dict(obj)


def save_cluster(nodes: Sequence[NodeSpec], path: str | Path, rule: OverloadRule | None = None) -> None:
    Path(path).write_text(json.dumps(cluster_to_dict(nodes, rule), indent=2) + "\n", encoding="utf-8")
