"""Overload rules: configurable predicates over node load metrics.

A rule is one or more threshold clauses over cpu_utilization,
mem_utilization, or free_mem_fraction, combined with any/all.  The engine
evaluates the rule at every heartbeat; a true result labels the node's
outstanding assignments "bad".
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError
from .model import NodeState

METRICS = ("cpu_utilization", "mem_utilization", "free_mem_fraction")
COMPARATORS = (">", "<")
COMBINES = ("any", "all")


@dataclass(frozen=True)
class Clause:
    metric: str
    comparator: str
    threshold: float

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ConfigError(f"unknown overload metric {self.metric!r}; choose from {METRICS}")
        if self.comparator not in COMPARATORS:
            raise ConfigError(f"comparator must be '>' or '<', got {self.comparator!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold must be in [0, 1], got {self.threshold}")

    def holds(self, value: float) -> bool:
        return value > self.threshold if self.comparator == ">" else value < self.threshold


@dataclass(frozen=True)
class OverloadRule:
    clauses: tuple[Clause, ...]
    combine: str = "any"

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if not self.clauses:
            raise ConfigError("overload rule needs at least one clause")
        if self.combine not in COMBINES:
            raise ConfigError(f"combine must be 'any' or 'all', got {self.combine!r}")

    def evaluate(self, state: NodeState) -> bool:
        """True iff the node counts as overloaded under this rule."""
        metrics = {
            "cpu_utilization": state.cpu_utilization(),
            "mem_utilization": state.mem_utilization(),
            "free_mem_fraction": state.free_mem_fraction(),
        }
        results = (clause.holds(metrics[clause.metric]) for clause in self.clauses)
        return any(results) if self.combine == "any" else all(results)

    def to_dict(self) -> dict:
        return {
            "combine": self.combine,
            "clauses": [
                {"metric": c.metric, "comparator": c.comparator, "threshold": c.threshold}
                for c in self.clauses
            ],
        }


def default_rule() -> OverloadRule:
    """cpu_utilization > 0.9 OR free_mem_fraction < 0.1."""
    return OverloadRule(
        (
            Clause("cpu_utilization", ">", 0.9),
            Clause("free_mem_fraction", "<", 0.1),
        ),
        "any",
    )


def rule_from_dict(obj: dict) -> OverloadRule:
    try:
        clauses = tuple(
            Clause(c["metric"], c["comparator"], float(c["threshold"])) for c in obj["clauses"]
        )
        combine = obj.get("combine", "any")
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed overload rule object: {exc}") from exc
    return OverloadRule(clauses, combine)


def parse_rule(text: str) -> OverloadRule:
    """Parse the compact CLI syntax, e.g. ``any:cpu_utilization>0.9,free_mem_fraction<0.1``.

    The ``any:``/``all:`` prefix is optional and defaults to ``any``.
    """
    combine = "any"
    body = text.strip()
    for prefix in COMBINES:
        if body.startswith(prefix + ":"):
            combine = prefix
            body = body[len(prefix) + 1 :]
            break
    clauses = []
    for part in body.split(","):
        part = part.strip()
        if not part:
            continue
        for comparator in COMPARATORS:
            if comparator in part:
                metric, _, threshold = part.partition(comparator)
                try:
                    clauses.append(Clause(metric.strip(), comparator, float(threshold)))
                except ValueError as exc:
                    raise ConfigError(f"bad threshold in clause {part!r}") from exc
                break
        else:
            raise ConfigError(f"clause {part!r} has no comparator ('>' or '<')")
    return OverloadRule(tuple(clauses), combine)
