"""Scheduling policies: FIFO, Fair, Capacity, and the learning Bayes policy.

All four share one contract: given a node with a free slot and the queue of
jobs with pending tasks, return at most one (job, task) pick.  The selection
rules are pure functions over explicit inputs; the scheduler classes wrap
them with per-policy configuration and (for Bayes) the feedback loop.

Tie-breaking is deterministic everywhere: ties fall back to earlier arrival,
then lexicographic job id, so identical inputs replay identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .classifier import NaiveBayesClassifier
from .errors import ConfigError
from .model import (
    Assignment,
    FeatureVector,
    Job,
    NodeState,
    Task,
    feature_vector,
    node_features,
)

SCHEDULER_NAMES = ("fifo", "fair", "capacity", "bayes")
ALL_BAD_POLICIES = ("withhold", "least-bad")


@dataclass(frozen=True)
class QueuedJob:
    """A queued job together with its still-unassigned tasks."""

    job: Job
    pending_tasks: tuple[Task, ...]


@dataclass(frozen=True)
class Decision:
    """One scheduling pick; Bayes decisions carry the classified snapshot."""

    job_id: str
    task_id: str
    local: bool
    p_good: float | None = None
    features: FeatureVector | None = None


@dataclass(frozen=True)
class SchedulingContext:
    """Cluster-level counts the stateless selection rules need."""

    now: float
    running_per_pool: Mapping[str, int] = field(default_factory=dict)
    running_per_queue: Mapping[str, int] = field(default_factory=dict)
    running_per_queue_user: Mapping[tuple[str, str], int] = field(default_factory=dict)
    max_cpu_capacity: float = 1.0
    max_mem_capacity: float = 1.0


@dataclass(frozen=True)
class PoolConfig:
    """Fair-scheduler pool: guaranteed slots and a share weight."""

    min_share: int = 0
    weight: float = 1.0

    def __post_init__(self):
        if self.min_share < 0:
            raise ConfigError(f"min_share must be >= 0, got {self.min_share}")
        if self.weight <= 0:
            raise ConfigError(f"weight must be > 0, got {self.weight}")


@dataclass(frozen=True)
class QueueConfig:
    """Capacity-scheduler queue: capacity share and per-user task cap."""

    capacity: float
    user_task_limit: int

    def __post_init__(self):
        if not 0.0 < self.capacity <= 1.0:
            raise ConfigError(f"queue capacity must be in (0, 1], got {self.capacity}")
        if self.user_task_limit < 1:
            raise ConfigError(f"user_task_limit must be >= 1, got {self.user_task_limit}")


def validate_fair_config(pools: Mapping[str, PoolConfig], total_slots: int) -> None:
    total_min = sum(p.min_share for p in pools.values())
    if total_min > total_slots:
        raise ConfigError(
            f"sum of pool min_shares ({total_min}) exceeds cluster slots ({total_slots})"
        )


def validate_capacity_config(queues: Mapping[str, QueueConfig]) -> None:
    if not queues:
        raise ConfigError("capacity scheduler needs at least one queue")
    total = sum(q.capacity for q in queues.values())
    if not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=1e-9):
        raise ConfigError(f"queue capacities must sum to 1, got {total}")


UTILITY_KINDS = ("constant", "priority", "age")


@dataclass(frozen=True)
class UtilityConfig:
    """How U(job) is computed for the Bayes expected-utility score."""

    kind: str = "priority"

    def __post_init__(self):
        if self.kind not in UTILITY_KINDS:
            raise ConfigError(f"utility kind must be one of {UTILITY_KINDS}, got {self.kind!r}")


UtilityFn = Callable[[Job, float, NodeState], float]


def make_utility(config: UtilityConfig) -> UtilityFn:
    """Build U(job, now, node); always strictly positive.

    "age" counts heartbeat intervals waited, offset by 1 so a job that
    arrived this instant still has positive utility.
    """
    if config.kind == "constant":
        return lambda job, now, node: 1.0
    if config.kind == "priority":
        return lambda job, now, node: job.priority + 1.0
    return lambda job, now, node: 1.0 + max(0.0, now - job.arrival_time) / node.spec.heartbeat_interval


def pick_task(pending_tasks: Sequence[Task], node_id: str) -> Task:
    """Prefer a data-local pending task; otherwise the lowest-id pending task."""
    local = [t for t in pending_tasks if node_id in t.preferred_nodes]
    candidates = local if local else pending_tasks
    return min(candidates, key=lambda t: t.task_id)


def _decision(task: Task, node_id: str, p_good: float | None = None,
              features: FeatureVector | None = None) -> Decision:
    return Decision(
        job_id=task.job_id,
        task_id=task.task_id,
        local=node_id in task.preferred_nodes,
        p_good=p_good,
        features=features,
    )


def fifo_select(queued: Sequence[QueuedJob], node: NodeState) -> Decision | None:
    """Highest priority first, then arrival order, then job id."""
    if node.free_slots <= 0:
        return None
    ordered = sorted(queued, key=lambda q: (-q.job.priority, q.job.arrival_time, q.job.job_id))
    for entry in ordered:
        if entry.pending_tasks:
            return _decision(pick_task(entry.pending_tasks, node.spec.node_id), node.spec.node_id)
    return None


def fair_select(
    queued: Sequence[QueuedJob],
    node: NodeState,
    pools: Mapping[str, PoolConfig],
    running_per_pool: Mapping[str, int],
) -> Decision | None:
    """Deficit-first pool pick, then smallest running/weight; FIFO inside the pool."""
    if node.free_slots <= 0:
        return None
    by_pool: dict[str, list[QueuedJob]] = {}
    for entry in queued:
        if entry.pending_tasks:
            by_pool.setdefault(entry.job.pool, []).append(entry)
    if not by_pool:
        return None

    def pool_state(name: str) -> tuple[PoolConfig, int]:
        return pools.get(name, PoolConfig()), running_per_pool.get(name, 0)

    below_min = []
    at_or_above = []
    for name in by_pool:
        config, running = pool_state(name)
        if running < config.min_share:
            deficit = config.min_share - running
            below_min.append((-deficit, running, name))
        else:
            at_or_above.append((running / config.weight, running, name))
    chosen_pool = min(below_min)[2] if below_min else min(at_or_above)[2]

    jobs = sorted(by_pool[chosen_pool], key=lambda q: (q.job.arrival_time, q.job.job_id))
    return _decision(pick_task(jobs[0].pending_tasks, node.spec.node_id), node.spec.node_id)


def capacity_select(
    queued: Sequence[QueuedJob],
    node: NodeState,
    queues: Mapping[str, QueueConfig],
    running_per_queue: Mapping[str, int],
    running_per_queue_user: Mapping[tuple[str, str], int],
) -> Decision | None:
    """Serve the hungriest queue (lowest running/capacity) whose jobs are eligible.

    Jobs whose user is at the queue's task limit are skipped; within a queue
    the order is priority-based FIFO, without preemption.
    """
    if node.free_slots <= 0:
        return None
    by_queue: dict[str, list[QueuedJob]] = {}
    for entry in queued:
        if entry.pending_tasks:
            by_queue.setdefault(entry.job.pool, []).append(entry)
    if not by_queue:
        return None
    for name in by_queue:
        if name not in queues:
            raise ConfigError(f"job queue {name!r} missing from capacity configuration")

    hunger_order = sorted(by_queue, key=lambda q: (running_per_queue.get(q, 0) / queues[q].capacity, q))
    for queue_name in hunger_order:
        limit = queues[queue_name].user_task_limit
        jobs = sorted(
            by_queue[queue_name],
            key=lambda q: (-q.job.priority, q.job.arrival_time, q.job.job_id),
        )
        for entry in jobs:
            user_running = running_per_queue_user.get((queue_name, entry.job.user), 0)
            if user_running >= limit:
                continue
            return _decision(pick_task(entry.pending_tasks, node.spec.node_id), node.spec.node_id)
    return None


def bayes_select(
    queued: Sequence[QueuedJob],
    node: NodeState,
    classifier: NaiveBayesClassifier,
    utility: UtilityFn,
    now: float,
    max_cpu_capacity: float,
    max_mem_capacity: float,
    all_bad: str = "withhold",
) -> Decision | None:
    """Classify every queued job against this node, then argmax U(i) * p_good.

    Jobs with p_good < 0.5 are excluded; if every job is excluded the policy
    either withholds the slot (default) or, under "least-bad", assigns the
    argmax anyway.  Ties (exact equality of the computed scores) fall back
    to earlier arrival, then job id.  The returned snapshot is exactly what
    was classified, so feedback later labels the right vector.
    """
    if all_bad not in ALL_BAD_POLICIES:
        raise ConfigError(f"all_bad must be one of {ALL_BAD_POLICIES}, got {all_bad!r}")
    if node.free_slots <= 0:
        return None
    node_levels = node_features(node, max_cpu_capacity, max_mem_capacity)
    scored = []
    for entry in queued:
        if not entry.pending_tasks:
            continue
        snapshot = feature_vector(entry.job.features, node_levels)
        p_good = classifier.posterior(snapshot).p_good
        score = utility(entry.job, now, node) * p_good
        scored.append((entry, p_good, score, snapshot))
    if not scored:
        return None
    candidates = [item for item in scored if item[1] >= 0.5]
    if not candidates:
        if all_bad == "withhold":
            return None
        candidates = scored
    entry, p_good, _, snapshot = min(
        candidates, key=lambda item: (-item[2], item[0].job.arrival_time, item[0].job.job_id)
    )
    task = pick_task(entry.pending_tasks, node.spec.node_id)
    return _decision(task, node.spec.node_id, p_good=p_good, features=snapshot)


class Scheduler:
    """Behavioral contract shared by all policies."""

    name: str = "?"

    def on_job_submitted(self, job: Job) -> None:
        pass

    def on_heartbeat(
        self, node: NodeState, queued: Sequence[QueuedJob], ctx: SchedulingContext
    ) -> Decision | None:
        raise NotImplementedError

    def on_feedback(self, assignment: Assignment, label: str) -> None:
        pass

    def counts_snapshot(self) -> dict | None:
        return None


class FifoScheduler(Scheduler):
    name = "fifo"

    def on_heartbeat(self, node, queued, ctx):
        return fifo_select(queued, node)


class FairScheduler(Scheduler):
    name = "fair"

    def __init__(self, pools: Mapping[str, PoolConfig]):
        self.pools = dict(pools)

    def on_heartbeat(self, node, queued, ctx):
        return fair_select(queued, node, self.pools, ctx.running_per_pool)


class CapacityScheduler(Scheduler):
    name = "capacity"

    def __init__(self, queues: Mapping[str, QueueConfig]):
        validate_capacity_config(queues)
        self.queues = dict(queues)

    def on_heartbeat(self, node, queued, ctx):
        return capacity_select(
            queued, node, self.queues, ctx.running_per_queue, ctx.running_per_queue_user
        )


class BayesScheduler(Scheduler):
    name = "bayes"

    def __init__(
        self,
        classifier: NaiveBayesClassifier,
        utility: UtilityConfig = UtilityConfig(),
        all_bad: str = "withhold",
    ):
        if all_bad not in ALL_BAD_POLICIES:
            raise ConfigError(f"all_bad must be one of {ALL_BAD_POLICIES}, got {all_bad!r}")
        self.classifier = classifier
        self.utility_config = utility
        self.utility = make_utility(utility)
        self.all_bad = all_bad

    def on_heartbeat(self, node, queued, ctx):
        return bayes_select(
            queued,
            node,
            self.classifier,
            self.utility,
            ctx.now,
            ctx.max_cpu_capacity,
            ctx.max_mem_capacity,
            all_bad=self.all_bad,
        )

    def on_feedback(self, assignment: Assignment, label: str) -> None:
        if assignment.features is None:
            raise ValueError(f"assignment {assignment.task_id} carries no feature snapshot")
        self.classifier.observe(assignment.features, label)

    def counts_snapshot(self) -> dict | None:
        return self.classifier.counts_snapshot()
