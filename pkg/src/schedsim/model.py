"""Shared domain types: jobs, tasks, nodes, and the 1-10 feature scale.

Feature levels discretize resource fractions onto a ten-step scale where 1
means "exhausted / minimal" and 10 means "maximal".  A feature vector fed to
the classifier is four job levels followed by four node levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

LEVEL_MIN = 1
LEVEL_MAX = 10

# Fractions produced by arithmetic like 1 - used/capacity can miss a level
# boundary by one ulp (1 - 0.7 scales to 3.0000000000000004).  Snapping the
# scaled value to nine decimals keeps such inputs on the intended level.
_SNAP_DECIMALS = 9

FeatureVector = tuple[int, ...]


def discretize_fraction(fraction: float) -> int:
    """Map a fraction in [0, 1] to a level in 1..10 via max(1, ceil(f * 10))."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction!r}")
    scaled = round(fraction * LEVEL_MAX, _SNAP_DECIMALS)
    return min(LEVEL_MAX, max(LEVEL_MIN, math.ceil(scaled)))


def _check_level(name: str, value: int) -> None:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer level, got {value!r}")
    if not LEVEL_MIN <= value <= LEVEL_MAX:
        raise ValueError(f"{name} must be in [{LEVEL_MIN}, {LEVEL_MAX}], got {value}")


@dataclass(frozen=True)
class JobFeatures:
    """Submitted per-job resource-appetite levels (cpu, mem, io, net)."""

    cpu_avg: int
    mem_avg: int
    io_avg: int
    net_avg: int

    def __post_init__(self):
        _check_level("cpu_avg", self.cpu_avg)
        _check_level("mem_avg", self.mem_avg)
        _check_level("io_avg", self.io_avg)
        _check_level("net_avg", self.net_avg)

    def as_levels(self) -> FeatureVector:
        return (self.cpu_avg, self.mem_avg, self.io_avg, self.net_avg)


JOB_FEATURE_COUNT = 4
NODE_FEATURE_COUNT = 4
FEATURE_COUNT = JOB_FEATURE_COUNT + NODE_FEATURE_COUNT


@dataclass(frozen=True)
class Task:
    """Schedulable unit: nominal work plus fractional resource demands."""

    task_id: str
    job_id: str
    work: float
    cpu_demand: float
    mem_demand: float
    preferred_nodes: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.work <= 0:
            raise ValueError(f"task {self.task_id}: work must be > 0, got {self.work}")
        for name in ("cpu_demand", "mem_demand"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"task {self.task_id}: {name} must be in [0, 1], got {value}")
        object.__setattr__(self, "preferred_nodes", frozenset(self.preferred_nodes))


@dataclass(frozen=True)
class Job:
    """A submitted unit of work: metadata, feature levels, and its tasks."""

    job_id: str
    user: str
    pool: str
    priority: int
    arrival_time: float
    features: JobFeatures
    tasks: tuple[Task, ...]

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if not self.tasks:
            raise ValueError(f"job {self.job_id}: tasks must be non-empty")
        if self.arrival_time < 0:
            raise ValueError(f"job {self.job_id}: arrival_time must be >= 0")
        if self.priority < 0:
            raise ValueError(f"job {self.job_id}: priority must be >= 0")
        seen = set()
        for task in self.tasks:
            if task.job_id != self.job_id:
                raise ValueError(f"job {self.job_id}: task {task.task_id} carries job_id {task.job_id}")
            if task.task_id in seen:
                raise ValueError(f"job {self.job_id}: duplicate task_id {task.task_id}")
            seen.add(task.task_id)

    @property
    def task_count(self) -> int:
        return len(self.tasks)


@dataclass(frozen=True)
class NodeSpec:
    """Static description of a TaskTracker node."""

    node_id: str
    cpu_capacity: float
    mem_capacity: float
    slots: int
    heartbeat_interval: float
    heartbeat_phase: float = 0.0

    def __post_init__(self):
        if self.cpu_capacity <= 0 or self.mem_capacity <= 0:
            raise ValueError(f"node {self.node_id}: capacities must be > 0")
        if self.slots < 1:
            raise ValueError(f"node {self.node_id}: slots must be >= 1")
        if self.heartbeat_interval <= 0:
            raise ValueError(f"node {self.node_id}: heartbeat_interval must be > 0")
        if not 0.0 <= self.heartbeat_phase < self.heartbeat_interval:
            raise ValueError(
                f"node {self.node_id}: heartbeat_phase must be in [0, heartbeat_interval)"
            )


@dataclass
class RunningTask:
    """A placed task with the work it still has to do."""

    task: Task
    remaining_work: float


@dataclass
class NodeState:
    """Dynamic node state: running tasks and cached demand sums.

    Running tasks are keyed by (job_id, task_id) because task ids are only
    unique within their job.  The cached sums are recomputed from ``running``
    on every placement and removal so they can never drift from the task set.
    """

    spec: NodeSpec
    running: dict[tuple[str, str], RunningTask] = field(default_factory=dict)
    cpu_demand_sum: float = 0.0
    mem_used: float = 0.0

    @property
    def free_slots(self) -> int:
        return self.spec.slots - len(self.running)

    def cpu_utilization(self) -> float:
        return min(1.0, self.cpu_demand_sum / self.spec.cpu_capacity)

    def mem_utilization(self) -> float:
        return min(1.0, self.mem_used / self.spec.mem_capacity)

    def free_cpu_fraction(self) -> float:
        return max(0.0, 1.0 - self.cpu_demand_sum / self.spec.cpu_capacity)

    def free_mem_fraction(self) -> float:
        return max(0.0, 1.0 - self.mem_used / self.spec.mem_capacity)

    def speed(self) -> float:
        """Common execution speed: 1.0 under capacity, else proportional sharing."""
        if self.cpu_demand_sum <= self.spec.cpu_capacity:
            return 1.0
        return self.spec.cpu_capacity / self.cpu_demand_sum

    def place(self, task: Task) -> None:
        key = (task.job_id, task.task_id)
        if len(self.running) >= self.spec.slots:
            raise RuntimeError(f"node {self.spec.node_id}: no free slot for {task.task_id}")
        if key in self.running:
            raise RuntimeError(f"node {self.spec.node_id}: {task.task_id} already running")
        self.running[key] = RunningTask(task, task.work)
        self._recompute_sums()

    def remove(self, job_id: str, task_id: str) -> RunningTask:
        entry = self.running.pop((job_id, task_id))
        self._recompute_sums()
        return entry

    def _recompute_sums(self) -> None:
        self.cpu_demand_sum = sum(rt.task.cpu_demand for rt in self.running.values())
        self.mem_used = sum(rt.task.mem_demand for rt in self.running.values())


def node_features(
    state: NodeState, max_cpu_capacity: float, max_mem_capacity: float
) -> FeatureVector:
    """Node half of a classifier feature vector.

    Returns [free_cpu, free_mem, cpu_capacity, mem_capacity] levels, with
    capacities discretized relative to the largest node in the cluster.
    """
    return (
        discretize_fraction(state.free_cpu_fraction()),
        discretize_fraction(state.free_mem_fraction()),
        discretize_fraction(state.spec.cpu_capacity / max_cpu_capacity),
        discretize_fraction(state.spec.mem_capacity / max_mem_capacity),
    )


def feature_vector(job_features: JobFeatures, node_levels: Sequence[int]) -> FeatureVector:
    """Concatenate job and node levels into one classifier input."""
    return job_features.as_levels() + tuple(node_levels)


@dataclass(frozen=True)
class Assignment:
    """One task placement, with the feature snapshot that justified it.

    The snapshot is what feedback later labels, so it is frozen at decision
    time and never recomputed.
    """

    task_id: str
    job_id: str
    node_id: str
    time: float
    features: FeatureVector
    local: bool
