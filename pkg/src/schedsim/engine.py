"""Deterministic discrete-event simulation of a heartbeat-driven cluster.

The engine processes three event kinds in (time, insertion-sequence) order:
job arrivals, per-node heartbeats, and task finishes.  Heartbeats drive
everything coordinator-side: a node's outstanding assignments are labeled
against its current overload status, then the scheduler is offered the free
slots, then the next heartbeat is chained while there is work anywhere.

Execution uses proportional sharing: a node over its CPU capacity runs all
of its tasks at capacity/demand speed.  Task-finish events are predicted
from current speed and invalidated (via a per-node epoch counter) whenever a
placement or finish changes that speed.

Everything is a pure function of (config, workload): identical inputs yield
byte-identical event logs.
"""

from __future__ import annotations

import hashlib
import heapq
import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Mapping, Sequence

from .classifier import BAD, GOOD, NaiveBayesClassifier
from .errors import ConfigError
from .model import (
    Assignment,
    FEATURE_COUNT,
    Job,
    LEVEL_MAX,
    NodeSpec,
    NodeState,
    Task,
    feature_vector,
    node_features,
)
from .overload import OverloadRule, default_rule
from .schedulers import (
    BayesScheduler,
    CapacityScheduler,
    Decision,
    FairScheduler,
    FifoScheduler,
    PoolConfig,
    QueueConfig,
    QueuedJob,
    SCHEDULER_NAMES,
    Scheduler,
    SchedulingContext,
    UtilityConfig,
    validate_fair_config,
)

if TYPE_CHECKING:
    from .report import SimReport


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs besides the workload itself."""

    nodes: tuple[NodeSpec, ...]
    scheduler: str = "fifo"
    alpha: float = 1.0
    utility: UtilityConfig = UtilityConfig()
    all_bad: str = "withhold"
    overload_rule: OverloadRule = field(default_factory=default_rule)
    pools: Mapping[str, PoolConfig] | None = None
    queues: Mapping[str, QueueConfig] | None = None
    seed: int = 0
    horizon: float | None = None
    debug_checks: bool = False

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if not self.nodes:
            raise ConfigError("run needs at least one node")
        ids = [spec.node_id for spec in self.nodes]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"duplicate node ids in cluster: {ids}")
        if self.scheduler not in SCHEDULER_NAMES:
            raise ConfigError(
                f"unknown scheduler {self.scheduler!r}; valid names: {', '.join(SCHEDULER_NAMES)}"
            )
        if self.horizon is not None and self.horizon <= 0:
            raise ConfigError(f"horizon must be > 0, got {self.horizon}")

    @property
    def total_slots(self) -> int:
        return sum(spec.slots for spec in self.nodes)


class EventLog:
    """Header plus ordered records; serializes to line-delimited JSON."""

    def __init__(self, header: dict, records: list[dict]):
        self.header = header
        self.records = records

    def lines(self) -> list[str]:
        out = [json.dumps(self.header, separators=(",", ":"))]
        out.extend(json.dumps(rec, separators=(",", ":")) for rec in self.records)
        return out

    def dumps(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.dumps().encode("utf-8")).hexdigest()


def cluster_digest(nodes: Sequence[NodeSpec]) -> str:
    """Stable fingerprint of a cluster layout, for cross-run comparability checks."""
    canonical = json.dumps([_node_dict(spec) for spec in nodes], separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _node_dict(spec: NodeSpec) -> dict:
    return {
        "node": spec.node_id,
        "cpu_capacity": spec.cpu_capacity,
        "mem_capacity": spec.mem_capacity,
        "slots": spec.slots,
        "heartbeat_interval": spec.heartbeat_interval,
        "heartbeat_phase": spec.heartbeat_phase,
    }


def build_scheduler(config: RunConfig, workload: Sequence[Job]) -> Scheduler:
    """Instantiate the configured policy, filling per-workload defaults.

    Fair pools absent from the configuration get min_share 0 / weight 1.
    When no capacity queues are configured, the workload's queues share
    capacity equally with a never-binding per-user limit.
    """
    name = config.scheduler
    if name == "fifo":
        return FifoScheduler()
    if name == "fair":
        pools = dict(config.pools) if config.pools else {}
        for pool in sorted({job.pool for job in workload}):
            pools.setdefault(pool, PoolConfig())
        validate_fair_config(pools, config.total_slots)
        return FairScheduler(pools)
    if name == "capacity":
        if config.queues is not None:
            queues = dict(config.queues)
            missing = sorted({job.pool for job in workload} - queues.keys())
            if missing:
                raise ConfigError(f"workload queues missing from capacity config: {missing}")
        else:
            names = sorted({job.pool for job in workload}) or ["default"]
            share = 1.0 / len(names)
            queues = {q: QueueConfig(share, config.total_slots) for q in names}
        return CapacityScheduler(queues)
    classifier = NaiveBayesClassifier(FEATURE_COUNT, LEVEL_MAX, config.alpha)
    return BayesScheduler(classifier, config.utility, config.all_bad)


@dataclass
class RunResult:
    report: "SimReport"
    log: EventLog


_ARRIVAL = 0
_HEARTBEAT = 1
_FINISH = 2


def _next_heartbeat_after(spec: NodeSpec, t: float) -> float:
    """First grid point phase + k * interval strictly after t."""
    if t < spec.heartbeat_phase:
        return spec.heartbeat_phase
    k = math.floor((t - spec.heartbeat_phase) / spec.heartbeat_interval) + 1
    hb = spec.heartbeat_phase + k * spec.heartbeat_interval
    while hb <= t:
        hb += spec.heartbeat_interval
    return hb


class _Simulation:
    def __init__(self, config: RunConfig, workload: Sequence[Job], scheduler: Scheduler):
        self.config = config
        self.scheduler = scheduler
        self.rule = config.overload_rule
        self.workload = sorted(workload, key=lambda j: (j.arrival_time, j.job_id))
        ids = [job.job_id for job in self.workload]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate job ids in workload")

        self.nodes: dict[str, NodeState] = {s.node_id: NodeState(s) for s in config.nodes}
        self.max_cpu = max(s.cpu_capacity for s in config.nodes)
        self.max_mem = max(s.mem_capacity for s in config.nodes)

        self.heap: list[tuple[float, int, int, object]] = []
        self.seq = itertools.count()
        self.records: list[dict] = []

        self.jobs: dict[str, Job] = {}
        self.pending: dict[str, dict[str, Task]] = {}
        self.pending_task_count = 0
        self.arrivals_left = len(self.workload)
        self.running_total = 0
        self.finished_count = 0
        self.total_tasks = sum(job.task_count for job in self.workload)
        self.assigned_tasks: set[tuple[str, str]] = set()

        self.feedback: dict[str, list[Assignment]] = {n: [] for n in self.nodes}
        self.hb_armed: dict[str, bool] = {n: False for n in self.nodes}
        self.epoch: dict[str, int] = {n: 0 for n in self.nodes}
        self.last_advance: dict[str, float] = {n: 0.0 for n in self.nodes}

        self.stall_votes: set[str] = set()
        self.stalled = False

    # -- event queue ------------------------------------------------------

    def _push(self, time: float, kind: int, payload: object) -> None:
        heapq.heappush(self.heap, (time, next(self.seq), kind, payload))

    # -- bookkeeping ------------------------------------------------------

    def _advance_node(self, node: NodeState, t: float) -> None:
        node_id = node.spec.node_id
        last = self.last_advance[node_id]
        if t > last and node.running:
            speed = node.speed()
            dt = t - last
            for rt in node.running.values():
                rt.remaining_work -= speed * dt
        self.last_advance[node_id] = t

    def _reschedule_finishes(self, node: NodeState, t: float) -> None:
        node_id = node.spec.node_id
        self.epoch[node_id] += 1
        epoch = self.epoch[node_id]
        speed = node.speed()
        for (job_id, task_id), rt in node.running.items():
            finish_t = t + max(0.0, rt.remaining_work) / speed
            self._push(finish_t, _FINISH, (node_id, job_id, task_id, epoch))

    def _context(self, now: float) -> SchedulingContext:
        per_group: Counter[str] = Counter()
        per_group_user: Counter[tuple[str, str]] = Counter()
        for node in self.nodes.values():
            for rt in node.running.values():
                job = self.jobs[rt.task.job_id]
                per_group[job.pool] += 1
                per_group_user[(job.pool, job.user)] += 1
        return SchedulingContext(
            now=now,
            running_per_pool=per_group,
            running_per_queue=per_group,
            running_per_queue_user=per_group_user,
            max_cpu_capacity=self.max_cpu,
            max_mem_capacity=self.max_mem,
        )

    def _queued_view(self) -> list[QueuedJob]:
        return [
            QueuedJob(self.jobs[job_id], tuple(tasks.values()))
            for job_id, tasks in self.pending.items()
        ]

    def _debug_validate(self, node: NodeState) -> None:
        cpu = sum(rt.task.cpu_demand for rt in node.running.values())
        mem = sum(rt.task.mem_demand for rt in node.running.values())
        assert math.isclose(node.cpu_demand_sum, cpu, abs_tol=1e-9), "cpu_demand_sum drifted"
        assert math.isclose(node.mem_used, mem, abs_tol=1e-9), "mem_used drifted"
        assert len(node.running) <= node.spec.slots, "slot count exceeded"
        assert self.pending_task_count == sum(len(t) for t in self.pending.values())
        assert self.running_total == sum(len(n.running) for n in self.nodes.values())

    # -- event handlers ----------------------------------------------------

    def _on_arrival(self, t: float, job: Job) -> None:
        self.jobs[job.job_id] = job
        self.pending[job.job_id] = {task.task_id: task for task in job.tasks}
        self.pending_task_count += job.task_count
        self.arrivals_left -= 1
        self.scheduler.on_job_submitted(job)
        self.records.append({"t": t, "ev": "arrival", "job": job.job_id, "tasks": job.task_count})
        self.stall_votes.clear()
        for node in self.nodes.values():
            node_id = node.spec.node_id
            if not self.hb_armed[node_id]:
                self._push(_next_heartbeat_after(node.spec, t), _HEARTBEAT, node_id)
                self.hb_armed[node_id] = True

    def _on_heartbeat(self, t: float, node_id: str) -> None:
        node = self.nodes[node_id]
        overloaded = self.rule.evaluate(node)
        self.records.append({"t": t, "ev": "heartbeat", "node": node_id, "overloaded": overloaded})

        outstanding = self.feedback[node_id]
        if outstanding:
            label = BAD if overloaded else GOOD
            for assignment in outstanding:
                self.scheduler.on_feedback(assignment, label)
                self.records.append(
                    {
                        "t": t,
                        "ev": "feedback",
                        "node": node_id,
                        "job": assignment.job_id,
                        "task": assignment.task_id,
                        "label": label,
                    }
                )
            outstanding.clear()
            self.stall_votes.clear()

        assigned_any = False
        while node.free_slots > 0 and self.pending_task_count > 0:
            decision = self.scheduler.on_heartbeat(node, self._queued_view(), self._context(t))
            if decision is None:
                break
            self._place(t, node, decision)
            assigned_any = True

        if (
            not assigned_any
            and self.pending_task_count > 0
            and self.arrivals_left == 0
            and self.running_total == 0
            and not any(self.feedback.values())
        ):
            # Nothing is running, no feedback or arrival can ever change the
            # scheduler's mind again: once every node has declined in this
            # exact state the run is provably stuck.
            self.stall_votes.add(node_id)
            if self.stall_votes == set(self.nodes):
                self.records.append({"t": t, "ev": "stall"})
                self.stalled = True
                return

        active = (
            self.pending_task_count > 0
            or self.running_total > 0
            or bool(self.feedback[node_id])
        )
        if active:
            self._push(t + node.spec.heartbeat_interval, _HEARTBEAT, node_id)
        else:
            self.hb_armed[node_id] = False

    def _place(self, t: float, node: NodeState, decision: Decision) -> None:
        job_id, task_id = decision.job_id, decision.task_id
        job_pending = self.pending.get(job_id)
        if job_pending is None or task_id not in job_pending:
            raise RuntimeError(f"scheduler returned non-pending task {task_id} of job {job_id}")
        if (job_id, task_id) in self.assigned_tasks:
            raise RuntimeError(f"task {task_id} of job {job_id} assigned twice")
        task = job_pending.pop(task_id)
        if not job_pending:
            del self.pending[job_id]
        self.pending_task_count -= 1
        self.assigned_tasks.add((job_id, task_id))

        features = decision.features
        if features is None:
            features = feature_vector(
                self.jobs[job_id].features, node_features(node, self.max_cpu, self.max_mem)
            )
        local = node.spec.node_id in task.preferred_nodes

        self._advance_node(node, t)
        node.place(task)
        self.running_total += 1
        self._reschedule_finishes(node, t)

        assignment = Assignment(task_id, job_id, node.spec.node_id, t, features, local)
        self.feedback[node.spec.node_id].append(assignment)
        self.records.append(
            {
                "t": t,
                "ev": "assign",
                "node": node.spec.node_id,
                "job": job_id,
                "task": task_id,
                "local": local,
                "p_good": decision.p_good,
            }
        )
        self.stall_votes.clear()
        if self.config.debug_checks:
            self._debug_validate(node)

    def _on_finish(self, t: float, node_id: str, job_id: str, task_id: str, epoch: int) -> None:
        if epoch != self.epoch[node_id]:
            return
        node = self.nodes[node_id]
        self._advance_node(node, t)
        node.remove(job_id, task_id)
        self.running_total -= 1
        self.finished_count += 1
        self.records.append(
            {"t": t, "ev": "finish", "node": node_id, "job": job_id, "task": task_id}
        )
        self._reschedule_finishes(node, t)
        self.stall_votes.clear()
        if self.config.debug_checks:
            self._debug_validate(node)

    # -- main loop ----------------------------------------------------------

    def run(self) -> EventLog:
        for job in self.workload:
            self._push(job.arrival_time, _ARRIVAL, job)

        horizon = self.config.horizon
        while self.heap and not self.stalled:
            time, _, kind, payload = heapq.heappop(self.heap)
            if horizon is not None and time > horizon:
                break
            if kind == _ARRIVAL:
                self._on_arrival(time, payload)
            elif kind == _HEARTBEAT:
                self._on_heartbeat(time, payload)
            else:
                node_id, job_id, task_id, epoch = payload
                self._on_finish(time, node_id, job_id, task_id, epoch)

        counts = self.scheduler.counts_snapshot()
        if counts is not None:
            end_t = self.records[-1]["t"] if self.records else 0.0
            self.records.append({"t": end_t, "ev": "classifier", "counts": counts})
        return EventLog(self._header(), self.records)

    def _header(self) -> dict:
        from .workload import trace_digest

        return {
            "record": "header",
            "seed": self.config.seed,
            "scheduler": self.config.scheduler,
            "alpha": self.config.alpha,
            "utility": self.config.utility.kind,
            "all_bad": self.config.all_bad,
            "overload_rule": self.rule.to_dict(),
            "horizon": self.config.horizon,
            "nodes": [_node_dict(spec) for spec in self.config.nodes],
            "total_jobs": len(self.workload),
            "total_tasks": self.total_tasks,
            "workload_digest": trace_digest(self.workload),
            "cluster_digest": cluster_digest(self.config.nodes),
        }


def run(config: RunConfig, workload: Sequence[Job], scheduler: Scheduler | None = None) -> RunResult:
    """Simulate one run and return its report plus the full event log.

    A prebuilt scheduler may be injected (e.g. a pre-trained classifier);
    by default one is built from the config.
    """
    from .report import summarize

    if scheduler is None:
        scheduler = build_scheduler(config, workload)
    log = _Simulation(config, workload, scheduler).run()
    return RunResult(summarize(log), log)
