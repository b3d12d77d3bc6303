"""Synthetic workload generation and the line-delimited trace format.

One job per line, JSON-encoded.  Field names are fixed (see docs/formats.md);
unknown or missing fields are rejected so that format drift fails loudly.

Generated workloads tie feature levels to actual demands (level =
discretize_fraction(demand)), which gives the classifier a learnable signal:
a job that claims level-9 CPU appetite really does demand that much.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigError, TraceError
from .model import Job, JobFeatures, Task, discretize_fraction

_JOB_FIELDS = {"job_id", "user", "pool", "priority", "arrival_time", "features", "tasks"}
_FEATURE_FIELDS = {"cpu", "mem", "io", "net"}
_TASK_FIELDS = {"task_id", "work", "cpu_demand", "mem_demand", "preferred_nodes"}


@dataclass(frozen=True)
class WorkloadSpec:
    """Parameters for the synthetic generator; deterministic given seed."""

    job_count: int
    seed: int = 0
    users: int = 3
    pools: int = 2
    arrival_window: float = 50.0
    task_count: tuple[int, int] = (1, 4)
    work: tuple[float, float] = (5.0, 20.0)
    heavy_fraction: float = 0.3
    heavy_demand: tuple[float, float] = (0.6, 1.0)
    light_demand: tuple[float, float] = (0.05, 0.3)
    locality_fanout: int = 1
    node_count: int = 3
    priority_levels: int = 1

    def __post_init__(self):
        if self.job_count < 1:
            raise ConfigError(f"job_count must be >= 1, got {self.job_count}")
        if self.users < 1 or self.pools < 1:
            raise ConfigError("users and pools must be >= 1")
        if self.arrival_window < 0:
            raise ConfigError(f"arrival_window must be >= 0, got {self.arrival_window}")
        lo, hi = self.task_count
        if lo < 1 or hi < lo:
            raise ConfigError(f"task_count range invalid: {self.task_count}")
        lo, hi = self.work
        if lo <= 0 or hi < lo:
            raise ConfigError(f"work range invalid: {self.work}")
        if not 0.0 <= self.heavy_fraction <= 1.0:
            raise ConfigError(f"heavy_fraction must be in [0, 1], got {self.heavy_fraction}")
        for name in ("heavy_demand", "light_demand"):
            lo, hi = getattr(self, name)
            if not (0.0 <= lo <= hi <= 1.0):
                raise ConfigError(f"{name} range invalid: {(lo, hi)}")
        if self.node_count < 1:
            raise ConfigError(f"node_count must be >= 1, got {self.node_count}")
        if not 0 <= self.locality_fanout <= self.node_count:
            raise ConfigError(
                f"locality_fanout must be in [0, node_count], got {self.locality_fanout}"
            )
        if self.priority_levels < 1:
            raise ConfigError(f"priority_levels must be >= 1, got {self.priority_levels}")

    def with_seed(self, seed: int) -> "WorkloadSpec":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        return {
            "job_count": self.job_count,
            "seed": self.seed,
            "users": self.users,
            "pools": self.pools,
            "arrival_window": self.arrival_window,
            "task_count": list(self.task_count),
            "work": list(self.work),
            "heavy_fraction": self.heavy_fraction,
            "heavy_demand": list(self.heavy_demand),
            "light_demand": list(self.light_demand),
            "locality_fanout": self.locality_fanout,
            "node_count": self.node_count,
            "priority_levels": self.priority_levels,
        }


def spec_from_dict(obj: dict) -> WorkloadSpec:
    if not isinstance(obj, dict):
        raise ConfigError("workload spec must be a JSON object")
    known = set(WorkloadSpec.__dataclass_fields__)
    unknown = set(obj) - known
    if unknown:
        raise ConfigError(f"unknown workload spec fields: {sorted(unknown)}")
    if "job_count" not in obj:
        raise ConfigError("workload spec needs job_count")
    kwargs = dict(obj)
    for name in ("task_count", "work", "heavy_demand", "light_demand"):
        if name in kwargs:
            kwargs[name] = tuple(kwargs[name])
    return WorkloadSpec(**kwargs)


def generate(spec: WorkloadSpec) -> list[Job]:
    """Draw a workload; identical spec (including seed) gives identical jobs."""
    rng = random.Random(spec.seed)
    node_ids = [f"n{i}" for i in range(spec.node_count)]
    arrivals = sorted(rng.uniform(0.0, spec.arrival_window) for _ in range(spec.job_count))

    jobs = []
    for i, arrival in enumerate(arrivals):
        job_id = f"j{i:05d}"
        user = f"u{rng.randrange(spec.users)}"
        pool = f"p{rng.randrange(spec.pools)}"
        priority = rng.randrange(spec.priority_levels)
        demand_range = spec.heavy_demand if rng.random() < spec.heavy_fraction else spec.light_demand
        cpu_demand = rng.uniform(*demand_range)
        mem_demand = rng.uniform(*demand_range)
        io_fraction = rng.uniform(*demand_range)
        net_fraction = rng.uniform(*demand_range)
        features = JobFeatures(
            cpu_avg=discretize_fraction(cpu_demand),
            mem_avg=discretize_fraction(mem_demand),
            io_avg=discretize_fraction(io_fraction),
            net_avg=discretize_fraction(net_fraction),
        )
        tasks = []
        for k in range(rng.randint(*spec.task_count)):
            preferred = (
                frozenset(rng.sample(node_ids, spec.locality_fanout))
                if spec.locality_fanout
                else frozenset()
            )
            tasks.append(
                Task(
                    task_id=f"{job_id}-t{k:03d}",
                    job_id=job_id,
                    work=rng.uniform(*spec.work),
                    cpu_demand=cpu_demand,
                    mem_demand=mem_demand,
                    preferred_nodes=preferred,
                )
            )
        jobs.append(
            Job(
                job_id=job_id,
                user=user,
                pool=pool,
                priority=priority,
                arrival_time=arrival,
                features=features,
                tasks=tuple(tasks),
            )
        )
    return jobs


# -- trace serialization ----------------------------------------------------


def job_to_record(job: Job) -> dict:
    return {
        "job_id": job.job_id,
        "user": job.user,
        "pool": job.pool,
        "priority": job.priority,
        "arrival_time": job.arrival_time,
        "features": {
            "cpu": job.features.cpu_avg,
            "mem": job.features.mem_avg,
            "io": job.features.io_avg,
            "net": job.features.net_avg,
        },
        "tasks": [
            {
                "task_id": task.task_id,
                "work": task.work,
                "cpu_demand": task.cpu_demand,
                "mem_demand": task.mem_demand,
                "preferred_nodes": sorted(task.preferred_nodes),
            }
            for task in job.tasks
        ],
    }


def _require_fields(obj: dict, fields: set[str], what: str, line: int) -> None:
    if not isinstance(obj, dict):
        raise TraceError(f"{what} must be a JSON object", line)
    missing = fields - set(obj)
    if missing:
        raise TraceError(f"{what} missing fields: {sorted(missing)}", line)
    unknown = set(obj) - fields
    if unknown:
        raise TraceError(f"{what} has unknown fields: {sorted(unknown)}", line)


def record_to_job(obj: dict, line: int = 0) -> Job:
    _require_fields(obj, _JOB_FIELDS, "job record", line)
    job_id = obj["job_id"]
    _require_fields(obj["features"], _FEATURE_FIELDS, f"job {job_id} features", line)
    if not isinstance(obj["tasks"], list):
        raise TraceError(f"job {job_id}: tasks must be a list", line)
    try:
        features = JobFeatures(
            cpu_avg=obj["features"]["cpu"],
            mem_avg=obj["features"]["mem"],
            io_avg=obj["features"]["io"],
            net_avg=obj["features"]["net"],
        )
        tasks = []
        for task_obj in obj["tasks"]:
            _require_fields(task_obj, _TASK_FIELDS, f"job {job_id} task", line)
            tasks.append(
                Task(
                    task_id=task_obj["task_id"],
                    job_id=job_id,
                    work=task_obj["work"],
                    cpu_demand=task_obj["cpu_demand"],
                    mem_demand=task_obj["mem_demand"],
                    preferred_nodes=frozenset(task_obj["preferred_nodes"]),
                )
            )
        return Job(
            job_id=job_id,
            user=obj["user"],
            pool=obj["pool"],
            priority=obj["priority"],
            arrival_time=obj["arrival_time"],
            features=features,
            tasks=tuple(tasks),
        )
    except (ValueError, TypeError) as exc:
        raise TraceError(f"job {job_id}: {exc}", line) from exc


def dumps_trace(jobs: Sequence[Job]) -> str:
    if not jobs:
        return ""
    return "\n".join(json.dumps(job_to_record(job), separators=(",", ":")) for job in jobs) + "\n"


def save_trace(jobs: Sequence[Job], path: str | Path) -> None:
    Path(path).write_text(dumps_trace(jobs), encoding="utf-8")


def parse_trace(lines: Iterable[str]) -> list[Job]:
    jobs = []
    seen = set()
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceError(f"invalid JSON: {exc.msg}", line_no) from exc
        job = record_to_job(obj, line_no)
        if job.job_id in seen:
            raise TraceError(f"duplicate job_id {job.job_id}", line_no)
        seen.add(job.job_id)
        jobs.append(job)
    return jobs


def load_trace(path: str | Path) -> list[Job]:
    """Read a trace file; an empty file is a valid, empty workload."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_trace(text.splitlines())


def trace_digest(jobs: Sequence[Job]) -> str:
    """Stable fingerprint of a workload, for cross-run comparability checks.

    Canonicalized by job_id so list order does not change the digest.
    """
    canonical = sorted(jobs, key=lambda job: job.job_id)
    return hashlib.sha256(dumps_trace(canonical).encode("utf-8")).hexdigest()
