"""Pydantic request/response models for the simulation service.

These mirror the core dataclasses one-to-one; the converters at the bottom
are the only place the two worlds meet.  Request models reject unknown
fields so client typos fail fast.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .. import __version__
from ..engine import RunConfig
from ..errors import ConfigError
from ..model import Job, JobFeatures, NodeSpec, Task
from ..overload import Clause, OverloadRule
from ..report import Comparison, SimReport
from ..schedulers import PoolConfig, QueueConfig, UtilityConfig
from ..workload import WorkloadSpec


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# -- domain mirrors -----------------------------------------------------------


class JobFeaturesModel(_StrictModel):
    cpu: int = Field(ge=1, le=10)
    mem: int = Field(ge=1, le=10)
    io: int = Field(ge=1, le=10)
    net: int = Field(ge=1, le=10)


class TaskModel(_StrictModel):
    task_id: str
    work: float = Field(gt=0)
    cpu_demand: float = Field(ge=0, le=1)
    mem_demand: float = Field(ge=0, le=1)
    preferred_nodes: list[str] = Field(default_factory=list)


class JobModel(_StrictModel):
    job_id: str
    user: str
    pool: str
    priority: int = Field(ge=0)
    arrival_time: float = Field(ge=0)
    features: JobFeaturesModel
    tasks: list[TaskModel] = Field(min_length=1)


class NodeModel(_StrictModel):
    node_id: str
    cpu_capacity: float = Field(gt=0)
    mem_capacity: float = Field(gt=0)
    slots: int = Field(default=2, ge=1)
    heartbeat_interval: float = Field(default=1.0, gt=0)
    heartbeat_phase: float | None = Field(default=None, ge=0)


class ClauseModel(_StrictModel):
    metric: Literal["cpu_utilization", "mem_utilization", "free_mem_fraction"]
    comparator: Literal[">", "<"]
    threshold: float = Field(ge=0, le=1)


class RuleModel(_StrictModel):
    combine: Literal["any", "all"] = "any"
    clauses: list[ClauseModel] = Field(min_length=1)


class ClusterModel(_StrictModel):
    nodes: list[NodeModel] = Field(min_length=1)
    overload_rule: RuleModel | None = None


class PoolModel(_StrictModel):
    min_share: int = Field(default=0, ge=0)
    weight: float = Field(default=1.0, gt=0)


class QueueModel(_StrictModel):
    capacity: float = Field(gt=0, le=1)
    user_task_limit: int = Field(ge=1)


class SchedulerParamsModel(_StrictModel):
    name: Literal["fifo", "fair", "capacity", "bayes"]
    alpha: float = Field(default=1.0, gt=0)
    utility: Literal["constant", "priority", "age"] = "priority"
    all_bad: Literal["withhold", "least-bad"] = "withhold"
    pools: dict[str, PoolModel] | None = None
    queues: dict[str, QueueModel] | None = None


class WorkloadSpecModel(_StrictModel):
    job_count: int = Field(ge=1)
    seed: int = 0
    users: int = Field(default=3, ge=1)
    pools: int = Field(default=2, ge=1)
    arrival_window: float = Field(default=50.0, ge=0)
    task_count: tuple[int, int] = (1, 4)
    work: tuple[float, float] = (5.0, 20.0)
    heavy_fraction: float = Field(default=0.3, ge=0, le=1)
    heavy_demand: tuple[float, float] = (0.6, 1.0)
    light_demand: tuple[float, float] = (0.05, 0.3)
    locality_fanout: int = Field(default=1, ge=0)
    node_count: int = Field(default=3, ge=1)
    priority_levels: int = Field(default=1, ge=1)


# -- requests / responses -----------------------------------------------------


class HealthResponse(BaseModel):
    status: str
    version: str


class SchedulersResponse(BaseModel):
    schedulers: list[str]


class GenerateRequest(WorkloadSpecModel):
    pass


class GenerateResponse(BaseModel):
    job_count: int
    task_count: int
    workload_digest: str
    trace_lines: list[str]


class JobRowModel(BaseModel):
    job_id: str
    arrival: float
    tasks: int
    assigned: int
    finished: int
    local: int
    finish: float | None
    turnaround: float | None


class ReportModel(BaseModel):
    scheduler: str
    seed: int
    makespan: float
    turnaround_mean: float
    turnaround_median: float
    heartbeats: int
    overload_heartbeats: int
    feedback_count: int
    bad_label_count: int
    assignments: int
    local_assignments: int
    locality_rate: float
    slot_utilization: float
    truncated: bool
    stalled: bool
    total_jobs: int
    total_tasks: int
    completed_tasks: int
    workload_digest: str
    cluster_digest: str
    event_log_sha256: str
    jobs: list[JobRowModel]
    classifier_counts: dict | None


class RunRequest(_StrictModel):
    workload: list[JobModel]
    cluster: ClusterModel
    scheduler: SchedulerParamsModel
    overload_rule: RuleModel | None = None
    seed: int = 0
    horizon: float | None = Field(default=None, gt=0)
    include_log: bool = False


class RunResponse(BaseModel):
    report: ReportModel
    event_log_lines: list[str] | None = None


class ComparisonRowModel(BaseModel):
    scheduler: str
    runs: int
    mean: dict[str, float]
    std: dict[str, float]
    delta_vs_baseline: dict[str, float | None] | None


class RunRowModel(BaseModel):
    scheduler: str
    seed: int
    metrics: dict[str, float]
    event_log_sha256: str
    truncated: bool
    stalled: bool


class ComparisonModel(BaseModel):
    baseline: str | None
    metrics: list[str]
    rows: list[ComparisonRowModel]
    runs: list[RunRowModel]


class CompareRequest(_StrictModel):
    schedulers: list[Literal["fifo", "fair", "capacity", "bayes"]] = Field(min_length=1)
    seeds: list[int] = Field(min_length=1)
    cluster: ClusterModel
    workload: list[JobModel] | None = None
    workload_spec: WorkloadSpecModel | None = None
    alpha: float = Field(default=1.0, gt=0)
    utility: Literal["constant", "priority", "age"] = "priority"
    all_bad: Literal["withhold", "least-bad"] = "withhold"
    pools: dict[str, PoolModel] | None = None
    queues: dict[str, QueueModel] | None = None
    overload_rule: RuleModel | None = None
    horizon: float | None = Field(default=None, gt=0)
    parallel: bool = True

    @model_validator(mode="after")
    def _exactly_one_workload(self):
        if (self.workload is None) == (self.workload_spec is None):
            raise ValueError("provide exactly one of workload or workload_spec")
        return self


class CompareResponse(BaseModel):
    comparison: ComparisonModel


class SweepBlockModel(BaseModel):
    value: float
    comparison: ComparisonModel


class SweepRequest(_StrictModel):
    parameter: Literal["alpha", "heavy_fraction", "cpu_overload_threshold"]
    values: list[float] = Field(min_length=1)
    base: CompareRequest


class SweepResponse(BaseModel):
    blocks: list[SweepBlockModel]


# -- converters ---------------------------------------------------------------


def to_job(model: JobModel) -> Job:
    features = JobFeatures(
        cpu_avg=model.features.cpu,
        mem_avg=model.features.mem,
        io_avg=model.features.io,
        net_avg=model.features.net,
    )
    tasks = tuple(
        Task(
            task_id=t.task_id,
            job_id=model.job_id,
            work=t.work,
            cpu_demand=t.cpu_demand,
            mem_demand=t.mem_demand,
            preferred_nodes=frozenset(t.preferred_nodes),
        )
        for t in model.tasks
    )
    return Job(
        job_id=model.job_id,
        user=model.user,
        pool=model.pool,
        priority=model.priority,
        arrival_time=model.arrival_time,
        features=features,
        tasks=tasks,
    )


def to_workload(models: list[JobModel]) -> list[Job]:
    jobs = [to_job(m) for m in models]
    ids = [job.job_id for job in jobs]
    if len(set(ids)) != len(ids):
        raise ConfigError("duplicate job ids in workload")
    return jobs


def to_nodes(cluster: ClusterModel) -> tuple[NodeSpec, ...]:
    from ..cluster import default_phase

    count = len(cluster.nodes)
    specs = []
    for i, n in enumerate(cluster.nodes):
        phase = n.heartbeat_phase
        if phase is None:
            phase = default_phase(i, count, n.heartbeat_interval)
        specs.append(
            NodeSpec(
                node_id=n.node_id,
                cpu_capacity=n.cpu_capacity,
                mem_capacity=n.mem_capacity,
                slots=n.slots,
                heartbeat_interval=n.heartbeat_interval,
                heartbeat_phase=phase,
            )
        )
    ids = [s.node_id for s in specs]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"duplicate node ids: {ids}")
    return tuple(specs)


def to_rule(model: RuleModel) -> OverloadRule:
    return OverloadRule(
        tuple(Clause(c.metric, c.comparator, c.threshold) for c in model.clauses),
        model.combine,
    )


def resolve_rule(request_rule: RuleModel | None, cluster: ClusterModel) -> OverloadRule | None:
    """Request-level rule wins over the cluster document's rule."""
    if request_rule is not None:
        return to_rule(request_rule)
    if cluster.overload_rule is not None:
        return to_rule(cluster.overload_rule)
    return None


def to_pools(models: dict[str, PoolModel] | None) -> dict[str, PoolConfig] | None:
    if models is None:
        return None
    return {name: PoolConfig(m.min_share, m.weight) for name, m in models.items()}


def to_queues(models: dict[str, QueueModel] | None) -> dict[str, QueueConfig] | None:
    if models is None:
        return None
    return {name: QueueConfig(m.capacity, m.user_task_limit) for name, m in models.items()}


def to_workload_spec(model: WorkloadSpecModel) -> WorkloadSpec:
    return WorkloadSpec(
        job_count=model.job_count,
        seed=model.seed,
        users=model.users,
        pools=model.pools,
        arrival_window=model.arrival_window,
        task_count=model.task_count,
        work=model.work,
        heavy_fraction=model.heavy_fraction,
        heavy_demand=model.heavy_demand,
        light_demand=model.light_demand,
        locality_fanout=model.locality_fanout,
        node_count=model.node_count,
        priority_levels=model.priority_levels,
    )


def to_run_config(request: RunRequest) -> RunConfig:
    nodes = to_nodes(request.cluster)
    rule = resolve_rule(request.overload_rule, request.cluster)
    params = request.scheduler
    kwargs = dict(
        nodes=nodes,
        scheduler=params.name,
        alpha=params.alpha,
        utility=UtilityConfig(params.utility),
        all_bad=params.all_bad,
        pools=to_pools(params.pools),
        queues=to_queues(params.queues),
        seed=request.seed,
        horizon=request.horizon,
    )
    if rule is not None:
        kwargs["overload_rule"] = rule
    return RunConfig(**kwargs)


def report_to_model(report: SimReport) -> ReportModel:
    return ReportModel.model_validate(report.to_dict())


def comparison_to_model(comparison: Comparison) -> ComparisonModel:
    return ComparisonModel.model_validate(comparison.to_dict())


def health_response() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)
