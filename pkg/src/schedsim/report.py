"""Run reports and cross-scheduler comparisons.

`summarize` is a pure function of an event log; every metric below is
recomputed from the records alone (plus the log header, which echoes the
run configuration and workload totals).

Conventions, fixed here and relied on by tests:
  - locality_rate of a run with zero assignments is 1.0 (never penalize an
    empty run with 0/0);
  - turnaround statistics cover completed jobs only and are 0.0 when no job
    completed;
  - standard deviations in comparisons are population standard deviations;
  - comparison deltas are relative to the FIFO baseline.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .engine import EventLog
from .errors import ConfigError

METRIC_FIELDS = (
    "makespan",
    "turnaround_mean",
    "turnaround_median",
    "overload_heartbeats",
    "bad_label_count",
    "locality_rate",
    "slot_utilization",
)


@dataclass
class JobRow:
    job_id: str
    arrival: float
    tasks: int
    assigned: int
    finished: int
    local: int
    finish: float | None
    turnaround: float | None


@dataclass
class SimReport:
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
    jobs: list[JobRow] = field(default_factory=list)
    classifier_counts: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def metrics(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in METRIC_FIELDS}

    def jobs_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["job_id", "arrival", "tasks", "assigned", "finished", "local", "finish", "turnaround"])
        for row in self.jobs:
            writer.writerow(
                [
                    row.job_id,
                    row.arrival,
                    row.tasks,
                    row.assigned,
                    row.finished,
                    row.local,
                    "" if row.finish is None else row.finish,
                    "" if row.turnaround is None else row.turnaround,
                ]
            )
        return buf.getvalue()


def summarize(log: EventLog) -> SimReport:
    """Aggregate an event log into a SimReport.

    Raises ValueError on an out-of-order log; that always indicates an
    engine bug, never bad user input.
    """
    header = log.header
    total_slots = sum(n["slots"] for n in header["nodes"])

    arrivals: dict[str, tuple[float, int]] = {}
    assigns: dict[tuple[str, str], dict] = {}
    finishes: dict[tuple[str, str], float] = {}
    heartbeats = 0
    overload_heartbeats = 0
    feedback_count = 0
    bad_label_count = 0
    stalled = False
    classifier_counts = None
    last_t = None

    for rec in log.records:
        t = rec["t"]
        if last_t is not None and t < last_t:
            raise ValueError(f"event log out of order at t={t} after t={last_t}")
        last_t = t
        ev = rec["ev"]
        if ev == "arrival":
            arrivals[rec["job"]] = (t, rec["tasks"])
        elif ev == "heartbeat":
            heartbeats += 1
            if rec["overloaded"]:
                overload_heartbeats += 1
        elif ev == "assign":
            assigns[(rec["job"], rec["task"])] = rec
        elif ev == "feedback":
            feedback_count += 1
            if rec["label"] == "bad":
                bad_label_count += 1
        elif ev == "finish":
            finishes[(rec["job"], rec["task"])] = t
        elif ev == "stall":
            stalled = True
        elif ev == "classifier":
            classifier_counts = rec["counts"]

    first_arrival = min((t for t, _ in arrivals.values()), default=None)
    last_finish = max(finishes.values(), default=None)
    makespan = (
        last_finish - first_arrival if first_arrival is not None and last_finish is not None else 0.0
    )

    assigns_by_job: dict[str, list[dict]] = {}
    for (job_id, _), rec in assigns.items():
        assigns_by_job.setdefault(job_id, []).append(rec)
    finishes_by_job: dict[str, list[float]] = {}
    for (job_id, _), t in finishes.items():
        finishes_by_job.setdefault(job_id, []).append(t)

    job_rows = []
    turnarounds = []
    for job_id in sorted(arrivals):
        arrival_t, task_total = arrivals[job_id]
        job_assigns = assigns_by_job.get(job_id, [])
        job_finishes = finishes_by_job.get(job_id, [])
        finished = len(job_finishes)
        finish_t = max(job_finishes) if finished == task_total and finished > 0 else None
        turnaround = finish_t - arrival_t if finish_t is not None else None
        if turnaround is not None:
            turnarounds.append(turnaround)
        job_rows.append(
            JobRow(
                job_id=job_id,
                arrival=arrival_t,
                tasks=task_total,
                assigned=len(job_assigns),
                finished=finished,
                local=sum(1 for rec in job_assigns if rec["local"]),
                finish=finish_t,
                turnaround=turnaround,
            )
        )

    assignments = len(assigns)
    local_assignments = sum(1 for rec in assigns.values() if rec["local"])
    locality_rate = local_assignments / assignments if assignments else 1.0

    slot_utilization = 0.0
    if first_arrival is not None and last_finish is not None and last_finish > first_arrival:
        window = last_finish - first_arrival
        busy = 0.0
        for key, rec in assigns.items():
            end = min(finishes.get(key, last_finish), last_finish)
            busy += max(0.0, end - rec["t"])
        slot_utilization = min(1.0, busy / (total_slots * window))

    return SimReport(
        scheduler=header["scheduler"],
        seed=header["seed"],
        makespan=makespan,
        turnaround_mean=statistics.fmean(turnarounds) if turnarounds else 0.0,
        turnaround_median=statistics.median(turnarounds) if turnarounds else 0.0,
        heartbeats=heartbeats,
        overload_heartbeats=overload_heartbeats,
        feedback_count=feedback_count,
        bad_label_count=bad_label_count,
        assignments=assignments,
        local_assignments=local_assignments,
        locality_rate=locality_rate,
        slot_utilization=slot_utilization,
        truncated=len(finishes) < header["total_tasks"],
        stalled=stalled,
        total_jobs=header["total_jobs"],
        total_tasks=header["total_tasks"],
        completed_tasks=len(finishes),
        workload_digest=header["workload_digest"],
        cluster_digest=header["cluster_digest"],
        event_log_sha256=log.sha256(),
        jobs=job_rows,
        classifier_counts=classifier_counts,
    )


@dataclass
class ComparisonRow:
    scheduler: str
    runs: int
    mean: dict[str, float]
    std: dict[str, float]
    delta_vs_baseline: dict[str, float | None] | None


@dataclass
class RunRow:
    scheduler: str
    seed: int
    metrics: dict[str, float]
    event_log_sha256: str
    truncated: bool
    stalled: bool


@dataclass
class Comparison:
    baseline: str | None
    metrics: tuple[str, ...]
    rows: list[ComparisonRow]
    runs: list[RunRow]

    def to_dict(self) -> dict:
        return asdict(self)

    def row(self, scheduler: str) -> ComparisonRow:
        for row in self.rows:
            if row.scheduler == scheduler:
                return row
        raise KeyError(scheduler)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        head = ["scheduler", "runs"]
        for name in self.metrics:
            head += [f"{name}_mean", f"{name}_std", f"{name}_delta_vs_{self.baseline or 'baseline'}"]
        writer.writerow(head)
        for row in self.rows:
            out = [row.scheduler, row.runs]
            for name in self.metrics:
                delta = row.delta_vs_baseline.get(name) if row.delta_vs_baseline else None
                out += [row.mean[name], row.std[name], "" if delta is None else delta]
            writer.writerow(out)
        return buf.getvalue()


def compare(
    entries: Sequence[tuple[str, Sequence[SimReport]]], baseline: str = "fifo"
) -> Comparison:
    """Aggregate per-scheduler reports over seeds and diff against a baseline.

    All schedulers must have run the same (seed, workload, cluster)
    sequence; anything else is a configuration mismatch.
    """
    if not entries:
        raise ConfigError("compare needs at least one scheduler")
    names = [name for name, _ in entries]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate scheduler names in comparison: {names}")
    lengths = {len(reports) for _, reports in entries}
    if lengths == {0} or len(lengths) != 1:
        raise ConfigError("every scheduler needs the same non-empty seed list")

    n_runs = lengths.pop()
    reference = [
        (r.seed, r.workload_digest, r.cluster_digest) for r in entries[0][1]
    ]
    for name, reports in entries[1:]:
        keys = [(r.seed, r.workload_digest, r.cluster_digest) for r in reports]
        if keys != reference:
            raise ConfigError(
                f"scheduler {name!r} ran a different (seed, workload, cluster) sequence "
                f"than {entries[0][0]!r}"
            )

    means: dict[str, dict[str, float]] = {}
    stds: dict[str, dict[str, float]] = {}
    for name, reports in entries:
        values = {m: [report.metrics()[m] for report in reports] for m in METRIC_FIELDS}
        means[name] = {m: statistics.fmean(v) for m, v in values.items()}
        stds[name] = {m: statistics.pstdev(v) for m, v in values.items()}

    base_means = means.get(baseline)
    rows = []
    for name, reports in entries:
        deltas: dict[str, float | None] | None = None
        if base_means is not None:
            deltas = {}
            for m in METRIC_FIELDS:
                base = base_means[m]
                if base != 0.0:
                    deltas[m] = (means[name][m] - base) / base
                else:
                    deltas[m] = 0.0 if means[name][m] == 0.0 else None
        rows.append(
            ComparisonRow(
                scheduler=name,
                runs=n_runs,
                mean=means[name],
                std=stds[name],
                delta_vs_baseline=deltas,
            )
        )

    run_rows = [
        RunRow(
            scheduler=name,
            seed=report.seed,
            metrics=report.metrics(),
            event_log_sha256=report.event_log_sha256,
            truncated=report.truncated,
            stalled=report.stalled,
        )
        for name, reports in entries
        for report in reports
    ]
    return Comparison(
        baseline=baseline if base_means is not None else None,
        metrics=METRIC_FIELDS,
        rows=rows,
        runs=run_rows,
    )
