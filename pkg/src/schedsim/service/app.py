"""FastAPI application wrapping the simulator.

Every endpoint is stateless: requests carry the full workload/cluster
configuration and responses carry complete results, so runs are
reproducible from the request body alone.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..engine import run as run_engine
from ..errors import SchedSimError
from ..harness import compare_runs, sweep_runs
from ..schedulers import SCHEDULER_NAMES, UtilityConfig
from ..workload import generate, trace_digest, dumps_trace
from . import schemas
from .schemas import (
    CompareRequest,
    CompareResponse,
    GenerateRequest,
    GenerateResponse,
    HealthResponse,
    RunRequest,
    RunResponse,
    SchedulersResponse,
    SweepRequest,
    SweepResponse,
)

app = FastAPI(
    title="schedsim",
    description="Cluster scheduling simulator: workload generation, runs, comparisons, sweeps.",
    version="0.1.0",
)


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return schemas.health_response()


@app.get("/schedulers", response_model=SchedulersResponse)
def schedulers() -> SchedulersResponse:
    return SchedulersResponse(schedulers=list(SCHEDULER_NAMES))


@app.post("/workload/generate", response_model=GenerateResponse)
def generate_workload(request: GenerateRequest) -> GenerateResponse:
    try:
        jobs = generate(schemas.to_workload_spec(request))
    except (SchedSimError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    lines = dumps_trace(jobs).splitlines()
    return GenerateResponse(
        job_count=len(jobs),
        task_count=sum(job.task_count for job in jobs),
        workload_digest=trace_digest(jobs),
        trace_lines=lines,
    )


@app.post("/simulations/run", response_model=RunResponse)
def run_simulation(request: RunRequest) -> RunResponse:
    try:
        config = schemas.to_run_config(request)
        workload = schemas.to_workload(request.workload)
        result = run_engine(config, workload)
    except (SchedSimError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return RunResponse(
        report=schemas.report_to_model(result.report),
        event_log_lines=result.log.lines() if request.include_log else None,
    )


def _compare_kwargs(request: CompareRequest) -> dict:
    return dict(
        workload=schemas.to_workload(request.workload) if request.workload is not None else None,
        workload_spec=(
            schemas.to_workload_spec(request.workload_spec)
            if request.workload_spec is not None
            else None
        ),
        overload_rule=schemas.resolve_rule(request.overload_rule, request.cluster),
        alpha=request.alpha,
        utility=UtilityConfig(request.utility),
        all_bad=request.all_bad,
        pools=schemas.to_pools(request.pools),
        queues=schemas.to_queues(request.queues),
        horizon=request.horizon,
        parallel=request.parallel,
    )


@app.post("/simulations/compare", response_model=CompareResponse)
def compare_simulations(request: CompareRequest) -> CompareResponse:
    try:
        comparison = compare_runs(
            list(request.schedulers),
            list(request.seeds),
            schemas.to_nodes(request.cluster),
            **_compare_kwargs(request),
        )
    except (SchedSimError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return CompareResponse(comparison=schemas.comparison_to_model(comparison))


@app.post("/simulations/sweep", response_model=SweepResponse)
def sweep_simulations(request: SweepRequest) -> SweepResponse:
    base = request.base
    try:
        blocks = sweep_runs(
            request.parameter,
            list(request.values),
            list(base.schedulers),
            list(base.seeds),
            schemas.to_nodes(base.cluster),
            **_compare_kwargs(base),
        )
    except (SchedSimError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return SweepResponse(
        blocks=[
            schemas.SweepBlockModel(value=value, comparison=schemas.comparison_to_model(comparison))
            for value, comparison in blocks
        ]
    )
