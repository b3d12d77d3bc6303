"""Multi-run experiment drivers: scheduler comparisons and parameter sweeps.

Runs are independent (no shared mutable state), so (scheduler, seed) pairs
may execute on a thread pool; results are assembled in deterministic
(scheduler, seed) order regardless of completion order.

Seed semantics: with a fixed workload the engine is fully deterministic, so
seeds only vary anything when a workload *spec* is given, in which case each
seed generates its own workload (shared across schedulers for that seed).
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from typing import Mapping, Sequence

from .engine import RunConfig, RunResult, run
from .errors import ConfigError
from .model import Job, NodeSpec
from .overload import Clause, OverloadRule, default_rule
from .report import Comparison, compare
from .schedulers import PoolConfig, QueueConfig, SCHEDULER_NAMES, UtilityConfig
from .workload import WorkloadSpec, generate

SWEEP_PARAMETERS = ("alpha", "heavy_fraction", "cpu_overload_threshold")


def run_single(config: RunConfig, workload: Sequence[Job]) -> RunResult:
    return run(config, workload)


def _base_config(
    nodes: Sequence[NodeSpec],
    scheduler: str,
    seed: int,
    *,
    overload_rule: OverloadRule | None,
    alpha: float,
    utility: UtilityConfig,
    all_bad: str,
    pools: Mapping[str, PoolConfig] | None,
    queues: Mapping[str, QueueConfig] | None,
    horizon: float | None,
) -> RunConfig:
    kwargs = dict(
        nodes=tuple(nodes),
        scheduler=scheduler,
        seed=seed,
        alpha=alpha,
        utility=utility,
        all_bad=all_bad,
        pools=pools,
        queues=queues,
        horizon=horizon,
    )
    if overload_rule is not None:
        kwargs["overload_rule"] = overload_rule
    return RunConfig(**kwargs)


def compare_runs(
    schedulers: Sequence[str],
    seeds: Sequence[int],
    nodes: Sequence[NodeSpec],
    *,
    workload: Sequence[Job] | None = None,
    workload_spec: WorkloadSpec | None = None,
    overload_rule: OverloadRule | None = None,
    alpha: float = 1.0,
    utility: UtilityConfig = UtilityConfig(),
    all_bad: str = "withhold",
    pools: Mapping[str, PoolConfig] | None = None,
    queues: Mapping[str, QueueConfig] | None = None,
    horizon: float | None = None,
    baseline: str = "fifo",
    parallel: bool = True,
    max_workers: int | None = None,
    keep_results: bool = False,
) -> Comparison | tuple[Comparison, dict[tuple[str, int], RunResult]]:
    """Run every (scheduler, seed) pair on a shared workload and compare."""
    if not schedulers:
        raise ConfigError("compare needs at least one scheduler")
    for name in schedulers:
        if name not in SCHEDULER_NAMES:
            raise ConfigError(
                f"unknown scheduler {name!r}; valid names: {', '.join(SCHEDULER_NAMES)}"
            )
    if not seeds:
        raise ConfigError("compare needs at least one seed")
    if (workload is None) == (workload_spec is None):
        raise ConfigError("provide exactly one of workload or workload_spec")

    workloads: dict[int, Sequence[Job]] = {}
    for seed in seeds:
        if workload is not None:
            workloads[seed] = workload
        else:
            workloads[seed] = generate(workload_spec.with_seed(seed))

    pairs = [(name, seed) for name in schedulers for seed in seeds]

    def execute(pair: tuple[str, int]) -> RunResult:
        name, seed = pair
        config = _base_config(
            nodes,
            name,
            seed,
            overload_rule=overload_rule,
            alpha=alpha,
            utility=utility,
            all_bad=all_bad,
            pools=pools,
            queues=queues,
            horizon=horizon,
        )
        return run(config, workloads[seed])

    results: dict[tuple[str, int], RunResult] = {}
    if parallel and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=max_workers or min(8, len(pairs))) as pool:
            for pair, result in zip(pairs, pool.map(execute, pairs)):
                results[pair] = result
    else:
        for pair in pairs:
            results[pair] = execute(pair)

    entries = [
        (name, [results[(name, seed)].report for seed in seeds]) for name in schedulers
    ]
    comparison = compare(entries, baseline=baseline)
    if keep_results:
        return comparison, results
    return comparison


def _apply_parameter(
    parameter: str,
    value: float,
    *,
    alpha: float,
    workload_spec: WorkloadSpec | None,
    overload_rule: OverloadRule | None,
) -> tuple[float, WorkloadSpec | None, OverloadRule | None]:
    if parameter == "alpha":
        return value, workload_spec, overload_rule
    if parameter == "heavy_fraction":
        if workload_spec is None:
            raise ConfigError("sweeping heavy_fraction requires a workload spec")
        return alpha, dataclasses.replace(workload_spec, heavy_fraction=value), overload_rule
    if parameter == "cpu_overload_threshold":
        rule = overload_rule if overload_rule is not None else default_rule()
        clauses = tuple(
            Clause(c.metric, c.comparator, value) if c.metric == "cpu_utilization" else c
            for c in rule.clauses
        )
        if not any(c.metric == "cpu_utilization" for c in clauses):
            raise ConfigError("rule has no cpu_utilization clause to sweep")
        return alpha, workload_spec, OverloadRule(clauses, rule.combine)
    raise ConfigError(
        f"unknown sweep parameter {parameter!r}; valid: {', '.join(SWEEP_PARAMETERS)}"
    )


def sweep_runs(
    parameter: str,
    values: Sequence[float],
    schedulers: Sequence[str],
    seeds: Sequence[int],
    nodes: Sequence[NodeSpec],
    **kwargs,
) -> list[tuple[float, Comparison]]:
    """One comparison per parameter value, in the given value order."""
    if not values:
        raise ConfigError("sweep needs at least one parameter value")
    blocks = []
    for value in values:
        alpha, spec, rule = _apply_parameter(
            parameter,
            value,
            alpha=kwargs.get("alpha", 1.0),
            workload_spec=kwargs.get("workload_spec"),
            overload_rule=kwargs.get("overload_rule"),
        )
        call_kwargs = dict(kwargs)
        call_kwargs["alpha"] = alpha
        call_kwargs["workload_spec"] = spec
        call_kwargs["overload_rule"] = rule
        blocks.append((value, compare_runs(schedulers, seeds, nodes, **call_kwargs)))
    return blocks
