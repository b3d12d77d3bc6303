"""Command-line client for the simulation service.

The CLI marshals flags and files into the service request models and
executes them in process by default; ``--server URL`` posts the same
request to a running service instead.  Either way, outputs are written
locally and every run is reproducible from its flags alone.

Exit codes: 0 success, 1 usage error, 2 configuration/input error,
3 run truncated (horizon hit or scheduler stall).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import httpx
from fastapi import HTTPException

from .errors import ConfigError, SchedSimError
from .overload import parse_rule
from .schedulers import ALL_BAD_POLICIES, SCHEDULER_NAMES, UTILITY_KINDS
from .service import schemas
from .service.app import (
    compare_simulations,
    generate_workload,
    run_simulation,
    sweep_simulations,
)
from .workload import job_to_record, load_trace

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_TRUNCATED = 3

_HANDLERS = {
    "/workload/generate": generate_workload,
    "/simulations/run": run_simulation,
    "/simulations/compare": compare_simulations,
    "/simulations/sweep": sweep_simulations,
}


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for config."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _int_range(text: str) -> tuple[int, int]:
    try:
        lo, _, hi = text.partition(":")
        return (int(lo), int(hi if hi else lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX integers, got {text!r}")


def _float_range(text: str) -> tuple[float, float]:
    try:
        lo, _, hi = text.partition(":")
        return (float(lo), float(hi if hi else lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX numbers, got {text!r}")


def _seed_list(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, _, hi = text.partition("..")
            seeds = list(range(int(lo), int(hi) + 1))
        else:
            seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N,M,... or LO..HI, got {text!r}")
    if not seeds:
        raise argparse.ArgumentTypeError("seed list is empty")
    return seeds


def _float_list(text: str) -> list[float]:
    try:
        values = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("value list is empty")
    return values


def _scheduler_list(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    for name in names:
        if name not in SCHEDULER_NAMES:
            raise argparse.ArgumentTypeError(
                f"invalid scheduler {name!r} (choose from {', '.join(SCHEDULER_NAMES)})"
            )
    if not names:
        raise argparse.ArgumentTypeError("scheduler list is empty")
    return names


def _call(server: str | None, path: str, request, response_cls):
    if server:
        url = server.rstrip("/") + path
        resp = httpx.post(url, json=request.model_dump(mode="json"), timeout=600.0)
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise ConfigError(f"server returned {resp.status_code}: {detail}")
        return response_cls.model_validate(resp.json())
    return _HANDLERS[path](request)


def _load_json(path: str, what: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"{what} file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} file {path}: invalid JSON: {exc.msg}")


def _load_workload_models(path: str) -> list[schemas.JobModel]:
    try:
        jobs = load_trace(path)
    except FileNotFoundError:
        raise ConfigError(f"workload file not found: {path}")
    return [schemas.JobModel.model_validate(job_to_record(job)) for job in jobs]


def _load_cluster_model(path: str) -> schemas.ClusterModel:
    return schemas.ClusterModel.model_validate(_load_json(path, "cluster"))


def _rule_model(text: str | None) -> schemas.RuleModel | None:
    if text is None:
        return None
    return schemas.RuleModel.model_validate(parse_rule(text).to_dict())


def _pool_models(path: str | None) -> dict[str, schemas.PoolModel] | None:
    if path is None:
        return None
    obj = _load_json(path, "pools")
    return {name: schemas.PoolModel.model_validate(entry) for name, entry in obj.items()}


def _queue_models(path: str | None) -> dict[str, schemas.QueueModel] | None:
    if path is None:
        return None
    obj = _load_json(path, "queues")
    return {name: schemas.QueueModel.model_validate(entry) for name, entry in obj.items()}


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _report_jobs_csv(report: schemas.ReportModel) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["job_id", "arrival", "tasks", "assigned", "finished", "local", "finish", "turnaround"])
    for row in report.jobs:
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


def _comparison_csv(comparison: schemas.ComparisonModel) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    head = ["scheduler", "runs"]
    for name in comparison.metrics:
        head += [f"{name}_mean", f"{name}_std", f"{name}_delta_vs_{comparison.baseline or 'baseline'}"]
    writer.writerow(head)
    for row in comparison.rows:
        out = [row.scheduler, row.runs]
        for name in comparison.metrics:
            delta = row.delta_vs_baseline.get(name) if row.delta_vs_baseline else None
            out += [row.mean[name], row.std[name], "" if delta is None else delta]
        writer.writerow(out)
    return buf.getvalue()


# -- subcommands ---------------------------------------------------------------


def _cmd_gen(args) -> int:
    request = schemas.GenerateRequest(
        job_count=args.jobs,
        seed=args.seed,
        users=args.users,
        pools=args.pools,
        arrival_window=args.arrival_window,
        task_count=args.tasks,
        work=args.work,
        heavy_fraction=args.heavy_frac,
        heavy_demand=args.heavy_demand,
        light_demand=args.light_demand,
        locality_fanout=args.locality_fanout,
        node_count=args.node_count,
        priority_levels=args.priority_levels,
    )
    response = _call(args.server, "/workload/generate", request, schemas.GenerateResponse)
    _write(args.out, "\n".join(response.trace_lines) + "\n" if response.trace_lines else "")
    print(f"wrote {response.job_count} jobs ({response.task_count} tasks) to {args.out}")
    return EXIT_OK


def _build_scheduler_params(args) -> schemas.SchedulerParamsModel:
    return schemas.SchedulerParamsModel(
        name=args.scheduler,
        alpha=args.alpha,
        utility=args.utility,
        all_bad=args.all_bad,
        pools=_pool_models(args.pools_file),
        queues=_queue_models(args.queues_file),
    )


def _cmd_run(args) -> int:
    request = schemas.RunRequest(
        workload=_load_workload_models(args.workload),
        cluster=_load_cluster_model(args.cluster),
        scheduler=_build_scheduler_params(args),
        overload_rule=_rule_model(args.overload_rule),
        seed=args.seed,
        horizon=args.horizon,
        include_log=args.log is not None,
    )
    response = _call(args.server, "/simulations/run", request, schemas.RunResponse)
    report = response.report
    _write(args.out, json.dumps(report.model_dump(), indent=2) + "\n")
    if args.log is not None:
        lines = response.event_log_lines or []
        _write(args.log, "\n".join(lines) + "\n" if lines else "")
    if args.jobs_csv is not None:
        _write(args.jobs_csv, _report_jobs_csv(report))
    status = "truncated" if report.truncated else "completed"
    print(
        f"{report.scheduler} seed={report.seed}: {status}, "
        f"makespan={report.makespan:.3f}, overload_heartbeats={report.overload_heartbeats}, "
        f"locality={report.locality_rate:.3f}"
    )
    return EXIT_TRUNCATED if report.truncated else EXIT_OK


def _build_compare_request(args) -> schemas.CompareRequest:
    if (args.workload is None) == (args.workload_spec is None):
        raise ConfigError("provide exactly one of --workload or --workload-spec")
    workload = _load_workload_models(args.workload) if args.workload else None
    spec = None
    if args.workload_spec:
        spec = schemas.WorkloadSpecModel.model_validate(_load_json(args.workload_spec, "workload spec"))
    return schemas.CompareRequest(
        schedulers=args.schedulers,
        seeds=args.seeds,
        cluster=_load_cluster_model(args.cluster),
        workload=workload,
        workload_spec=spec,
        alpha=args.alpha,
        utility=args.utility,
        all_bad=args.all_bad,
        pools=_pool_models(args.pools_file),
        queues=_queue_models(args.queues_file),
        overload_rule=_rule_model(args.overload_rule),
        horizon=args.horizon,
        parallel=not args.no_parallel,
    )


def _print_comparison(comparison: schemas.ComparisonModel) -> None:
    for row in comparison.rows:
        overload = row.mean["overload_heartbeats"]
        overload_std = row.std["overload_heartbeats"]
        makespan = row.mean["makespan"]
        print(
            f"{row.scheduler}: overload_heartbeats={overload:.2f}±{overload_std:.2f}, "
            f"makespan={makespan:.2f} ({row.runs} runs)"
        )


def _cmd_compare(args) -> int:
    request = _build_compare_request(args)
    response = _call(args.server, "/simulations/compare", request, schemas.CompareResponse)
    _write(args.out, json.dumps(response.comparison.model_dump(), indent=2) + "\n")
    if args.csv is not None:
        _write(args.csv, _comparison_csv(response.comparison))
    _print_comparison(response.comparison)
    return EXIT_OK


def _sweep_csv(parameter: str, response: schemas.SweepResponse) -> str:
    """Long-format table: one row per (value, scheduler, metric)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["parameter", "value", "scheduler", "metric", "mean", "std"])
    for block in response.blocks:
        for row in block.comparison.rows:
            for metric in block.comparison.metrics:
                writer.writerow(
                    [parameter, block.value, row.scheduler, metric, row.mean[metric], row.std[metric]]
                )
    return buf.getvalue()


def _cmd_sweep(args) -> int:
    request = schemas.SweepRequest(
        parameter=args.param,
        values=args.values,
        base=_build_compare_request(args),
    )
    response = _call(args.server, "/simulations/sweep", request, schemas.SweepResponse)
    _write(args.out, json.dumps(response.model_dump(), indent=2) + "\n")
    if args.csv is not None:
        _write(args.csv, _sweep_csv(args.param, response))
    for block in response.blocks:
        print(f"--- {args.param} = {block.value}")
        _print_comparison(block.comparison)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def _add_shared_scheduler_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=1.0, help="Laplace smoothing (bayes)")
    p.add_argument("--utility", choices=UTILITY_KINDS, default="priority", help="utility kind (bayes)")
    p.add_argument(
        "--all-bad",
        choices=ALL_BAD_POLICIES,
        default="withhold",
        help="what bayes does when every job classifies bad",
    )
    p.add_argument("--overload-rule", default=None, metavar="RULE",
                   help="e.g. 'any:cpu_utilization>0.9,free_mem_fraction<0.1'")
    p.add_argument("--pools-file", default=None, help="JSON pool configs (fair)")
    p.add_argument("--queues-file", default=None, help="JSON queue configs (capacity)")
    p.add_argument("--horizon", type=float, default=None, help="simulated-time cap")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schedsim", description=__doc__)
    parser.add_argument("--server", default=None, metavar="URL",
                        help="run against a remote service instead of in process")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic workload trace")
    gen.add_argument("--jobs", type=_positive_int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--users", type=int, default=3)
    gen.add_argument("--pools", type=int, default=2)
    gen.add_argument("--arrival-window", type=float, default=50.0)
    gen.add_argument("--tasks", type=_int_range, default=(1, 4), metavar="MIN:MAX")
    gen.add_argument("--work", type=_float_range, default=(5.0, 20.0), metavar="MIN:MAX")
    gen.add_argument("--heavy-frac", type=float, default=0.3)
    gen.add_argument("--heavy-demand", type=_float_range, default=(0.6, 1.0), metavar="LO:HI")
    gen.add_argument("--light-demand", type=_float_range, default=(0.05, 0.3), metavar="LO:HI")
    gen.add_argument("--locality-fanout", type=int, default=1)
    gen.add_argument("--node-count", type=int, default=3)
    gen.add_argument("--priority-levels", type=int, default=1)
    gen.set_defaults(func=_cmd_gen)

    run_p = sub.add_parser("run", help="run one simulation")
    run_p.add_argument("--workload", required=True)
    run_p.add_argument("--cluster", required=True)
    run_p.add_argument("--scheduler", choices=SCHEDULER_NAMES, required=True)
    run_p.add_argument("--seed", type=int, required=True)
    run_p.add_argument("--out", required=True)
    run_p.add_argument("--log", default=None, help="write the event log here (JSONL)")
    run_p.add_argument("--jobs-csv", default=None, help="write the per-job table here (CSV)")
    _add_shared_scheduler_flags(run_p)
    run_p.set_defaults(func=_cmd_run)

    cmp_p = sub.add_parser("compare", help="compare schedulers across seeds")
    cmp_p.add_argument("--schedulers", type=_scheduler_list, required=True, metavar="A,B,...")
    cmp_p.add_argument("--seeds", type=_seed_list, required=True, metavar="N,M|LO..HI")
    cmp_p.add_argument("--cluster", required=True)
    cmp_p.add_argument("--workload", default=None, help="fixed workload trace")
    cmp_p.add_argument("--workload-spec", default=None,
                       help="workload spec JSON; regenerated per seed")
    cmp_p.add_argument("--out", required=True)
    cmp_p.add_argument("--csv", default=None)
    cmp_p.add_argument("--no-parallel", action="store_true")
    _add_shared_scheduler_flags(cmp_p)
    cmp_p.set_defaults(func=_cmd_compare)

    sweep_p = sub.add_parser("sweep", help="sweep one parameter over a value list")
    sweep_p.add_argument("--param", choices=("alpha", "heavy_fraction", "cpu_overload_threshold"),
                         required=True)
    sweep_p.add_argument("--values", type=_float_list, required=True, metavar="V1,V2,...")
    sweep_p.add_argument("--schedulers", type=_scheduler_list, required=True, metavar="A,B,...")
    sweep_p.add_argument("--seeds", type=_seed_list, required=True, metavar="N,M|LO..HI")
    sweep_p.add_argument("--cluster", required=True)
    sweep_p.add_argument("--workload", default=None)
    sweep_p.add_argument("--workload-spec", default=None)
    sweep_p.add_argument("--out", required=True)
    sweep_p.add_argument("--csv", default=None)
    sweep_p.add_argument("--no-parallel", action="store_true")
    _add_shared_scheduler_flags(sweep_p)
    sweep_p.set_defaults(func=_cmd_sweep)

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except HTTPException as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return EXIT_CONFIG
    except (SchedSimError, ValueError, httpx.HTTPError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
