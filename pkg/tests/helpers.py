"""Small builders shared across test modules."""

from __future__ import annotations

from schedsim.model import Job, JobFeatures, NodeSpec, NodeState, Task


def make_features(cpu=5, mem=5, io=5, net=5) -> JobFeatures:
    return JobFeatures(cpu_avg=cpu, mem_avg=mem, io_avg=io, net_avg=net)


def make_task(job_id="j0", task_id="t0", work=10.0, cpu=0.5, mem=0.5, preferred=()) -> Task:
    return Task(
        task_id=task_id,
        job_id=job_id,
        work=work,
        cpu_demand=cpu,
        mem_demand=mem,
        preferred_nodes=frozenset(preferred),
    )


def make_job(
    job_id="j0",
    user="u0",
    pool="p0",
    priority=0,
    arrival=0.0,
    features=None,
    tasks=None,
    n_tasks=1,
    **task_kwargs,
) -> Job:
    if tasks is None:
        tasks = tuple(
            make_task(job_id=job_id, task_id=f"t{k}", **task_kwargs) for k in range(n_tasks)
        )
    return Job(
        job_id=job_id,
        user=user,
        pool=pool,
        priority=priority,
        arrival_time=arrival,
        features=features or make_features(),
        tasks=tuple(tasks),
    )


def make_node_spec(
    node_id="n0",
    cpu=1.0,
    mem=1.0,
    slots=2,
    interval=1.0,
    phase=0.0,
) -> NodeSpec:
    return NodeSpec(
        node_id=node_id,
        cpu_capacity=cpu,
        mem_capacity=mem,
        slots=slots,
        heartbeat_interval=interval,
        heartbeat_phase=phase,
    )


def make_node_state(spec=None, running_tasks=(), **spec_kwargs) -> NodeState:
    state = NodeState(spec or make_node_spec(**spec_kwargs))
    for task in running_tasks:
        state.place(task)
    return state
