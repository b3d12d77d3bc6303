"""Discrete-event cluster scheduling simulator with a learning scheduler.

Core entry points:
  - workload.generate / workload.load_trace: build or read workloads
  - engine.run: simulate one run, returning a report and event log
  - harness.compare_runs / harness.sweep_runs: multi-run experiments
  - service.app: FastAPI application exposing the same operations
"""

__version__ = "0.1.0"

from .classifier import BAD, GOOD, NaiveBayesClassifier, Posterior
from .engine import EventLog, RunConfig, RunResult, run
from .errors import ConfigError, SchedSimError, TraceError
from .model import (
    Assignment,
    FeatureVector,
    Job,
    JobFeatures,
    NodeSpec,
    NodeState,
    Task,
    discretize_fraction,
    feature_vector,
    node_features,
)
from .overload import Clause, OverloadRule, default_rule, parse_rule
from .report import Comparison, SimReport, compare, summarize
from .schedulers import (
    BayesScheduler,
    CapacityScheduler,
    FairScheduler,
    FifoScheduler,
    PoolConfig,
    QueueConfig,
    UtilityConfig,
    bayes_select,
    capacity_select,
    fair_select,
    fifo_select,
)
from .workload import WorkloadSpec, generate, load_trace, save_trace

__all__ = [
    "Assignment",
    "BAD",
    "BayesScheduler",
    "CapacityScheduler",
    "Clause",
    "Comparison",
    "ConfigError",
    "EventLog",
    "FairScheduler",
    "FeatureVector",
    "FifoScheduler",
    "GOOD",
    "Job",
    "JobFeatures",
    "NaiveBayesClassifier",
    "NodeSpec",
    "NodeState",
    "OverloadRule",
    "PoolConfig",
    "Posterior",
    "QueueConfig",
    "RunConfig",
    "RunResult",
    "SchedSimError",
    "SimReport",
    "Task",
    "TraceError",
    "UtilityConfig",
    "WorkloadSpec",
    "bayes_select",
    "capacity_select",
    "compare",
    "default_rule",
    "discretize_fraction",
    "fair_select",
    "feature_vector",
    "fifo_select",
    "generate",
    "load_trace",
    "node_features",
    "parse_rule",
    "run",
    "save_trace",
    "summarize",
]
