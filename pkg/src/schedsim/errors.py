"""Exception types shared across the package."""


class SchedSimError(Exception):
    """Base class for all errors raised by schedsim."""


class ConfigError(SchedSimError):
    """Invalid run, cluster, scheduler, or generator configuration."""


class TraceError(SchedSimError):
    """Malformed workload trace or cluster file."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
