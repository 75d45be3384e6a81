"""Exception types shared across the package."""


class HJGraphError(Exception):
    """Base class for all package-specific errors."""


class ResourceLimitError(HJGraphError, ValueError):
    """A builder parameter exceeds an implementation cap."""


class InfeasibleLevelError(HJGraphError, ValueError):
    """The requested level c lies below H(x, 0) at some vertex."""


class CoercivityError(HJGraphError, RuntimeError):
    """No slope below the search cap reaches the requested level."""


class NumericalBlowupError(HJGraphError, RuntimeError):
    """A solver produced a non-finite value."""

    def __init__(self, vertex, message=None):
        self.vertex = int(vertex)
        super().__init__(message or f"non-finite value at vertex {vertex}")


class InvariantViolationError(HJGraphError, RuntimeError):
    """A run-time invariant failed; `name` identifies which one."""

    def __init__(self, name, message=None):
        self.name = name
        super().__init__(message or f"invariant violated: {name}")


class ConfigError(HJGraphError, ValueError):
    """Experiment configuration rejected; `errors` lists every problem."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n" + "\n".join(self.errors))
