class DwellError(Exception):
    """Base class for errors raised by dwell."""


class InstanceError(DwellError, ValueError):
    """Malformed or inconsistent problem data."""


class DomainError(DwellError, ValueError):
    """A function was evaluated outside its domain of definition."""


class InconsistencyError(DwellError, RuntimeError):
    """Computed quantities contradict an optimality relation they must satisfy."""
