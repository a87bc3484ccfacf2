"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a formula."""


class ConvergenceError(ArithmeticError):
    """Numerical integration did not reach the requested tolerance.

    The best available estimate and its error bound are kept so callers
    can decide whether to use them anyway.
    """

    def __init__(self, message, value=float("nan"), error=float("inf")):
        super().__init__(message)
        self.value = value
        self.error = error


class ResourceCapError(RuntimeError):
    """A computation would exceed a configured size limit."""


class ConfigError(ValueError):
    """Invalid run configuration (CLI)."""

    def __init__(self, message, key=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line
