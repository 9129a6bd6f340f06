"""Exception types shared across the package."""


class BsspError(Exception):
    """Base class for all package errors."""


class ContractViolation(BsspError):
    """A caller broke a documented precondition (width mismatch, bad mode, ...)."""


class ResourceError(BsspError):
    """Requested object exceeds the configured desk-scale caps."""

    def __init__(self, message: str, required: int | None = None,
                 available: int | None = None):
        super().__init__(message)
        self.required = required
        self.available = available


class DepthBudgetError(BsspError):
    """A scheme tried to exceed its quantum depth budget."""


class OracleConstructionError(BsspError):
    """A promised mapping failed the injectivity check during completion."""
