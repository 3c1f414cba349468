"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a documented precondition."""


class NumericError(RuntimeError):
    """A numerical routine failed to meet its accuracy contract."""
