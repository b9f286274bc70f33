"""Shared exception and warning types."""


class RankError(ValueError):
    """A tensor rank exceeds the limit L <= 2j for the given spin."""


class NumericError(RuntimeError):
    """A numerical routine failed to reach its requested accuracy."""


class PhysicsWarning(UserWarning):
    """A physically questionable but computable input was accepted."""
