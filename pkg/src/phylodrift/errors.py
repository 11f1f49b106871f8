"""Error types shared across the package."""

from __future__ import annotations


class ExplosionError(RuntimeError):
    """A hard cap (event count or population size) was exceeded.

    Supercritical runs grow exponentially, so caps are surfaced as errors
    rather than silent truncation.  ``partial`` carries whatever result could
    be assembled up to the failure, when the caller provides it.
    """

    def __init__(self, message: str, *, cap_name: str, cap_value: int, partial=None):
        super().__init__(message)
        self.cap_name = cap_name
        self.cap_value = cap_value
        self.partial = partial


class InvariantViolationError(RuntimeError):
    """An internal consistency check failed; results must not be trusted."""
