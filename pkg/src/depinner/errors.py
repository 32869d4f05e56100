"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is defined."""


class FitError(RuntimeError):
    """A least-squares or root search could not produce a usable answer."""


class ConvergenceError(FitError):
    """An iterative solver hit its iteration or basis-size cap."""


class UndefinedCellError(ValueError):
    """A phase-grid cell holds no successful fits (every junction failed)."""
