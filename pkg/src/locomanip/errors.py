"""Structured error types shared across the package."""

from __future__ import annotations


class LocomanipError(Exception):
    """Base class for all package errors."""


class DimensionError(LocomanipError, ValueError):
    """Input dimensions do not match the model."""


class ModelError(LocomanipError, ValueError):
    """Invalid robot model description."""


class NotPositiveDefinite(LocomanipError, ValueError):
    """A matrix required to be SPD is not."""


class SingularityError(LocomanipError):
    """Task-space inertia is rank deficient.

    Carries the offending singular value so callers can decide whether to
    regularize.
    """

    def __init__(self, sigma_min: float):
        self.sigma_min = float(sigma_min)
        super().__init__(f"task matrix near-singular (sigma_min={sigma_min:.3e})")


class ConfigError(LocomanipError, ValueError):
    """Scenario/model configuration problem, carries the field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class IntegrationFault(LocomanipError, RuntimeError):
    """Simulation state became non-finite; run aborted."""
