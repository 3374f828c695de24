"""Exception hierarchy shared by the numerical modules and the CLI."""

from __future__ import annotations


class ScatterError(Exception):
    """Base class for all errors raised by h2scatter."""


class DomainError(ScatterError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(ScatterError, ValueError):
    """Invalid parameter set or configuration file."""


class GridTooSmallError(ScatterError):
    """The radial grid does not reach the asymptotic matching region."""


class InvariantViolation(ScatterError):
    """An input object fails an invariant it is required to satisfy."""


class DegenerateInputError(ScatterError, ValueError):
    """Input for which the requested quantity is singular or undefined."""


class InfeasibleSuperpositionError(ScatterError):
    """No real kinematic solution exists for a requested superposition."""


class NoCollisionError(ScatterError):
    """The incident packets never overlap inside the time window."""


class ParameterRangeError(ScatterError):
    """A parameter search could not bracket its target."""


class ConvergenceWarning(UserWarning):
    """A truncation (partial waves, quadrature) did not meet its tolerance."""
