"""Exception hierarchy shared across the package."""

from __future__ import annotations


class QlrepError(Exception):
    """Base class for all package errors."""


class InputValidationError(QlrepError, ValueError):
    """Malformed input: bad probabilities, non-stochastic matrices, bad grids."""


class DegenerateContextError(QlrepError):
    """Context has zero probability, or zero probability on a required cell."""


class IncompatibilityError(QlrepError):
    """Reference variables fail the incompatibility requirement
    (some joint level-set cell has zero probability)."""


class DegenerateCellError(QlrepError):
    """Disturbance coefficient undefined: a product in the denominator vanishes."""


class NotRepresentableError(QlrepError):
    """Context is not representable in a complex Hilbert space
    (hyperbolic or mixed classification)."""


class BornRuleUnavailableError(QlrepError):
    """Requested a projection onto a non-orthonormal reference basis."""


class PhaseAliasingError(QlrepError):
    """Phase trajectory under-sampled: branch continuity cannot be resolved."""


class NoGeneratorError(QlrepError):
    """Dynamics admits no self-adjoint generator (determinism fails)."""


class ScenarioError(QlrepError):
    """Scenario file failed schema or semantic validation."""


class NumericalError(QlrepError):
    """A numeric postcondition failed (non-finite sample, residual too large)."""
