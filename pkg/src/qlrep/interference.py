"""Disturbance coefficients, probabilistic phases, and context classification.

The central quantity is the normalized deviation of a context's b-distribution
from the classical total-probability prediction,

    lam(x) = [p_b(x) - sum_y p_a(y) p(x|y)] / [2 sqrt(prod_y p_a(y) p(x|y))],

which enters the interference form of the total probability law,

    p_b(x) = sum_y p_a(y) p(x|y) + 2 lam(x) sqrt(prod_y p_a(y) p(x|y)).

|lam| <= 1 admits a phase theta = arccos(lam) and a complex-amplitude
representation; |lam| > 1 does not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateCellError, InputValidationError

__all__ = [
    "TRIGONOMETRIC",
    "HYPERBOLIC",
    "MIXED",
    "DEGENERATE_BOUNDARY",
    "ContextualData",
    "InterferenceReport",
    "lambda_coefficient",
    "interference_total_probability",
    "classify_context",
    "phase_constraint_check",
]

NORMALIZATION_TOL = 1e-12
# |lam| within this band of 1 is treated as sitting on the boundary.
BOUNDARY_BAND = 1e-9
PHASE_CONSTRAINT_TOL = 1e-9

TRIGONOMETRIC = "trigonometric"
HYPERBOLIC = "hyperbolic"
MIXED = "mixed"
DEGENERATE_BOUNDARY = "degenerate-boundary"


def _check_distribution(name: str, values: tuple[float, ...]) -> None:
    for v in values:
        if not math.isfinite(v) or v < -NORMALIZATION_TOL or v > 1.0 + NORMALIZATION_TOL:
            raise InputValidationError(f"{name} entry {v!r} is not a probability")
    if abs(math.fsum(values) - 1.0) > NORMALIZATION_TOL:
        raise InputValidationError(f"{name} does not sum to 1: {values!r}")


@dataclass(frozen=True)
class ContextualData:
    """Context-conditional probability tables for one context.

    p_a: conditional distribution of the first reference variable given the context.
    p_b: conditional distribution of the second reference variable given the context.
    transition: row-stochastic matrix, transition[i][j] = P(b = b_j | a = a_i),
        conditioned on the a-level set alone (no context involved).
    """

    p_a: tuple[float, float]
    p_b: tuple[float, float]
    transition: tuple[tuple[float, float], tuple[float, float]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "p_a", tuple(float(v) for v in self.p_a))
        object.__setattr__(self, "p_b", tuple(float(v) for v in self.p_b))
        object.__setattr__(
            self, "transition", tuple(tuple(float(v) for v in row) for row in self.transition)
        )
        if len(self.p_a) != 2 or len(self.p_b) != 2 or len(self.transition) != 2:
            raise InputValidationError("contextual data is two-valued: need pairs and a 2x2 matrix")
        _check_distribution("p_a", self.p_a)
        _check_distribution("p_b", self.p_b)
        for i, row in enumerate(self.transition):
            if len(row) != 2:
                raise InputValidationError("transition rows must have length 2")
            _check_distribution(f"transition row {i}", row)

    def interference_products(self) -> tuple[float, float]:
        """prod_y p_a(y) p(x|y) for x = 0, 1 (the squared interference weights)."""
        t = self.transition
        return (
            self.p_a[0] * t[0][0] * self.p_a[1] * t[1][0],
            self.p_a[0] * t[0][1] * self.p_a[1] * t[1][1],
        )


@dataclass(frozen=True)
class InterferenceReport:
    """Both disturbance coefficients, their phases when defined, and the class label.

    phases are the principal-branch angles arccos(lam) in [0, pi]; they are
    present for trigonometric and degenerate-boundary data (boundary values are
    clipped into [-1, 1] before taking arccos) and None otherwise.
    """

    lam: tuple[float, float]
    phases: tuple[float, float] | None
    classification: str

    @property
    def representable(self) -> bool:
        return self.classification in (TRIGONOMETRIC, DEGENERATE_BOUNDARY)


def lambda_coefficient(data: ContextualData, x: int) -> float:
    """Disturbance coefficient for value index x in {0, 1}.

    Raises DegenerateCellError when any product p_a(y) * p(x|y) vanishes,
    since the normalizing denominator is then zero.
    """
    if x not in (0, 1):
        raise InputValidationError(f"value index must be 0 or 1, got {x!r}")
    t = data.transition
    factors = (data.p_a[0], t[0][x], data.p_a[1], t[1][x])
    if min(factors) <= 0.0:
        raise DegenerateCellError("lambda undefined: degenerate cell")
    classical = data.p_a[0] * t[0][x] + data.p_a[1] * t[1][x]
    denom = 2.0 * math.sqrt(factors[0] * factors[1] * factors[2] * factors[3])
    return (data.p_b[x] - classical) / denom


def interference_total_probability(data: ContextualData, lam: float, x: int) -> float:
    """Total probability with the interference correction 2*lam*sqrt(prod).

    With lam taken from lambda_coefficient this reproduces p_b(x) identically;
    with lam = 0 it reduces to the classical total probability formula.
    """
    if x not in (0, 1):
        raise InputValidationError(f"value index must be 0 or 1, got {x!r}")
    t = data.transition
    classical = data.p_a[0] * t[0][x] + data.p_a[1] * t[1][x]
    prod = data.p_a[0] * t[0][x] * data.p_a[1] * t[1][x]
    return classical + 2.0 * lam * math.sqrt(max(prod, 0.0))


def _value_status(lam: float) -> str:
    if abs(abs(lam) - 1.0) <= BOUNDARY_BAND:
        return "boundary"
    if abs(lam) > 1.0:
        return "hyper"
    return "trig"


def classify_context(data: ContextualData) -> InterferenceReport:
    """Compute both coefficients and classify the context.

    trigonometric: both |lam| <= 1 (strictly inside the boundary band);
    hyperbolic: both |lam| > 1; degenerate-boundary: some |lam| within
    1e-9 of 1 and none hyperbolic; mixed otherwise.
    """
    lam = (lambda_coefficient(data, 0), lambda_coefficient(data, 1))
    statuses = tuple(_value_status(v) for v in lam)
    if "boundary" in statuses and "hyper" not in statuses:
        classification = DEGENERATE_BOUNDARY
    elif statuses == ("trig", "trig"):
        classification = TRIGONOMETRIC
    elif statuses == ("hyper", "hyper"):
        classification = HYPERBOLIC
    else:
        classification = MIXED

    phases: tuple[float, float] | None = None
    if classification in (TRIGONOMETRIC, DEGENERATE_BOUNDARY):
        clipped = tuple(min(1.0, max(-1.0, v)) for v in lam)
        phases = (math.acos(clipped[0]), math.acos(clipped[1]))
    return InterferenceReport(lam=lam, phases=phases, classification=classification)


def phase_constraint_check(report_or_phases) -> bool:
    """True iff the phase pair satisfies theta_2 - theta_1 = pi (mod 2*pi).

    Accepts an InterferenceReport or a bare (theta_1, theta_2) pair. This is
    the condition under which, together with a double-stochastic transition
    matrix, the second reference basis comes out orthonormal. Raw
    principal-branch phase pairs generally fail it; the resolved phases
    carried by a represented state satisfy it in the double-stochastic case.
    """
    phases = getattr(report_or_phases, "phases", report_or_phases)
    if phases is None:
        raise InputValidationError("phase pair unavailable: context not representable")
    t1, t2 = float(phases[0]), float(phases[1])
    return abs(((t2 - t1) % (2.0 * math.pi)) - math.pi) <= PHASE_CONSTRAINT_TOL
