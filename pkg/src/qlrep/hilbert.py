"""Complex two-level representation of trigonometric contextual data.

The state vector lives in C^2 with the b-level sets as the fixed reference
basis. Writing u_yx = sqrt(transition[y][x]) and weighting by sqrt(p_a),
the amplitude

    phi(x) = sqrt(p_a(0) * transition[0][x])
           + exp(i*theta_x) * sqrt(p_a(1) * transition[1][x])

reproduces p_b(x) as |phi(x)|^2 by construction. The derived a-basis
(e1 = row-0 square roots, e2 = phase-twisted row-1 square roots) is
orthonormal exactly when the transition matrix is double stochastic, and
only then does |<e_y, phi>|^2 return p_a(y). Both directions of that
equivalence are computed independently by theorem_check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    BornRuleUnavailableError,
    InputValidationError,
    NotRepresentableError,
    NumericalError,
)
from .interference import (
    DEGENERATE_BOUNDARY,
    TRIGONOMETRIC,
    ContextualData,
    InterferenceReport,
)

__all__ = [
    "Amplitude",
    "ReferenceBasis",
    "ObservableOperator",
    "QLState",
    "TheoremCheck",
    "represent",
    "born_probability",
    "is_double_stochastic",
    "theorem_check",
    "expectation",
    "operator_in_b_frame",
    "position_observable",
    "energy_observable",
    "hamiltonian_observable",
]

NORM_TOL = 1e-10
ORTHONORMALITY_TOL = 1e-10
HERMITIAN_TOL = 1e-12
EIGEN_RESIDUAL_TOL = 1e-10
DOUBLE_STOCHASTIC_TOL = 1e-12
BORN_B_TOL = 1e-12
BORN_A_TOL = 1e-10
# Clipped boundary phases reconstruct p_b only to the width of the clip.
BOUNDARY_BORN_TOL = 5e-9
PHASE_RESOLUTION_TOL = 1e-9

_CANONICAL_B = ((1.0 + 0.0j, 0.0 + 0.0j), (0.0 + 0.0j, 1.0 + 0.0j))


@dataclass(frozen=True)
class Amplitude:
    """Normalized pair of complex amplitudes in the b-basis."""

    components: tuple[complex, complex]

    def __post_init__(self) -> None:
        c = tuple(complex(v) for v in self.components)
        if len(c) != 2:
            raise InputValidationError("amplitude needs exactly 2 components")
        object.__setattr__(self, "components", c)
        if abs(self.norm_squared - 1.0) > NORM_TOL:
            raise InputValidationError(f"amplitude norm^2 {self.norm_squared!r} is not 1")

    @property
    def norm_squared(self) -> float:
        return abs(self.components[0]) ** 2 + abs(self.components[1]) ** 2

    def as_array(self) -> np.ndarray:
        return np.asarray(self.components, dtype=complex)


@dataclass(frozen=True)
class ReferenceBasis:
    """Canonical b-basis plus the derived a-basis.

    a_basis[1] is stored with the global phase exp(i*a_global_phase) stripped
    off; Born moduli never see it, and stripping keeps the double-stochastic
    second vector exactly real.
    """

    b_basis: tuple[tuple[complex, complex], tuple[complex, complex]]
    a_basis: tuple[tuple[complex, complex], tuple[complex, complex]]
    orthonormal: bool
    a_global_phase: float = 0.0

    def __post_init__(self) -> None:
        b = tuple(tuple(complex(v) for v in vec) for vec in self.b_basis)
        a = tuple(tuple(complex(v) for v in vec) for vec in self.a_basis)
        object.__setattr__(self, "b_basis", b)
        object.__setattr__(self, "a_basis", a)
        if b != _CANONICAL_B:
            raise InputValidationError("b-basis must be the canonical pair")

    def a_vector(self, y: int) -> np.ndarray:
        return np.asarray(self.a_basis[y], dtype=complex)


def _eig2_hermitian(m: np.ndarray) -> tuple[tuple[float, float], np.ndarray]:
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix.

    Returns eigenvalues ascending and unit eigenvectors as columns.
    """
    a = m[0, 0].real
    d = m[1, 1].real
    b = m[0, 1]
    half_gap = 0.5 * (a - d)
    disc = math.hypot(half_gap, abs(b))
    lo = 0.5 * (a + d) - disc
    hi = 0.5 * (a + d) + disc
    scale = max(abs(a), abs(d), abs(b), 1.0)
    if disc <= 1e-15 * scale:
        return (lo, hi), np.eye(2, dtype=complex)
    cols = []
    for lam in (lo, hi):
        v1 = np.array([b, lam - a], dtype=complex)
        v2 = np.array([lam - d, b.conjugate()], dtype=complex)
        v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
        cols.append(v / np.linalg.norm(v))
    return (lo, hi), np.column_stack(cols)


@dataclass(frozen=True)
class ObservableOperator:
    """Self-adjoint 2x2 operator with its spectrum, tagged by frame.

    frame "b" means the matrix acts on raw b-components; frame "a" means it
    is written in the coordinates of the stored (phase-stripped) a-basis.
    """

    matrix: tuple[tuple[complex, complex], tuple[complex, complex]]
    eigenvalues: tuple[float, float]
    role: str
    frame: str = "b"

    def __post_init__(self) -> None:
        m = tuple(tuple(complex(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(
            self, "eigenvalues", (float(self.eigenvalues[0]), float(self.eigenvalues[1]))
        )
        if self.frame not in ("a", "b"):
            raise InputValidationError(f"unknown frame {self.frame!r}")
        arr = self.as_array()
        if np.max(np.abs(arr - arr.conj().T)) > HERMITIAN_TOL:
            raise InputValidationError("operator matrix is not self-adjoint")
        vals, vecs = _eig2_hermitian(arr)
        if max(abs(vals[0] - self.eigenvalues[0]), abs(vals[1] - self.eigenvalues[1])) > 1e-10:
            raise InputValidationError("declared eigenvalues do not match the matrix")
        for i in (0, 1):
            residual = np.linalg.norm(arr @ vecs[:, i] - vals[i] * vecs[:, i])
            if residual > EIGEN_RESIDUAL_TOL:
                raise NumericalError(f"eigenpair residual {residual!r} too large")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=complex)

    @cached_property
    def eigenvectors(self) -> np.ndarray:
        return _eig2_hermitian(self.as_array())[1]

    @classmethod
    def from_matrix(cls, matrix, role: str, frame: str = "b") -> "ObservableOperator":
        arr = np.asarray(matrix, dtype=complex)
        if arr.shape != (2, 2):
            raise InputValidationError("operator matrix must be 2x2")
        if np.max(np.abs(arr - arr.conj().T)) > HERMITIAN_TOL:
            raise InputValidationError("operator matrix is not self-adjoint")
        vals, _ = _eig2_hermitian(arr)
        return cls(
            matrix=tuple(tuple(row) for row in arr.tolist()),
            eigenvalues=vals,
            role=role,
            frame=frame,
        )


@dataclass(frozen=True)
class QLState:
    """Image of one context: amplitude, bases, source probabilities, phases.

    boundary marks |lambda| at the clip edge; phase_disagreement is set when
    the double-stochastic branch choice theta2 = theta1 + pi contradicts the
    independently computed second phase beyond 1e-9.
    """

    amplitude: Amplitude
    basis: ReferenceBasis
    source_data: ContextualData
    phases: tuple[float, float]
    boundary: bool = False
    phase_disagreement: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "phases", (float(self.phases[0]), float(self.phases[1])))


@dataclass(frozen=True)
class TheoremCheck:
    """Both sides of the double-stochasticity equivalence, computed separately."""

    both_born_rules_hold: bool
    double_stochastic: bool

    @property
    def agree(self) -> bool:
        return self.both_born_rules_hold == self.double_stochastic


def is_double_stochastic(transition) -> bool:
    """True iff both column sums of a row-stochastic 2x2 matrix are 1 (1e-12)."""
    rows = tuple(tuple(float(v) for v in row) for row in transition)
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise InputValidationError("transition matrix must be 2x2")
    for r in rows:
        for v in r:
            if not (0.0 <= v <= 1.0) or not math.isfinite(v):
                raise InputValidationError(f"transition entry {v!r} outside [0,1]")
        if abs(math.fsum(r) - 1.0) > DOUBLE_STOCHASTIC_TOL:
            raise InputValidationError("transition matrix is not row-stochastic")
    return all(
        abs(rows[0][x] + rows[1][x] - 1.0) <= DOUBLE_STOCHASTIC_TOL for x in (0, 1)
    )


def _amplitude_components(data: ContextualData, phases: tuple[float, float]) -> tuple[complex, complex]:
    out = []
    for x in (0, 1):
        first = math.sqrt(data.p_a[0] * data.transition[0][x])
        second = math.sqrt(data.p_a[1] * data.transition[1][x])
        out.append(first + cmath.exp(1j * phases[x]) * second)
    return (out[0], out[1])


def _a_basis(data: ContextualData, phases: tuple[float, float], exact_pi_gap: bool):
    u = [[math.sqrt(data.transition[y][x]) for x in (0, 1)] for y in (0, 1)]
    e1 = (complex(u[0][0]), complex(u[0][1]))
    if exact_pi_gap:
        e2 = (complex(u[1][0]), complex(-u[1][1]))
    else:
        twist = cmath.exp(1j * (phases[1] - phases[0]))
        e2 = (complex(u[1][0]), twist * u[1][1])
    v1 = np.asarray(e1)
    v2 = np.asarray(e2)
    orthonormal = bool(
        abs(np.vdot(v1, v2)) <= ORTHONORMALITY_TOL
        and abs(np.linalg.norm(v1) - 1.0) <= ORTHONORMALITY_TOL
        and abs(np.linalg.norm(v2) - 1.0) <= ORTHONORMALITY_TOL
    )
    return (e1, e2), orthonormal


def represent(data: ContextualData, report: InterferenceReport) -> QLState:
    """Build the QLState realizing Born's rule for b (and for a when possible).

    For double-stochastic transitions the second phase is forced to
    theta1 + pi, the only branch compatible with an orthonormal a-basis; if
    that choice disagrees with cos(theta2) = lambda2 beyond 1e-9 the gap is
    recorded on the state instead of being silently dropped.
    """
    if report.classification not in (TRIGONOMETRIC, DEGENERATE_BOUNDARY) or report.phases is None:
        raise NotRepresentableError(
            "not representable in complex Hilbert space: "
            f"classification is {report.classification!r}"
        )
    theta1, theta2 = report.phases
    ds = is_double_stochastic(data.transition)
    disagreement = None
    if ds:
        resolved = theta1 + math.pi
        gap = abs(math.cos(resolved) - report.lam[1])
        if gap > PHASE_RESOLUTION_TOL:
            disagreement = gap
        theta2 = resolved
    phases = (theta1, theta2)
    components = _amplitude_components(data, phases)
    boundary = report.classification == DEGENERATE_BOUNDARY
    born_tol = BOUNDARY_BORN_TOL if boundary else BORN_B_TOL
    for x in (0, 1):
        residual = abs(abs(components[x]) ** 2 - data.p_b[x])
        if residual > born_tol:
            raise NumericalError(
                f"Born rule for b failed at x={x}: residual {residual!r}"
            )
    a_basis, orthonormal = _a_basis(data, phases, exact_pi_gap=ds)
    return QLState(
        amplitude=Amplitude(components=components),
        basis=ReferenceBasis(
            b_basis=_CANONICAL_B,
            a_basis=a_basis,
            orthonormal=orthonormal,
            a_global_phase=theta1,
        ),
        source_data=data,
        phases=phases,
        boundary=boundary,
        phase_disagreement=disagreement,
    )


def born_probability(state: QLState, observable: str, value_index: int) -> float:
    """|<basis vector, phi>|^2 for the requested reference variable."""
    if value_index not in (0, 1):
        raise InputValidationError(f"value index must be 0 or 1, got {value_index!r}")
    phi = state.amplitude.as_array()
    if observable == "b":
        e = np.asarray(state.basis.b_basis[value_index], dtype=complex)
    elif observable == "a":
        if not state.basis.orthonormal:
            raise BornRuleUnavailableError(
                "Born rule for a unavailable: a-basis is not orthonormal"
            )
        e = state.basis.a_vector(value_index)
    else:
        raise InputValidationError(f"observable must be 'a' or 'b', got {observable!r}")
    return float(abs(np.vdot(e, phi)) ** 2)


def theorem_check(data: ContextualData, report: InterferenceReport) -> TheoremCheck:
    """Compute Born-for-both and double-stochasticity without consulting each other.

    The Born side always takes the forced branch theta2 = theta1 + pi (no
    other branch can orthonormalize the a-basis) and then tests numerically:
    b-rule residual, a-basis orthonormality, a-rule residual, all at 1e-10.
    The matrix side is a bare column-sum check at 1e-12. The theorem says the
    flags agree; disagreement on adversarially near-boundary input is
    reported, not raised.
    """
    if report.classification not in (TRIGONOMETRIC, DEGENERATE_BOUNDARY) or report.phases is None:
        raise NotRepresentableError(
            "not representable in complex Hilbert space: "
            f"classification is {report.classification!r}"
        )
    theta1 = report.phases[0]
    phases = (theta1, theta1 + math.pi)
    components = _amplitude_components(data, phases)
    born_b_ok = all(
        abs(abs(components[x]) ** 2 - data.p_b[x]) <= BORN_A_TOL for x in (0, 1)
    )
    a_basis, orthonormal = _a_basis(data, phases, exact_pi_gap=True)
    born_a_ok = False
    if orthonormal:
        phi = np.asarray(components)
        born_a_ok = all(
            abs(abs(np.vdot(np.asarray(a_basis[y]), phi)) ** 2 - data.p_a[y]) <= BORN_A_TOL
            for y in (0, 1)
        )
    return TheoremCheck(
        both_born_rules_hold=born_b_ok and orthonormal and born_a_ok,
        double_stochastic=is_double_stochastic(data.transition),
    )


def expectation(state: QLState, observable: ObservableOperator) -> float:
    """<phi, A phi> in the operator's own frame; guaranteed real.

    Frame "a" projects phi onto the stored a-basis first, which needs
    orthonormality.
    """
    phi = state.amplitude.as_array()
    if observable.frame == "b":
        vec = phi
    else:
        if not state.basis.orthonormal:
            raise BornRuleUnavailableError(
                "a-frame expectation unavailable: a-basis is not orthonormal"
            )
        vec = np.array(
            [np.vdot(state.basis.a_vector(0), phi), np.vdot(state.basis.a_vector(1), phi)]
        )
    z = complex(np.vdot(vec, observable.as_array() @ vec))
    if abs(z.imag) > 1e-10:
        raise NumericalError(f"expectation has imaginary part {z.imag!r}")
    return z.real


def operator_in_b_frame(observable: ObservableOperator, basis: ReferenceBasis) -> ObservableOperator:
    """Rewrite an a-frame operator on raw b-components: B M B^dagger.

    Outer products of basis vectors are global-phase free, so the stripped
    a-basis gives the same answer as the true one.
    """
    if observable.frame == "b":
        return observable
    if not basis.orthonormal:
        raise BornRuleUnavailableError(
            "cannot change frame: a-basis is not orthonormal"
        )
    b_mat = np.column_stack([basis.a_vector(0), basis.a_vector(1)])
    converted = b_mat @ observable.as_array() @ b_mat.conj().T
    return ObservableOperator.from_matrix(converted, role=observable.role, frame="b")


def position_observable(values: tuple[float, float]) -> ObservableOperator:
    """Multiplication by the b-values: diagonal in the b-basis."""
    return ObservableOperator.from_matrix(
        np.diag([float(values[0]), float(values[1])]), role="position-like-b", frame="b"
    )


def energy_observable(values: tuple[float, float]) -> ObservableOperator:
    """Diagonal with the a-values in the a-basis coordinates."""
    return ObservableOperator.from_matrix(
        np.diag([float(values[0]), float(values[1])]), role="energy-like-a", frame="a"
    )


def hamiltonian_observable(matrix) -> ObservableOperator:
    """Self-adjoint generator written in the a-basis coordinates."""
    return ObservableOperator.from_matrix(matrix, role="hamiltonian", frame="a")
