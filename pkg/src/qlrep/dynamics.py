"""Unitary phase dynamics of represented contexts.

Evolution over an interval is a single real number: the increment xi(t, t0)
added to both component phases of a state. In the a-basis at the starting
time this is the diagonal unitary diag(1, e^{i xi}), so a-probabilities are
conserved identically while b-probabilities oscillate. Every dynamical
question then reduces to a property of xi:

    context independence of xi      <-> linearity
    cocycle xi(t,t0)=xi(t,t1)+xi(t1,t0)  <-> determinism / reversibility
    xi(t+d,t0+d)=xi(t,t0)           <-> time-shift invariance

and the fully invariant case is generated by a constant Hamiltonian
diag(0, E) with E = -h * xi / (t - t0).
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad

from .errors import (
    InputValidationError,
    NoGeneratorError,
    NumericalError,
    PhaseAliasingError,
)
from .hilbert import (
    Amplitude,
    ObservableOperator,
    QLState,
    _amplitude_components,
    hamiltonian_observable,
)
from .interference import BOUNDARY_BAND, TRIGONOMETRIC, ContextualData, classify_context
from .prespace import (
    Context,
    DichotomousVariable,
    PrespaceProcess,
    conditional_probability,
    contextual_data,
)
from .errors import DegenerateContextError, IncompatibilityError

__all__ = [
    "PhaseLaw",
    "Propagator",
    "DynamicsClassification",
    "SuperpositionWitness",
    "LinearityCheck",
    "HamiltonianExtraction",
    "EnergyProcess",
    "EnergyReport",
    "ApproximationReport",
    "constant_rate_law",
    "rate_law",
    "increment_law",
    "perturbed_law",
    "context_law",
    "law_from_phase_samples",
    "continuous_phase_branch",
    "propagator",
    "evolve",
    "phase_trajectory",
    "classify_linearity",
    "classify_determinism",
    "cocycle_residual",
    "classify_time_shift_invariance",
    "classify_continuity",
    "classify_dynamics",
    "validate_preconditions",
    "extract_hamiltonian",
    "group_law_residual",
    "energy_process",
    "approximation_analysis",
]

STRUCTURAL_TOL = 1e-12
LAW_TOL = 1e-9
CONSERVATION_TOL = 1e-12
QUAD_TOL = 1e-12
DEFAULT_SUBSAMPLE = 12

_KINDS = ("constant-rate", "function-of-t", "function-of-(t,t0)")


@dataclass(frozen=True, eq=False)
class PhaseLaw:
    """Phase increment law xi(t, t0), optionally split into known parts.

    integrand is f with xi(t,t0) = integral of f from t0 to t, available when
    the law came from a rate; context_increments makes the law
    context-dependent; perturbation carries an (epsilon, f1(t,t0)) term on
    top of base_law for the approximate-reversibility analysis.
    """

    kind: str
    increment: Callable[[float, float], float]
    integrand: Callable[[float], float] | None = None
    context_increments: Mapping[str, Callable[[float, float], float]] | None = None
    perturbation: tuple[float, Callable[[float, float], float]] | None = None
    base_law: "PhaseLaw | None" = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise InputValidationError(f"unknown phase-law kind {self.kind!r}")
        if self.context_increments is not None:
            object.__setattr__(self, "context_increments", dict(self.context_increments))
        evaluators = [self.increment]
        if self.context_increments:
            evaluators.extend(self.context_increments.values())
        for ev in evaluators:
            for probe in (0.0, 0.5, 1.0):
                try:
                    v = float(ev(probe, probe))
                except Exception:
                    continue
                if not math.isfinite(v) or abs(v) > STRUCTURAL_TOL:
                    raise InputValidationError(
                        f"xi(t0,t0) must vanish, got {v!r} at t0={probe}"
                    )
                break


def constant_rate_law(rate: float) -> PhaseLaw:
    """xi(t,t0) = rate * (t - t0)."""
    r = float(rate)
    return PhaseLaw(
        kind="constant-rate",
        increment=lambda t, t0: r * (t - t0),
        integrand=lambda t: r,
    )


def rate_law(
    f: Callable[[float], float],
    antiderivative: Callable[[float], float] | None = None,
) -> PhaseLaw:
    """xi(t,t0) = integral of f over [t0,t].

    Pass the antiderivative when known; otherwise adaptive quadrature at
    1e-12 absolute/relative tolerance is used per evaluation.
    """
    if antiderivative is not None:
        def inc(t: float, t0: float) -> float:
            return antiderivative(t) - antiderivative(t0)
    else:
        def inc(t: float, t0: float) -> float:
            val, _ = quad(f, t0, t, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
            return val
    return PhaseLaw(kind="function-of-t", increment=inc, integrand=f)


def increment_law(
    xi: Callable[[float, float], float], kind: str = "function-of-(t,t0)"
) -> PhaseLaw:
    """Wrap a raw two-argument increment evaluator."""
    return PhaseLaw(kind=kind, increment=xi)


def perturbed_law(
    base: PhaseLaw, epsilon: float, f1: Callable[[float, float], float]
) -> PhaseLaw:
    """base law plus epsilon * integral of f1(s, t0) ds over [t0, t].

    The second argument of f1 is the interval start, which is what breaks
    the cocycle identity and makes the dynamics irreversible for epsilon of
    any appreciable size.
    """
    eps = float(epsilon)

    def inc(t: float, t0: float) -> float:
        extra, _ = quad(
            lambda s: f1(s, t0), t0, t, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200
        )
        return base.increment(t, t0) + eps * extra

    return PhaseLaw(
        kind="function-of-(t,t0)",
        increment=inc,
        perturbation=(eps, f1),
        base_law=base,
    )


def context_law(per_context: Mapping[str, "PhaseLaw | Callable[[float, float], float]"]) -> PhaseLaw:
    """One law per context label; propagation then requires the label."""
    if not per_context:
        raise InputValidationError("context map is empty")
    incs = {
        label: (law.increment if isinstance(law, PhaseLaw) else law)
        for label, law in per_context.items()
    }
    first = next(iter(incs.values()))
    return PhaseLaw(
        kind="function-of-(t,t0)", increment=first, context_increments=incs
    )


def continuous_phase_branch(
    lambdas: Sequence[float], theta0: float | None = None
) -> np.ndarray:
    """Resolve theta(t) from lambda samples by nearest-branch continuation.

    arccos only gives theta up to sign and whole turns; each step picks the
    candidate closest to the previous angle. A jump of pi/2 or more between
    samples means the grid cannot distinguish branches.
    """
    lam = np.asarray(lambdas, dtype=float)
    if lam.ndim != 1 or lam.size < 1:
        raise InputValidationError("need a 1-d array of lambda samples")
    if np.max(np.abs(lam)) > 1.0 + LAW_TOL:
        raise InputValidationError("lambda samples leave [-1, 1]")
    clipped = np.clip(lam, -1.0, 1.0)
    base = np.arccos(clipped)
    out = np.empty_like(base)
    if theta0 is None:
        out[0] = base[0]
    else:
        if abs(math.cos(theta0) - clipped[0]) > LAW_TOL:
            raise InputValidationError("theta0 inconsistent with the first lambda sample")
        out[0] = float(theta0)
    two_pi = 2.0 * math.pi
    for i in range(1, base.size):
        prev = out[i - 1]
        best = None
        for signed in (base[i], -base[i]):
            k = round((prev - signed) / two_pi)
            cand = signed + two_pi * k
            if best is None or abs(cand - prev) < abs(best - prev):
                best = cand
        if abs(best - prev) >= math.pi / 2:
            raise PhaseAliasingError(
                "phase aliasing: sampling grid too coarse to track the branch"
            )
        out[i] = best
    return out


def law_from_phase_samples(times: Sequence[float], thetas: Sequence[float]) -> PhaseLaw:
    """Empirical law from a continuous-branch phase path, linearly interpolated."""
    ts = np.asarray(times, dtype=float)
    th = np.asarray(thetas, dtype=float)
    if ts.ndim != 1 or ts.size < 2 or ts.shape != th.shape:
        raise InputValidationError("need matching 1-d arrays with at least 2 samples")
    if np.any(np.diff(ts) <= 0):
        raise InputValidationError("time samples must be strictly increasing")
    if np.max(np.abs(np.diff(th))) >= math.pi / 2:
        raise PhaseAliasingError(
            "phase aliasing: sampling grid too coarse to track the branch"
        )

    def inc(t: float, t0: float) -> float:
        return float(np.interp(t, ts, th) - np.interp(t0, ts, th))

    return PhaseLaw(kind="function-of-t", increment=inc)


@dataclass(frozen=True)
class Propagator:
    """diag(1, e^{i xi}) in the a-basis of the interval start."""

    matrix: tuple[tuple[complex, complex], tuple[complex, complex]]
    interval: tuple[float, float]
    xi: float
    context_label: str | None = None

    def __post_init__(self) -> None:
        m = tuple(tuple(complex(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(
            self, "interval", (float(self.interval[0]), float(self.interval[1]))
        )
        object.__setattr__(self, "xi", float(self.xi))
        if m[0][1] != 0 or m[1][0] != 0:
            raise InputValidationError("propagator must be exactly diagonal")
        if abs(m[0][0] - 1.0) > STRUCTURAL_TOL:
            raise InputValidationError("propagator upper entry must be 1")
        arr = self.as_array()
        if np.max(np.abs(arr.conj().T @ arr - np.eye(2))) > STRUCTURAL_TOL:
            raise NumericalError("propagator is not unitary")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=complex)


def _increment_for(
    law: PhaseLaw, context: str | None
) -> Callable[[float, float], float]:
    if law.context_increments is not None:
        if context is None:
            raise InputValidationError(
                "context label required: law is context-dependent"
            )
        try:
            return law.context_increments[context]
        except KeyError:
            raise InputValidationError(f"unknown context label {context!r}") from None
    return law.increment


def propagator(
    law: PhaseLaw, t0: float, t: float, context: str | None = None
) -> Propagator:
    """Evaluate the law on [t0, t] and wrap the diagonal unitary."""
    inc = _increment_for(law, context)
    xi = float(inc(t, t0))
    if not math.isfinite(xi):
        raise NumericalError(f"phase increment is not finite on ({t0}, {t})")
    matrix = ((1.0 + 0.0j, 0.0 + 0.0j), (0.0 + 0.0j, cmath.exp(1j * xi)))
    return Propagator(matrix=matrix, interval=(t0, t), xi=xi, context_label=context)


def _shift_state(state: QLState, xi: float) -> QLState:
    theta = (state.phases[0] + xi, state.phases[1] + xi)
    data = state.source_data
    comps = _amplitude_components(data, theta)
    new_data = ContextualData(
        p_a=data.p_a,
        p_b=(abs(comps[0]) ** 2, abs(comps[1]) ** 2),
        transition=data.transition,
    )
    lam = (math.cos(theta[0]), math.cos(theta[1]))
    return QLState(
        amplitude=Amplitude(components=comps),
        basis=replace(state.basis, a_global_phase=theta[0]),
        source_data=new_data,
        phases=theta,
        boundary=max(abs(lam[0]), abs(lam[1])) >= 1.0 - BOUNDARY_BAND,
        phase_disagreement=None,
    )


def evolve(
    state: QLState, law: PhaseLaw, t0: float, t: float, context: str | None = None
) -> QLState:
    """Apply the interval's propagator: both phases shift by xi.

    b-probabilities are recomputed from the shifted amplitude;
    a-probabilities and the transition matrix are carried over unchanged,
    which is exact because the propagator is diagonal in the a-basis. The
    state must have an orthonormal a-basis: without it the phase shift does
    not preserve normalization and no unitary picture exists.
    """
    if not state.basis.orthonormal:
        raise InputValidationError("evolve requires an orthonormal a-basis")
    prop = propagator(law, t0, t, context)
    return _shift_state(state, prop.xi)


def phase_trajectory(
    state: QLState,
    law: PhaseLaw,
    grid: Sequence[float],
    context: str | None = None,
) -> list[tuple[float, float, QLState]]:
    """Evolve from grid[0] to every grid point; returns (t, xi, state) rows.

    Increments are always evaluated against grid[0] directly rather than
    chained step by step, so a deterministic law accumulates no stepping
    error.
    """
    if not state.basis.orthonormal:
        raise InputValidationError("evolve requires an orthonormal a-basis")
    pts = [float(t) for t in grid]
    if len(pts) < 1 or any(b <= a for a, b in zip(pts, pts[1:])):
        raise InputValidationError("grid must be nonempty and strictly increasing")
    inc = _increment_for(law, context)
    t0 = pts[0]
    out = []
    for t in pts:
        xi = float(inc(t, t0))
        if not math.isfinite(xi):
            raise NumericalError(f"phase increment is not finite at t={t}")
        out.append((t, xi, _shift_state(state, xi)))
    return out


def _subsample(grid: Sequence[float], k: int = DEFAULT_SUBSAMPLE) -> list[float]:
    pts = [float(t) for t in grid]
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise InputValidationError("grid must be strictly increasing")
    if len(pts) <= k:
        return pts
    idx = sorted(set(int(round(i)) for i in np.linspace(0, len(pts) - 1, k)))
    return [pts[i] for i in idx]


@dataclass(frozen=True)
class SuperpositionWitness:
    """Concrete additivity violation for a context-dependent law.

    violation = || U_1 (alpha phi1 + beta phi2) - (alpha U_1 phi1 + beta U_2 phi2) ||
    evaluated at the grid pair and context pair where the propagators differ
    the most.
    """

    phi1: tuple[complex, complex]
    phi2: tuple[complex, complex]
    alpha: complex
    beta: complex
    interval: tuple[float, float]
    context_labels: tuple[str, str]
    violation: float


@dataclass(frozen=True)
class LinearityCheck:
    """Result of the context-independence test; truthy iff linear."""

    linear: bool
    max_increment_gap: float
    witness: SuperpositionWitness | None = None

    def __bool__(self) -> bool:
        return self.linear


def classify_linearity(
    law: PhaseLaw, contexts: Iterable[str], grid: Sequence[float]
) -> LinearityCheck:
    """Linear iff the increment does not depend on the context label.

    Compares xi over all context pairs on a subsampled (t0, t) grid at 1e-9.
    When the law fails, a superposition witness is built at the argmax of
    the unitary gap |e^{i xi_1} - e^{i xi_2}|.
    """
    labels = list(contexts)
    if law.context_increments is not None and not labels:
        labels = list(law.context_increments)
    if law.context_increments is None or len(labels) < 2:
        return LinearityCheck(linear=True, max_increment_gap=0.0)
    pts = _subsample(grid)
    pairs = [(pts[i], pts[j]) for i in range(len(pts)) for j in range(i + 1, len(pts))]
    values = {
        lab: [float(_increment_for(law, lab)(t, t0)) for (t0, t) in pairs]
        for lab in labels
    }
    max_gap = 0.0
    best = None
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            xi_i = values[labels[i]]
            xi_j = values[labels[j]]
            for k, (t0, t) in enumerate(pairs):
                gap = abs(xi_i[k] - xi_j[k])
                max_gap = max(max_gap, gap)
                ugap = abs(cmath.exp(1j * xi_i[k]) - cmath.exp(1j * xi_j[k]))
                if best is None or ugap > best[0]:
                    best = (ugap, labels[i], labels[j], t0, t, xi_i[k], xi_j[k])
    if max_gap <= LAW_TOL:
        return LinearityCheck(linear=True, max_increment_gap=max_gap)
    _, lab1, lab2, t0, t, xi1, xi2 = best
    phi1 = (complex(math.sqrt(0.75)), complex(0.5))
    phi2 = (complex(1 / math.sqrt(2)), complex(1 / math.sqrt(2)))
    alpha = beta = complex(1 / math.sqrt(2))
    u1 = np.diag([1.0, cmath.exp(1j * xi1)])
    u2 = np.diag([1.0, cmath.exp(1j * xi2)])
    v1 = np.asarray(phi1)
    v2 = np.asarray(phi2)
    lhs = u1 @ (alpha * v1 + beta * v2)
    rhs = alpha * (u1 @ v1) + beta * (u2 @ v2)
    witness = SuperpositionWitness(
        phi1=phi1,
        phi2=phi2,
        alpha=alpha,
        beta=beta,
        interval=(t0, t),
        context_labels=(lab1, lab2),
        violation=float(np.linalg.norm(lhs - rhs)),
    )
    return LinearityCheck(linear=False, max_increment_gap=max_gap, witness=witness)


def cocycle_residual(
    law: PhaseLaw, grid: Sequence[float], context: str | None = None
) -> float:
    """max |xi(t,t0) - xi(t,t1) - xi(t1,t0)| over subsampled grid triples."""
    pts = _subsample(grid)
    if len(pts) < 3:
        raise InputValidationError("need at least 3 grid points")
    inc = _increment_for(law, context)
    cache: dict[tuple[int, int], float] = {}

    def xi(i: int, j: int) -> float:
        if (i, j) not in cache:
            cache[(i, j)] = float(inc(pts[j], pts[i]))
        return cache[(i, j)]

    worst = 0.0
    for i in range(len(pts)):
        for k in range(i + 1, len(pts)):
            for j in range(k + 1, len(pts)):
                worst = max(worst, abs(xi(i, j) - xi(k, j) - xi(i, k)))
    return worst


def classify_determinism(
    law: PhaseLaw, grid: Sequence[float], context: str | None = None
) -> bool:
    """True iff the cocycle identity holds at 1e-9; false marks irreversibility."""
    return cocycle_residual(law, grid, context) <= LAW_TOL


def classify_time_shift_invariance(
    law: PhaseLaw, grid: Sequence[float], context: str | None = None
) -> bool:
    """True iff xi(t+d, t0+d) = xi(t, t0) at 1e-9 for shifts within the grid."""
    pts = _subsample(grid)
    if len(pts) < 3:
        raise InputValidationError("need at least 3 grid points")
    inc = _increment_for(law, context)
    end = pts[-1]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            t0, t = pts[i], pts[j]
            ref = float(inc(t, t0))
            for m in range(1, len(pts)):
                d = pts[m] - pts[0]
                if t + d > end + 1e-12:
                    break
                if abs(float(inc(t + d, t0 + d)) - ref) > LAW_TOL:
                    return False
    return True


def classify_continuity(
    law: PhaseLaw, grid: Sequence[float], context: str | None = None
) -> bool:
    """Numerical continuity: consecutive increments shrink under refinement.

    Scans the whole span at a coarse and an 8x finer spacing. A jump keeps
    the max consecutive increment pinned at the jump height; a continuous
    law shrinks it roughly linearly with the spacing. Holder exponents below
    ~1/3 read as discontinuous; the families used here are smooth away from
    deliberate jumps.
    """
    pts = list(grid)
    inc = _increment_for(law, context)
    t0 = pts[0]
    span = pts[-1] - pts[0]
    if span <= 0:
        raise InputValidationError("grid must span a positive interval")

    def max_consecutive(n: int) -> float:
        d = span / n
        worst = 0.0
        prev = float(inc(t0, t0))
        for i in range(1, n + 1):
            cur = float(inc(t0 + i * d, t0))
            if not math.isfinite(cur):
                return math.inf
            worst = max(worst, abs(cur - prev))
            prev = cur
        return worst

    coarse = max_consecutive(64)
    fine = max_consecutive(512)
    if not (math.isfinite(coarse) and math.isfinite(fine)):
        return False
    return fine <= 0.5 * coarse + LAW_TOL


def group_law_residual(
    law: PhaseLaw, grid: Sequence[float], context: str | None = None
) -> float:
    """max ||U(s+t) - U(s)U(t)|| over grid offsets, with U(tau) from grid[0]."""
    pts = _subsample(grid)
    inc = _increment_for(law, context)
    t_ref = pts[0]
    offsets = [p - t_ref for p in pts]
    span = offsets[-1]

    def u(tau: float) -> complex:
        return cmath.exp(1j * float(inc(t_ref + tau, t_ref)))

    worst = 0.0
    for s in offsets:
        for t in offsets:
            if s + t > span + 1e-12:
                continue
            worst = max(worst, abs(u(s + t) - u(s) * u(t)))
    return worst


@dataclass(frozen=True)
class DynamicsClassification:
    """Flag record; None means the flag was not evaluated.

    trig_preserved / a_prob_conserved / transition_conserved describe a
    prespace process; linear / deterministic / continuous /
    time_shift_invariant describe a phase law; schroedinger is their
    conjunction, and when it holds extracted_energy carries the constant
    generator level (time_dependent_generator carries E(t) in the
    deterministic non-invariant case).
    """

    trig_preserved: bool | None = None
    a_prob_conserved: bool | None = None
    transition_conserved: bool | None = None
    linear: bool | None = None
    deterministic: bool | None = None
    continuous: bool | None = None
    time_shift_invariant: bool | None = None
    schroedinger: bool | None = None
    extracted_energy: float | None = None
    time_dependent_generator: Callable[[float], float] | None = None
    witness: SuperpositionWitness | None = None

    def __post_init__(self) -> None:
        if self.schroedinger:
            needed = (
                self.linear,
                self.deterministic,
                self.continuous,
                self.time_shift_invariant,
            )
            if not all(f is True for f in needed):
                raise InputValidationError(
                    "schroedinger flag requires linear, deterministic, "
                    "continuous and time-shift-invariant all true"
                )


def validate_preconditions(
    process: PrespaceProcess,
    tracked_contexts: Iterable[Context],
    t0: float | None = None,
) -> DynamicsClassification:
    """Check the three process-level conservation conditions.

    trig_preserved: every tracked context classifies trigonometric at every
    time point (needs the b-track; None without it). a_prob_conserved:
    P(a(t)=y | C) never moves from its t0 value, at 1e-12 by exact set
    arithmetic. transition_conserved: the context-free transition matrix is
    constant in t (also needs the b-track).
    """
    contexts = list(tracked_contexts)
    grid = process.time_grid
    start = grid[0] if t0 is None else float(t0)
    if start not in grid:
        raise InputValidationError("t0 must be one of the process time points")
    i0 = grid.index(start)
    space = process.space

    a_ok = True
    for c in contexts:
        ref = [
            conditional_probability(space, process.a_variables[i0].level_set(y), c)
            for y in (0, 1)
        ]
        for var in process.a_variables:
            for y in (0, 1):
                p = conditional_probability(space, var.level_set(y), c)
                if abs(p - ref[y]) > CONSERVATION_TOL:
                    a_ok = False

    trig: bool | None = None
    trans_ok: bool | None = None
    if process.b_variables is not None:
        trig = True
        for c in contexts:
            for a_var, b_var in zip(process.a_variables, process.b_variables):
                try:
                    data = contextual_data(space, a_var, b_var, c)
                except (DegenerateContextError, IncompatibilityError):
                    trig = False
                    continue
                if classify_context(data).classification != TRIGONOMETRIC:
                    trig = False
        trans_ok = True
        ref_b = process.b_variables[i0]
        ref_trans = [
            [
                space.prob(ref_b.level_set(x) & process.a_variables[i0].level_set(y))
                / space.prob(process.a_variables[i0].level_set(y))
                for x in (0, 1)
            ]
            for y in (0, 1)
        ]
        for a_var, b_var in zip(process.a_variables, process.b_variables):
            for y in (0, 1):
                ay = a_var.level_set(y)
                pay = space.prob(ay)
                if pay <= CONSERVATION_TOL:
                    trans_ok = False
                    continue
                for x in (0, 1):
                    p = space.prob(b_var.level_set(x) & ay) / pay
                    if abs(p - ref_trans[y][x]) > CONSERVATION_TOL:
                        trans_ok = False

    return DynamicsClassification(
        trig_preserved=trig, a_prob_conserved=a_ok, transition_conserved=trans_ok
    )


@dataclass(frozen=True)
class HamiltonianExtraction:
    """Generator recovered from a deterministic continuous law."""

    kind: str
    energy: float | None
    operator: ObservableOperator | None
    generator: Callable[[float], float] | None
    reconstruction_residual: float


def extract_hamiltonian(
    law: PhaseLaw,
    h: float,
    grid: Sequence[float],
    context: str | None = None,
) -> HamiltonianExtraction:
    """Recover diag(0, E) or the evaluator E(t) = -h f(t) from the law.

    Constant case (time-shift invariant): E = -h xi(t,t0)/(t-t0), verified
    constant over grid pairs at 1e-9. Time-dependent case: f taken from the
    law's integrand when present, else by central difference at 1e-5. Both
    paths re-exponentiate and compare against the law's own propagator at
    1e-9 before returning.
    """
    if float(h) <= 0:
        raise InputValidationError("h must be positive")
    h = float(h)
    pts = _subsample(grid)
    if len(pts) < 3:
        raise InputValidationError("need at least 3 grid points")
    inc = _increment_for(law, context)
    if cocycle_residual(law, grid, context) > LAW_TOL or not classify_continuity(
        law, grid, context
    ):
        raise NoGeneratorError(
            "no generator exists: law is not deterministic and continuous"
        )
    t0, t_end = pts[0], pts[-1]
    if classify_time_shift_invariance(law, grid, context):
        energy = -h * float(inc(t_end, t0)) / (t_end - t0)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                dt = pts[j] - pts[i]
                if dt < (t_end - t0) / (4 * len(pts)):
                    continue
                e_ij = -h * float(inc(pts[j], pts[i])) / dt
                if abs(e_ij - energy) > LAW_TOL:
                    raise NumericalError(
                        "extracted energy is not constant over the grid"
                    )
        residual = max(
            abs(cmath.exp(-1j * energy * (t - t0) / h) - cmath.exp(1j * float(inc(t, t0))))
            for t in pts
        )
        if residual > LAW_TOL:
            raise NumericalError(f"propagator reconstruction residual {residual!r}")
        return HamiltonianExtraction(
            kind="constant",
            energy=energy,
            operator=hamiltonian_observable(np.diag([0.0, energy])),
            generator=None,
            reconstruction_residual=residual,
        )

    if law.integrand is not None:
        f = law.integrand
    else:
        delta = 1e-5

        def f(t: float) -> float:
            return (float(inc(t + delta, t0)) - float(inc(t - delta, t0))) / (2 * delta)

    def generator(t: float) -> float:
        return -h * f(t)

    residual = 0.0
    for t in pts[1:]:
        xi_rec, _ = quad(f, t0, t, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
        residual = max(
            residual, abs(cmath.exp(1j * xi_rec) - cmath.exp(1j * float(inc(t, t0))))
        )
    if residual > LAW_TOL:
        raise NumericalError(f"propagator reconstruction residual {residual!r}")
    return HamiltonianExtraction(
        kind="time-dependent",
        energy=None,
        operator=None,
        generator=generator,
        reconstruction_residual=residual,
    )


def classify_dynamics(
    law: PhaseLaw,
    grid: Sequence[float],
    *,
    contexts: Iterable[str] = (),
    h: float = 1.0,
    context: str | None = None,
    process: PrespaceProcess | None = None,
    tracked_contexts: Iterable[Context] = (),
    t0: float | None = None,
) -> DynamicsClassification:
    """Full classification of one law (plus optional prespace process).

    For a context-dependent law the single-law checks (cocycle, shift,
    continuity) run against the first context unless one is named.
    """
    lin = classify_linearity(law, contexts, grid)
    probe_context = context
    if probe_context is None and law.context_increments is not None:
        labels = list(contexts) or list(law.context_increments)
        probe_context = labels[0]
    det = classify_determinism(law, grid, probe_context)
    cont = classify_continuity(law, grid, probe_context)
    tsi = classify_time_shift_invariance(law, grid, probe_context)

    pre = (
        validate_preconditions(process, tracked_contexts, t0)
        if process is not None
        else None
    )
    flags = [lin.linear, det, cont, tsi]
    if pre is not None:
        flags.extend([pre.trig_preserved, pre.a_prob_conserved, pre.transition_conserved])
    schroedinger = all(f for f in flags if f is not None)

    energy = None
    generator = None
    if det and cont:
        try:
            ext = extract_hamiltonian(law, h, grid, probe_context)
        except (NoGeneratorError, NumericalError):
            ext = None
        if ext is not None:
            energy = ext.energy
            generator = ext.generator

    return DynamicsClassification(
        trig_preserved=pre.trig_preserved if pre else None,
        a_prob_conserved=pre.a_prob_conserved if pre else None,
        transition_conserved=pre.transition_conserved if pre else None,
        linear=lin.linear,
        deterministic=det,
        continuous=cont,
        time_shift_invariant=tsi,
        schroedinger=schroedinger,
        extracted_energy=energy,
        time_dependent_generator=generator,
        witness=lin.witness,
    )


@dataclass(frozen=True)
class EnergyProcess:
    """a-process relabeled onto energy levels (0, E)."""

    levels: tuple[float, float]
    process: PrespaceProcess

    def value(self, time_index: int, atom: str) -> float:
        return self.levels[self.process.a_variables[time_index].assignment[atom]]


@dataclass(frozen=True)
class EnergyReport:
    """Statistical conservation verdict plus individual-trajectory evidence."""

    energy_process: EnergyProcess
    statistically_conserved: bool
    max_distribution_deviation: float
    nonconstant_trajectories: int


def energy_process(
    process: PrespaceProcess,
    e_level: float,
    tracked_contexts: Iterable[Context] = (),
) -> EnergyReport:
    """Relabel a-levels to energies (0, E) and audit conservation.

    The distribution of the energy value is conserved per tracked context
    exactly when the a-distribution is; individual atoms may still hop
    between levels, and the count of atoms that do is reported.
    """
    e = float(e_level)
    ep = EnergyProcess(levels=(0.0, e), process=process)
    contexts = list(tracked_contexts)
    max_dev = 0.0
    for c in contexts:
        ref = [
            conditional_probability(process.space, process.a_variables[0].level_set(y), c)
            for y in (0, 1)
        ]
        for var in process.a_variables:
            for y in (0, 1):
                p = conditional_probability(process.space, var.level_set(y), c)
                max_dev = max(max_dev, abs(p - ref[y]))
    nonconstant = 0
    if e != 0.0:
        first = process.a_variables[0].assignment
        for atom in process.space.points:
            if any(var.assignment[atom] != first[atom] for var in process.a_variables):
                nonconstant += 1
    return EnergyReport(
        energy_process=ep,
        statistically_conserved=max_dev <= CONSERVATION_TOL,
        max_distribution_deviation=max_dev,
        nonconstant_trajectories=nonconstant,
    )


@dataclass(frozen=True)
class ApproximationReport:
    """How far a perturbed law sits from its reversible/linear base."""

    reversible_approx: bool
    linear_approx: bool
    epsilon_hat: float
    bound: float
    observed_deviation: float
    horizon: float


def approximation_analysis(
    law: PhaseLaw,
    h: float,
    horizon: float,
    t0: float = 0.0,
    grid_points: int = 33,
) -> ApproximationReport:
    """Bound the propagator deviation caused by the perturbation term.

    epsilon_hat is the sup of |epsilon * f1| on the horizon grid; the
    analytic bound epsilon_hat * T / h is reported next to the directly
    computed ||U_full - U_base|| at the horizon so the two can be compared.
    """
    if law.perturbation is None or law.base_law is None:
        raise InputValidationError("no perturbation decomposition available")
    if float(h) <= 0 or float(horizon) <= 0:
        raise InputValidationError("h and horizon must be positive")
    h = float(h)
    horizon = float(horizon)
    eps, f1 = law.perturbation
    grid = np.linspace(t0, t0 + horizon, grid_points)
    eps_hat = max(abs(eps * float(f1(t, s))) for t in grid for s in grid)
    bound = eps_hat * horizon / h
    ok = eps_hat * horizon < 0.01 * h
    u_full = cmath.exp(1j * float(law.increment(t0 + horizon, t0)))
    u_base = cmath.exp(1j * float(law.base_law.increment(t0 + horizon, t0)))
    return ApproximationReport(
        reversible_approx=ok,
        linear_approx=ok,
        epsilon_hat=eps_hat,
        bound=bound,
        observed_deviation=abs(u_full - u_base),
        horizon=horizon,
    )
