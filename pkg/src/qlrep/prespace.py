"""Finite probability spaces, dichotomous variables, contexts, and processes.

Everything is finite and explicit: a space is an ordered list of atoms with
float weights, events and contexts are atom subsets, and probabilities are
computed by exact summation (math.fsum) so that permuting atoms of equal
weight never changes a set's probability, not even in the last bit.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateContextError, IncompatibilityError, InputValidationError
from .interference import ContextualData

__all__ = [
    "ProbabilitySpace",
    "DichotomousVariable",
    "Context",
    "PrespaceProcess",
    "conditional_probability",
    "classical_total_probability",
    "is_nondegenerate",
    "are_incompatible",
    "contextual_data",
    "build_conserving_process",
    "sample_atoms",
    "conserves_all_contexts",
]

WEIGHT_TOL = 1e-12
# A context (or cell) with probability at or below this is degenerate.
DEGENERACY_THRESHOLD = 1e-12
EXHAUSTIVE_ATOM_LIMIT = 20


@dataclass(frozen=True)
class ProbabilitySpace:
    """Finite sample space: ordered atom identifiers with normalized weights."""

    points: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(str(p) for p in self.points))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.points) < 2:
            raise InputValidationError("a probability space needs at least 2 atoms")
        if len(self.points) != len(self.weights):
            raise InputValidationError("points and weights differ in length")
        if len(set(self.points)) != len(self.points):
            raise InputValidationError("atom identifiers must be unique")
        for w in self.weights:
            if not math.isfinite(w) or w < 0.0:
                raise InputValidationError(f"weight {w!r} is not a nonnegative real")
        if abs(math.fsum(self.weights) - 1.0) > WEIGHT_TOL:
            raise InputValidationError("weights do not sum to 1")

    @cached_property
    def _index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    def weight(self, atom: str) -> float:
        return self.weights[self._index[atom]]

    def prob(self, atoms: Iterable[str]) -> float:
        """Exact probability of an atom set (fsum, order-independent)."""
        idx = self._index
        seen = set()
        terms = []
        for a in atoms:
            if a not in idx:
                raise InputValidationError(f"unknown atom {a!r}")
            if a in seen:
                continue
            seen.add(a)
            terms.append(self.weights[idx[a]])
        return math.fsum(terms)

    @property
    def all_atoms(self) -> frozenset[str]:
        return frozenset(self.points)


@dataclass(frozen=True)
class DichotomousVariable:
    """Two-valued random variable: atom -> value index in {0, 1}.

    values holds the actual pair of real numbers taken; assignment maps every
    atom of the intended space to 0 or 1.
    """

    name: str
    values: tuple[float, float]
    assignment: Mapping[str, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", (float(self.values[0]), float(self.values[1])))
        object.__setattr__(self, "assignment", dict(self.assignment))
        if self.values[0] == self.values[1]:
            raise InputValidationError(f"variable {self.name!r}: values must be distinct")
        for atom, v in self.assignment.items():
            if v not in (0, 1):
                raise InputValidationError(
                    f"variable {self.name!r}: atom {atom!r} assigned {v!r}, expected 0 or 1"
                )

    def level_set(self, value_index: int) -> frozenset[str]:
        return frozenset(a for a, v in self.assignment.items() if v == value_index)

    def defined_on(self, space: ProbabilitySpace) -> bool:
        return all(p in self.assignment for p in space.points)


@dataclass(frozen=True)
class Context:
    """A positive-probability atom subset; probabilities are conditioned on it."""

    label: str
    atoms: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", frozenset(self.atoms))
        if not self.atoms:
            raise InputValidationError(f"context {self.label!r} has no atoms")


@dataclass(frozen=True)
class PrespaceProcess:
    """Time-indexed pair of dichotomous variables on a fixed space.

    b_variables may be None when only the a-track is under study. Value pairs
    must not change over time; only the assignments may.
    """

    space: ProbabilitySpace
    time_grid: tuple[float, ...]
    a_variables: tuple[DichotomousVariable, ...]
    b_variables: tuple[DichotomousVariable, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "time_grid", tuple(float(t) for t in self.time_grid))
        object.__setattr__(self, "a_variables", tuple(self.a_variables))
        if self.b_variables is not None:
            object.__setattr__(self, "b_variables", tuple(self.b_variables))
        n = len(self.time_grid)
        if n == 0:
            raise InputValidationError("process needs at least one time point")
        if list(self.time_grid) != sorted(self.time_grid):
            raise InputValidationError("time grid must be increasing")
        if len(self.a_variables) != n:
            raise InputValidationError("one a-variable required per time point")
        if self.b_variables is not None and len(self.b_variables) != n:
            raise InputValidationError("one b-variable required per time point")
        tracks = [self.a_variables] + ([self.b_variables] if self.b_variables else [])
        for track in tracks:
            first = track[0].values
            for var in track:
                if var.values != first:
                    raise InputValidationError("value pair changed along the process")
                if not var.defined_on(self.space):
                    raise InputValidationError(
                        f"variable {var.name!r} is not total on the process space"
                    )

    def changed_atoms(self, i: int, j: int) -> frozenset[str]:
        """Atoms whose a-value differs between time indices i and j."""
        ai, aj = self.a_variables[i].assignment, self.a_variables[j].assignment
        return frozenset(p for p in self.space.points if ai[p] != aj[p])


def _context_prob(space: ProbabilitySpace, context: Context) -> float:
    p = space.prob(context.atoms)
    if p <= DEGENERACY_THRESHOLD:
        raise DegenerateContextError(f"degenerate context {context.label!r}: probability {p!r}")
    return p


def conditional_probability(
    space: ProbabilitySpace, event: Iterable[str], context: Context
) -> float:
    """P(event | context) by the ratio of exact set probabilities."""
    pc = _context_prob(space, context)
    ev = frozenset(event)
    return space.prob(ev & context.atoms) / pc


def is_nondegenerate(space: ProbabilitySpace, a: DichotomousVariable, context: Context) -> bool:
    """True iff both a-level sets intersect the context with positive probability."""
    for y in (0, 1):
        if space.prob(a.level_set(y) & context.atoms) <= DEGENERACY_THRESHOLD:
            return False
    return True


def are_incompatible(
    space: ProbabilitySpace, a: DichotomousVariable, b: DichotomousVariable
) -> bool:
    """True iff all four joint level-set cells carry positive probability."""
    for y in (0, 1):
        ay = a.level_set(y)
        for x in (0, 1):
            if space.prob(b.level_set(x) & ay) <= DEGENERACY_THRESHOLD:
                return False
    return True


def classical_total_probability(
    space: ProbabilitySpace,
    a: DichotomousVariable,
    b: DichotomousVariable,
    context: Context,
    x: int,
) -> float:
    """sum_y P(a=y | C) * P(b=x | a=y, C), inner conditioning on A_y intersect C.

    On a common probability space this is an identity with P(b=x | C); the
    interference correction below measures deviations when the data do not
    come from one fixed space.
    """
    if x not in (0, 1):
        raise InputValidationError(f"value index must be 0 or 1, got {x!r}")
    _context_prob(space, context)
    if not is_nondegenerate(space, a, context):
        raise DegenerateContextError(
            f"context {context.label!r} is degenerate with respect to {a.name!r}"
        )
    bx = b.level_set(x)
    total = 0.0
    terms = []
    for y in (0, 1):
        ay_c = a.level_set(y) & context.atoms
        p_y = conditional_probability(space, a.level_set(y), context)
        p_x_given_yc = space.prob(bx & ay_c) / space.prob(ay_c)
        terms.append(p_y * p_x_given_yc)
    total = math.fsum(terms)
    return total


def contextual_data(
    space: ProbabilitySpace,
    a: DichotomousVariable,
    b: DichotomousVariable,
    context: Context,
) -> ContextualData:
    """Assemble the nine context-conditional probabilities for one context.

    Transition probabilities are conditioned on the bare a-level sets, not on
    their intersection with the context.
    """
    if not a.defined_on(space) or not b.defined_on(space):
        raise InputValidationError("variables must be total on the space")
    if not is_nondegenerate(space, a, context):
        raise DegenerateContextError(
            f"context {context.label!r} is degenerate with respect to {a.name!r}"
        )
    if not are_incompatible(space, a, b):
        raise IncompatibilityError(f"variables {a.name!r}, {b.name!r} are not incompatible")
    p_a = tuple(conditional_probability(space, a.level_set(y), context) for y in (0, 1))
    p_b = tuple(conditional_probability(space, b.level_set(x), context) for x in (0, 1))
    transition = []
    for y in (0, 1):
        ay = a.level_set(y)
        pay = space.prob(ay)
        transition.append(tuple(space.prob(b.level_set(x) & ay) / pay for x in (0, 1)))
    return ContextualData(p_a=p_a, p_b=p_b, transition=tuple(transition))


def _refinement_classes(
    space: ProbabilitySpace,
    tracked_contexts: Iterable[Context],
) -> list[list[int]]:
    """Atom-index groups that a conserving permutation may mix.

    Atoms belong to the same group iff they share (membership signature over
    the tracked contexts, exact weight). Permuting inside a group moves atoms
    across variable level sets without changing any tracked conditional
    distribution: conditional probabilities are sums over fixed-weight
    multisets, and fsum is order-independent.
    """
    contexts = list(tracked_contexts)
    groups: dict[tuple, list[int]] = {}
    for i, atom in enumerate(space.points):
        sig = tuple(atom in c.atoms for c in contexts) + (space.weights[i],)
        groups.setdefault(sig, []).append(i)
    return [g for g in groups.values() if len(g) >= 2]


def build_conserving_process(
    space: ProbabilitySpace,
    a0: DichotomousVariable,
    tracked_contexts: Iterable[Context],
    steps: int,
    seed: int,
    b0: DichotomousVariable | None = None,
) -> PrespaceProcess:
    """Random-walk process whose tracked conditional a-distributions are frozen.

    Each step applies a seeded random permutation acting inside the refinement
    classes above, then relabels: a_{k+1}(atom) = a_k(permuted atom). Tracked
    P(a(t)=y | C) are conserved exactly while individual trajectories change.
    When b0 is supplied it is carried along unchanged (its level sets are
    fixed sets), which keeps the transition matrix constant whenever the
    tracked contexts include the b-level sets.
    """
    contexts = list(tracked_contexts)
    if steps < 0:
        raise InputValidationError("steps must be nonnegative")
    if not a0.defined_on(space):
        raise InputValidationError("a0 must be total on the space")
    for c in contexts:
        if not is_nondegenerate(space, a0, c):
            raise DegenerateContextError(
                f"tracked context {c.label!r} is degenerate with respect to {a0.name!r}"
            )
    classes = _refinement_classes(space, contexts)
    if not classes:
        warnings.warn("process is frozen: no nontrivial conserving permutation exists")
    rng = np.random.default_rng(seed)
    n = len(space.points)
    a_vars = [a0]
    current = [a0.assignment[p] for p in space.points]
    for k in range(steps):
        perm = np.arange(n)
        for group in classes:
            perm[np.asarray(group)] = rng.permutation(np.asarray(group))
        nxt = [current[perm[i]] for i in range(n)]
        current = nxt
        a_vars.append(
            DichotomousVariable(
                name=f"{a0.name}@{k + 1}",
                values=a0.values,
                assignment={p: current[i] for i, p in enumerate(space.points)},
            )
        )
    b_vars = None if b0 is None else tuple([b0] * (steps + 1))
    return PrespaceProcess(
        space=space,
        time_grid=tuple(float(k) for k in range(steps + 1)),
        a_variables=tuple(a_vars),
        b_variables=b_vars,
    )


def sample_atoms(space: ProbabilitySpace, n: int, seed: int) -> tuple[str, ...]:
    """n seeded i.i.d. atom draws by weight."""
    if n < 1:
        raise InputValidationError("sample size must be positive")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(space.points), size=n, p=np.asarray(space.weights))
    return tuple(space.points[i] for i in idx)


def conserves_all_contexts(process: PrespaceProcess, atol: float = 1e-12) -> bool:
    """Exhaustive check of distribution conservation over every context.

    Enumerates all 2^n - 1 nonempty atom subsets (n <= 20) and verifies that
    P(a(t)=a_1 and C) never drifts from its initial value; the complementary
    level set then follows. Subsets at or below the degeneracy threshold are
    skipped.
    """
    n = len(process.space.points)
    if n > EXHAUSTIVE_ATOM_LIMIT:
        raise InputValidationError(
            f"exhaustive context check limited to {EXHAUSTIVE_ATOM_LIMIT} atoms, got {n}"
        )
    w = np.asarray(process.space.weights)

    def subset_sums(values: np.ndarray) -> np.ndarray:
        sums = np.zeros(1)
        for v in values:
            sums = np.concatenate([sums, sums + v])
        return sums

    mass = subset_sums(w)
    valid = mass > DEGENERACY_THRESHOLD
    baseline = None
    for var in process.a_variables:
        ind = np.asarray([1.0 if var.assignment[p] == 0 else 0.0 for p in process.space.points])
        cell = subset_sums(w * ind)
        if baseline is None:
            baseline = cell
            continue
        if np.max(np.abs(cell[valid] - baseline[valid])) > atol:
            return False
    return True
