import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from qlrep import (
    Amplitude,
    BornRuleUnavailableError,
    ContextualData,
    InputValidationError,
    NotRepresentableError,
    born_probability,
    classify_context,
    energy_observable,
    expectation,
    is_double_stochastic,
    operator_in_b_frame,
    phase_constraint_check,
    position_observable,
    represent,
    theorem_check,
)
from test_interference import CANON, make_trig

# frozen amplitude of the 8-atom reference instance (independent enumeration)
CANON_PHI = (
    0.3995818257730903 + 0.5407302090991326j,
    0.44901893700911477 + 0.5884957091488915j,
)


def make_ds(rng: random.Random, margin: float = 0.05):
    """Double-stochastic trigonometric instance away from the lambda boundary."""
    while True:
        q = rng.uniform(0.1, 0.9)
        p_a = (0.5, 0.5)
        transition = ((q, 1.0 - q), (1.0 - q, q))
        theta1 = rng.uniform(0.2, math.pi - 0.2)
        lam1 = math.cos(theta1)
        if 1.0 - abs(lam1) < margin:
            continue
        root = math.sqrt((p_a[0] * transition[0][0]) * (p_a[1] * transition[1][0]))
        p_b = (0.5 + 2.0 * lam1 * root, 0.5 - 2.0 * lam1 * root)
        if min(p_b) <= 1e-3:
            continue
        return ContextualData(p_a=p_a, p_b=p_b, transition=transition)


def make_non_ds(rng: random.Random, margin: float = 0.05):
    """Trigonometric instance whose column sums miss 1 by at least `margin`."""
    while True:
        data = make_trig(rng)
        col0 = data.transition[0][0] + data.transition[1][0]
        if abs(col0 - 1.0) >= margin:
            return data


class TestAmplitude:
    def test_requires_unit_norm(self):
        with pytest.raises(InputValidationError):
            Amplitude(components=(1.0 + 0j, 1.0 + 0j))

    def test_accepts_unit_vector(self):
        amp = Amplitude(components=(1 / math.sqrt(2) + 0j, 1j / math.sqrt(2)))
        assert abs(amp.norm_squared - 1.0) <= 1e-10


class TestDoubleStochastic:
    def test_symmetric_matrix_qualifies(self):
        assert is_double_stochastic(((0.3, 0.7), (0.7, 0.3)))

    def test_generic_matrix_does_not(self):
        assert not is_double_stochastic(((0.6, 0.4), (0.25, 0.75)))

    def test_rejects_non_row_stochastic(self):
        with pytest.raises(InputValidationError):
            is_double_stochastic(((0.6, 0.6), (0.25, 0.75)))


class TestRepresent:
    def test_canonical_amplitude_matches_enumeration(self):
        rep = classify_context(CANON)
        state = represent(CANON, rep)
        for got, want in zip(state.amplitude.components, CANON_PHI):
            assert abs(got - want) <= 1e-12

    def test_born_b_exact_on_canonical(self):
        rep = classify_context(CANON)
        state = represent(CANON, rep)
        for x in (0, 1):
            assert abs(born_probability(state, "b", x) - CANON.p_b[x]) <= 1e-12

    def test_non_trig_rejected(self):
        data = ContextualData(p_a=(0.5, 0.5), p_b=(0.001, 0.999),
                              transition=((0.9, 0.1), (0.8, 0.2)))
        rep = classify_context(data)
        with pytest.raises(NotRepresentableError):
            represent(data, rep)

    def test_generic_transition_yields_no_born_a(self):
        rep = classify_context(CANON)
        state = represent(CANON, rep)
        assert not state.basis.orthonormal
        with pytest.raises(BornRuleUnavailableError):
            born_probability(state, "a", 0)

    def test_double_stochastic_gets_born_a(self):
        data = make_ds(random.Random(5))
        rep = classify_context(data)
        state = represent(data, rep)
        assert state.basis.orthonormal
        for y in (0, 1):
            assert abs(born_probability(state, "a", y) - data.p_a[y]) <= 1e-10
        assert phase_constraint_check(state.phases)

    def test_boundary_instance_represents_within_loose_tolerance(self):
        half = 0.4330127018922193
        data = ContextualData(
            p_a=(0.5, 0.5),
            p_b=(0.5 + half, 0.5 - half),
            transition=((0.75, 0.25), (0.25, 0.75)),
        )
        rep = classify_context(data)
        state = represent(data, rep)
        assert state.boundary
        for x in (0, 1):
            assert abs(born_probability(state, "b", x) - data.p_b[x]) <= 5e-9


class TestTheorem:
    def test_ds_instance_satisfies_both_sides(self):
        chk = theorem_check(make_ds(random.Random(2)), classify_context(make_ds(random.Random(2))))
        assert chk.double_stochastic
        assert chk.both_born_rules_hold
        assert chk.agree

    def test_non_ds_instance_fails_both_sides(self):
        data = make_non_ds(random.Random(3))
        chk = theorem_check(data, classify_context(data))
        assert not chk.double_stochastic
        assert not chk.both_born_rules_hold
        assert chk.agree


class TestExpectation:
    def test_b_observable_matches_oracle(self):
        rep = classify_context(CANON)
        state = represent(CANON, rep)
        op = position_observable((-1.0, 2.5))
        want = oracles.expectation_b((-1.0, 2.5), CANON.p_b)
        assert abs(expectation(state, op) - want) <= 1e-12

    def test_a_observable_matches_mixture_when_orthonormal(self):
        data = make_ds(random.Random(8))
        state = represent(data, classify_context(data))
        op = energy_observable((0.0, 2.0))
        want = 0.0 * data.p_a[0] + 2.0 * data.p_a[1]
        assert abs(expectation(state, op) - want) <= 1e-9

    def test_a_observable_unavailable_without_orthonormality(self):
        state = represent(CANON, classify_context(CANON))
        with pytest.raises(BornRuleUnavailableError):
            expectation(state, energy_observable((0.0, 1.0)))

    def test_frame_change_preserves_expectation(self):
        data = make_ds(random.Random(13))
        state = represent(data, classify_context(data))
        op_a = energy_observable((0.5, 1.5))
        op_b = operator_in_b_frame(op_a, state.basis)
        assert op_b.frame == "b"
        assert abs(expectation(state, op_a) - expectation(state, op_b)) <= 1e-9


@given(st.integers(min_value=0, max_value=100_000))
@settings(max_examples=200, deadline=None)
def test_born_b_exact_random_trig(seed):
    data = make_trig(random.Random(seed))
    rep = classify_context(data)
    state = represent(data, rep)
    oracle_phi = oracles.amplitude(data.p_a, data.transition, state.phases)
    for x in (0, 1):
        assert abs(born_probability(state, "b", x) - data.p_b[x]) <= 1e-12
        assert abs(state.amplitude.components[x] - oracle_phi[x]) <= 1e-12


@given(st.integers(min_value=0, max_value=100_000))
@settings(max_examples=120, deadline=None)
def test_theorem_equivalence_margin_separated(seed):
    rng = random.Random(seed)
    data = make_ds(rng) if seed % 2 == 0 else make_non_ds(rng)
    chk = theorem_check(data, classify_context(data))
    assert chk.agree
    assert chk.double_stochastic == (seed % 2 == 0)


@given(st.integers(min_value=0, max_value=100_000))
@settings(max_examples=100, deadline=None)
def test_global_phase_invariance_of_born(seed):
    rng = random.Random(seed)
    data = make_trig(rng)
    state = represent(data, classify_context(data))
    shift = cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
    rotated = Amplitude(components=tuple(shift * c for c in state.amplitude.components))
    for x in (0, 1):
        assert abs(abs(rotated.components[x]) ** 2 - data.p_b[x]) <= 1e-12
