import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlrep import (
    Context,
    DichotomousVariable,
    InputValidationError,
    NoGeneratorError,
    ProbabilitySpace,
    approximation_analysis,
    build_conserving_process,
    classify_context,
    classify_continuity,
    classify_determinism,
    classify_dynamics,
    classify_linearity,
    classify_time_shift_invariance,
    cocycle_residual,
    constant_rate_law,
    context_law,
    energy_process,
    evolve,
    extract_hamiltonian,
    group_law_residual,
    increment_law,
    perturbed_law,
    phase_trajectory,
    propagator,
    rate_law,
    represent,
)
from test_hilbert import make_ds
from test_prespace import MOVE_A, MOVE_ATOMS, MOVE_B, MOVE_WEIGHTS, movable_setup

GRID = tuple(i * 0.05 for i in range(65))  # [0, 3.2]


def linear_family(E=1.0, h=1.0):
    k = -E / h
    return rate_law(lambda t: k * t, antiderivative=lambda t: k * t * t / 2.0)


class TestLaws:
    def test_constant_rate_increment(self):
        law = constant_rate_law(-2.0)
        assert abs(law.increment(3.0, 1.0) - (-4.0)) <= 1e-12

    def test_rate_law_quadrature_matches_antiderivative(self):
        f = lambda t: math.sin(1.3 * t)
        F = lambda t: -math.cos(1.3 * t) / 1.3
        by_quad = rate_law(f)
        closed = rate_law(f, antiderivative=F)
        for t0, t in ((0.0, 1.0), (0.5, 2.5), (2.0, 0.25)):
            assert abs(by_quad.increment(t, t0) - closed.increment(t, t0)) <= 1e-10

    def test_zero_self_increment_enforced(self):
        with pytest.raises(InputValidationError):
            increment_law(lambda t, t0: 1.0)

    def test_perturbed_law_decomposition(self):
        base = constant_rate_law(-1.0)
        law = perturbed_law(base, 0.1, lambda t, t0: 1.0 + 0.5 * math.sin(t0))
        assert law.base_law is base
        assert law.perturbation is not None
        want = base.increment(2.0, 0.5) + 0.1 * (1.0 + 0.5 * math.sin(0.5)) * 1.5
        assert abs(law.increment(2.0, 0.5) - want) <= 1e-10


class TestPropagator:
    def test_diagonal_and_unitary(self):
        law = constant_rate_law(-1.0)
        u = propagator(law, 0.0, 1.3).as_array()
        assert u[0, 1] == 0 and u[1, 0] == 0
        assert u[0, 0] == 1.0 + 0j
        assert abs(abs(u[1, 1]) - 1.0) <= 1e-12
        assert abs(u[1, 1] - np.exp(-1.3j)) <= 1e-12

    def test_context_law_requires_label(self):
        law = context_law({"u": constant_rate_law(1.0), "v": constant_rate_law(2.0)})
        with pytest.raises(InputValidationError):
            propagator(law, 0.0, 1.0)
        with pytest.raises(InputValidationError):
            propagator(law, 0.0, 1.0, context="w")
        u = propagator(law, 0.0, 1.0, context="v").as_array()
        assert abs(u[1, 1] - np.exp(2.0j)) <= 1e-12


class TestEvolve:
    def test_phase_shift_semantics(self):
        data = make_ds(random.Random(4))
        state = represent(data, classify_context(data))
        law = constant_rate_law(0.7)
        out = evolve(state, law, 0.0, 2.0)
        xi = 1.4
        assert abs(out.phases[0] - (state.phases[0] + xi)) <= 1e-12
        assert abs(out.phases[1] - (state.phases[1] + xi)) <= 1e-12
        assert out.source_data.p_a == data.p_a
        assert out.source_data.transition == data.transition
        for x in (0, 1):
            assert abs(abs(out.amplitude.components[x]) ** 2
                       - out.source_data.p_b[x]) <= 1e-12

    def test_requires_orthonormal_basis(self):
        from test_interference import CANON

        state = represent(CANON, classify_context(CANON))
        with pytest.raises(InputValidationError):
            evolve(state, constant_rate_law(1.0), 0.0, 1.0)

    def test_trajectory_increments_measured_from_start(self):
        data = make_ds(random.Random(6))
        state = represent(data, classify_context(data))
        law = linear_family()
        pts = (0.0, 0.5, 1.0, 1.5)
        traj = phase_trajectory(state, law, pts)
        assert [t for t, _, _ in traj] == list(pts)
        assert traj[0][1] == 0.0
        for t, xi, st_t in traj:
            assert abs(xi - law.increment(t, 0.0)) <= 1e-12
            assert abs(st_t.phases[0] - (state.phases[0] + xi)) <= 1e-12


class TestLinearity:
    def test_no_context_law_is_linear(self):
        chk = classify_linearity(constant_rate_law(1.0), (), GRID)
        assert chk.linear and bool(chk)
        assert chk.witness is None

    def test_equal_context_rates_stay_linear(self):
        law = context_law({"u": constant_rate_law(1.0), "v": constant_rate_law(1.0)})
        chk = classify_linearity(law, ("u", "v"), GRID)
        assert chk.linear

    def test_differing_context_rates_break_linearity(self):
        law = context_law({"u": constant_rate_law(-1.0), "v": constant_rate_law(-0.4)})
        chk = classify_linearity(law, ("u", "v"), GRID)
        assert not chk.linear and not bool(chk)
        assert chk.max_increment_gap > 1e-9
        w = chk.witness
        assert w is not None
        assert w.violation > 1e-6
        # the witness state really is normalized superposition material
        for phi in (w.phi1, w.phi2):
            assert abs(sum(abs(c) ** 2 for c in phi) - 1.0) <= 1e-12


class TestDeterminism:
    def test_closed_form_laws_pass(self):
        for law in (constant_rate_law(-1.0), linear_family()):
            assert classify_determinism(law, GRID)
            assert cocycle_residual(law, GRID) <= 1e-9

    def test_perturbed_law_fails(self):
        base = constant_rate_law(-1.0)
        law = perturbed_law(base, 0.1, lambda t, t0: 1.0 + 0.5 * math.sin(t0))
        assert not classify_determinism(law, GRID)
        assert cocycle_residual(law, GRID) > 1e-6

    def test_tiny_perturbation_passes(self):
        base = constant_rate_law(-1.0)
        law = perturbed_law(base, 1e-12, lambda t, t0: 1.0 + 0.5 * math.sin(t0))
        assert classify_determinism(law, GRID)


class TestTimeShiftAndContinuity:
    def test_constant_rate_is_invariant(self):
        assert classify_time_shift_invariance(constant_rate_law(2.0), GRID)

    def test_time_dependent_rate_is_not(self):
        assert not classify_time_shift_invariance(linear_family(), GRID)

    def test_smooth_laws_continuous(self):
        assert classify_continuity(constant_rate_law(-1.0), GRID)
        assert classify_continuity(linear_family(), GRID)

    def test_jump_law_discontinuous(self):
        step = lambda t: 1.0 if t >= 1.6 else 0.0
        jump = increment_law(lambda t, t0: step(t) - step(t0))
        assert not classify_continuity(jump, GRID)
        assert classify_determinism(jump, GRID)


class TestHamiltonianExtraction:
    def test_constant_generator(self):
        law = constant_rate_law(-1.0)
        ext = extract_hamiltonian(law, 1.0, GRID)
        assert ext.kind == "constant"
        assert abs(ext.energy - 1.0) <= 1e-9
        assert np.max(np.abs(ext.operator.as_array()
                             - np.diag([0.0, 1.0]))) <= 1e-9
        assert ext.reconstruction_residual <= 1e-9

    def test_energy_scales_with_h(self):
        law = constant_rate_law(-1.0)
        ext = extract_hamiltonian(law, 2.0, GRID)
        assert abs(ext.energy - 2.0) <= 1e-9

    def test_time_dependent_generator_pointwise(self):
        law = linear_family(E=1.0, h=1.0)
        ext = extract_hamiltonian(law, 1.0, GRID)
        assert ext.kind == "time-dependent"
        for t in (0.0, 0.4, 1.1, 2.7):
            assert abs(ext.generator(t) - t) <= 1e-9
        assert ext.reconstruction_residual <= 1e-9

    def test_non_deterministic_law_has_no_generator(self):
        law = perturbed_law(constant_rate_law(-1.0), 0.1,
                            lambda t, t0: 1.0 + 0.5 * math.sin(t0))
        with pytest.raises(NoGeneratorError):
            extract_hamiltonian(law, 1.0, GRID)


class TestClassifyDynamics:
    def test_schroedinger_regime(self):
        cls = classify_dynamics(constant_rate_law(-1.0), GRID, h=1.0)
        assert cls.linear and cls.deterministic
        assert cls.continuous and cls.time_shift_invariant
        assert cls.schroedinger
        assert abs(cls.extracted_energy - 1.0) <= 1e-9

    def test_time_dependent_regime(self):
        cls = classify_dynamics(linear_family(), GRID, h=1.0)
        assert cls.deterministic and not cls.time_shift_invariant
        assert not cls.schroedinger
        assert cls.extracted_energy is None
        assert abs(cls.time_dependent_generator(1.5) - 1.5) <= 1e-9

    def test_two_context_regime(self):
        law = context_law({"u": constant_rate_law(-1.0), "v": constant_rate_law(-0.4)})
        cls = classify_dynamics(law, GRID, contexts=("u", "v"), h=1.0)
        assert not cls.linear
        assert not cls.schroedinger
        assert cls.witness is not None and cls.witness.violation > 1e-6


class TestApproximation:
    def test_bound_and_flags(self):
        base = constant_rate_law(-1.0)
        law = perturbed_law(base, 0.1, lambda t, t0: 1.0 + 0.5 * math.sin(t0))
        rep = approximation_analysis(law, 1.0, horizon=3.0)
        assert not rep.reversible_approx and not rep.linear_approx
        assert abs(rep.epsilon_hat - 0.15) <= 1e-3
        assert abs(rep.bound - rep.epsilon_hat * 3.0) <= 1e-12
        assert rep.observed_deviation <= rep.bound
        assert rep.bound <= 2.0 * rep.observed_deviation

    def test_tiny_epsilon_flagged_as_good_approximation(self):
        base = constant_rate_law(-1.0)
        law = perturbed_law(base, 1e-12, lambda t, t0: 1.0 + 0.5 * math.sin(t0))
        rep = approximation_analysis(law, 1.0, horizon=3.0)
        assert rep.reversible_approx and rep.linear_approx
        assert rep.observed_deviation <= 1e-9

    def test_requires_perturbation_decomposition(self):
        with pytest.raises(InputValidationError):
            approximation_analysis(constant_rate_law(1.0), 1.0, horizon=3.0)


class TestProcessChecks:
    def test_preconditions_on_conserving_process(self):
        space, a, b, tracked = movable_setup()
        proc = build_conserving_process(space, a, tracked, steps=20, seed=7, b0=b)
        cls = classify_dynamics(
            constant_rate_law(-1.0), GRID, h=1.0,
            process=proc, tracked_contexts=tracked,
        )
        assert cls.a_prob_conserved
        assert cls.transition_conserved

    def test_energy_process_statistics(self):
        space, a, b, tracked = movable_setup()
        proc = build_conserving_process(space, a, tracked, steps=50, seed=7, b0=b)
        rep = energy_process(proc, 2.5, tracked)
        assert rep.statistically_conserved
        assert rep.max_distribution_deviation <= 1e-12
        assert rep.nonconstant_trajectories >= 1
        assert rep.energy_process.levels == (0.0, 2.5)
        changed = set()
        for i in range(1, len(proc.time_grid)):
            changed |= proc.changed_atoms(0, i)
        moved = next(iter(changed))
        values = {rep.energy_process.value(i, moved)
                  for i in range(len(proc.time_grid))}
        assert values == {0.0, 2.5}


@given(st.floats(min_value=-5.0, max_value=5.0, allow_nan=False))
@settings(max_examples=40, deadline=None)
def test_constant_rate_always_schroedinger_shaped(rate):
    law = constant_rate_law(rate)
    assert classify_determinism(law, GRID)
    assert classify_time_shift_invariance(law, GRID)
    assert classify_continuity(law, GRID)
    assert group_law_residual(law, GRID) <= 1e-10


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=30, deadline=None)
def test_propagator_unitarity_random_laws(seed):
    omega = random.Random(seed).uniform(0.5, 2.0)
    law = rate_law(lambda t: math.sin(omega * t))
    for t in (0.3, 1.1, 2.9):
        u = propagator(law, 0.0, t).as_array()
        assert abs(abs(u[1, 1]) ** 2 - 1.0) <= 1e-12
