# Evolves a symmetric doubly stochastic state under a constant phase rate
# over one full period and checks the closed-form picture: the interference
# coefficient follows a pure cosine, the harmonic detector recovers the
# angular frequency, and the extracted generator is diag(0, E) with
# E = -h * rate.

import math

from qlrep import (
    ContextualData,
    LambdaTrajectory,
    classify_context,
    classify_dynamics,
    constant_rate_law,
    extract_hamiltonian,
    harmonic_residual,
    phase_trajectory,
    represent,
    schroedinger_detector,
)

H = 1.0
RATE = -1.0
THETA0 = math.pi / 3


def symmetric_data(theta0):
    # interference shift for p_a = (1/2, 1/2): p_b(0) = 1/2 + lam * sqrt(t00 t10)
    t = ((0.75, 0.25), (0.25, 0.75))
    lam = math.cos(theta0)
    shift = lam * math.sqrt(t[0][0] * t[1][0])
    p_b = (0.5 + shift, 0.5 - shift)
    return ContextualData(p_a=(0.5, 0.5), p_b=p_b, transition=t)


def run():
    data = symmetric_data(THETA0)
    state = represent(data, classify_context(data))
    grid = [i * 1e-3 for i in range(6284)]

    lam_path = []
    theta_path = []
    worst_cosine = 0.0
    for t, _, st in phase_trajectory(state, constant_rate_law(RATE), grid):
        theta = st.phases[0]
        lam = math.cos(theta)
        worst_cosine = max(worst_cosine, abs(lam - math.cos(THETA0 + RATE * t)))
        theta_path.append(theta)
        lam_path.append(lam)

    traj = LambdaTrajectory(
        grid=tuple(grid), lam=tuple(lam_path), theta=tuple(theta_path),
        method="theta-integration",
    )
    fit = schroedinger_detector(traj)
    cls = classify_dynamics(constant_rate_law(RATE), grid, h=H)
    ext = extract_hamiltonian(constant_rate_law(RATE), H, grid)
    return worst_cosine, fit, cls, ext, traj


if __name__ == "__main__":
    worst_cosine, fit, cls, ext, traj = run()
    print(f"closed-form cosine deviation: {worst_cosine:.3e}")
    print(f"harmonic: {fit.is_harmonic}, fitted omega = {fit.fitted_omega:.12f}")
    print(f"residual at omega=1: {harmonic_residual(traj, 1.0):.3e}")
    print(f"laws: linear={cls.linear} deterministic={cls.deterministic} "
          f"continuous={cls.continuous} tsi={cls.time_shift_invariant}")
    print(f"harmonic regime: {cls.schroedinger}")
    print(f"extracted energy: {ext.energy}")
    print(f"operator rows: {ext.operator.matrix[0]} / {ext.operator.matrix[1]}")
