# Linear ramp f(t) = -t. The accumulated phase has the closed form
# xi(t, t0) = -(t^2 - t0^2)/2, so propagators still compose along
# intervals (the flow is deterministic) but time-shift invariance fails
# and the extracted generator is time dependent, E(t) = t at h = 1.

import math

from qlrep import (
    classify_determinism,
    classify_time_shift_invariance,
    extract_hamiltonian,
    propagator,
    rate_law,
)

H = 1.0


def ramp():
    return rate_law(lambda t: -t, antiderivative=lambda t: -0.5 * t * t)


def closed_form_check(law, grid):
    worst = 0.0
    for t in grid:
        xi = propagator(law, grid[0], t).xi
        worst = max(worst, abs(xi - (-(t * t - grid[0] ** 2) / 2.0)))
    return worst


def composition_check(law, pairs):
    worst = 0.0
    for t0, t1, t2 in pairs:
        u01 = propagator(law, t0, t1).as_array()
        u12 = propagator(law, t1, t2).as_array()
        u02 = propagator(law, t0, t2).as_array()
        worst = max(worst, float(abs((u12 @ u01 - u02)[1, 1])))
    return worst


if __name__ == "__main__":
    law = ramp()
    grid = [i * 1e-3 for i in range(4001)]

    print(f"closed-form xi deviation: {closed_form_check(law, grid):.3e}")
    pairs = [(0.0, 0.7, 1.9), (0.3, 1.1, 3.4), (1.0, 2.0, 4.0)]
    print(f"propagator composition residual: {composition_check(law, pairs):.3e}")
    print(f"deterministic: {classify_determinism(law, grid)}")
    print(f"time-shift invariant: {classify_time_shift_invariance(law, grid)}")

    ext = extract_hamiltonian(law, H, grid)
    print(f"extraction kind: {ext.kind}")
    worst = max(abs(ext.generator(t) - t) for t in (0.5, 1.0, 2.5, 3.75))
    print(f"generator vs E(t) = t: {worst:.3e}")
