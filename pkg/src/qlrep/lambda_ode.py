"""ODE views of the disturbance coefficient lambda(t) = cos(theta(t)).

Two independent integrators for cross-validation:

solve_theta integrates theta' = f(t) (regular everywhere) and composes with
cos. solve_eabb integrates the observable-level law

    lambda' = s * f(t) * sqrt(1 - lambda^2),   s in {+1, -1}

directly. That equation is singular at |lambda| = 1, where sqrt is
non-Lipschitz and the sign branch s must flip. Near the boundary the
integrator therefore switches to the pole-distance coordinate psi
(lambda = pole * cos(psi), psi' = f exactly), in which the turning point is
an ordinary zero crossing: psi is advanced by the integral of f, the branch
sign is read off the side of zero, and the distance-to-pole u = 1 - |lambda|
is carried as its own variable so no precision is lost to cancellation.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import InputValidationError, NumericalError

__all__ = [
    "LambdaTrajectory",
    "HarmonicFit",
    "solve_theta",
    "solve_eabb",
    "harmonic_residual",
    "schroedinger_detector",
]

THETA_INTEGRATION = "theta-integration"
DIRECT_EABB = "direct-EABB"

RANGE_TOL = 1e-9
DEFAULT_STEP = 1e-3
# Width of the boundary layer in u = 1 - |lambda|; inside it the psi
# coordinate is used, and within 4x of it RK4 steps shrink 4-fold.
LAYER_U = 5e-3
BOUNDARY_CONTACT = 1e-10
HARMONIC_REL_TOL = 1e-3
DEGENERATE_OMEGA = 1e-6


@dataclass(frozen=True)
class LambdaTrajectory:
    """Sampled lambda/theta path on a time grid."""

    grid: tuple[float, ...]
    lam: tuple[float, ...]
    theta: tuple[float, ...]
    method: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "grid", tuple(float(t) for t in self.grid))
        object.__setattr__(self, "lam", tuple(float(v) for v in self.lam))
        object.__setattr__(self, "theta", tuple(float(v) for v in self.theta))
        if self.method not in (THETA_INTEGRATION, DIRECT_EABB):
            raise InputValidationError(f"unknown method {self.method!r}")
        n = len(self.grid)
        if n < 1 or len(self.lam) != n or len(self.theta) != n:
            raise InputValidationError("grid, lam, theta must have equal nonzero length")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise InputValidationError("grid must be strictly increasing")
        worst = max(abs(v) for v in self.lam)
        if worst > 1.0 + RANGE_TOL:
            raise InputValidationError(f"lambda leaves [-1,1]: max |lambda| = {worst!r}")
        if self.method == THETA_INTEGRATION:
            gap = max(abs(math.cos(th) - lv) for th, lv in zip(self.theta, self.lam))
            if gap > RANGE_TOL:
                raise InputValidationError("cos(theta) does not match lambda")


def _simpson(f: Callable[[float], float], a: float, b: float) -> float:
    fa = float(f(a))
    fm = float(f(0.5 * (a + b)))
    fb = float(f(b))
    if not (math.isfinite(fa) and math.isfinite(fm) and math.isfinite(fb)):
        raise NumericalError(f"integrand returned a non-finite value on [{a}, {b}]")
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _check_grid(t0: float, grid: Sequence[float]) -> list[float]:
    pts = [float(t) for t in grid]
    if len(pts) < 1:
        raise InputValidationError("grid must be nonempty")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise InputValidationError("grid must be strictly increasing")
    if pts[0] < t0 - 1e-15:
        raise InputValidationError("grid must start at or after t0")
    return pts


def solve_theta(
    f: Callable[[float], float],
    theta0: float,
    t0: float,
    grid: Sequence[float],
    dt: float = DEFAULT_STEP,
) -> LambdaTrajectory:
    """Integrate theta' = f from (t0, theta0), then lambda = cos(theta).

    Composite Simpson with substeps no longer than dt; local error is
    O(substep^5), far below the 1e-10 per unit time budget for smooth f.
    """
    if dt <= 0:
        raise InputValidationError("dt must be positive")
    pts = _check_grid(float(t0), grid)
    theta = float(theta0)
    thetas = []
    prev = float(t0)
    for t in pts:
        if t > prev:
            n = max(1, math.ceil((t - prev) / dt))
            h = (t - prev) / n
            acc = [_simpson(f, prev + k * h, prev + (k + 1) * h) for k in range(n)]
            theta += math.fsum(acc)
        thetas.append(theta)
        prev = t
    lam = [math.cos(th) for th in thetas]
    return LambdaTrajectory(
        grid=tuple(pts), lam=tuple(lam), theta=tuple(thetas), method=THETA_INTEGRATION
    )


def _rho_from_u(u: float) -> float:
    """Invert u = rho^2/2 - rho^4/24 + rho^6/720 for small rho."""
    r2 = 2.0 * u
    for _ in range(2):
        r2 = 2.0 * u + r2 * r2 / 12.0 - r2 * r2 * r2 / 360.0
    return math.sqrt(max(r2, 0.0))


def _u_from_rho(rho: float) -> float:
    if rho > 0.3:
        return 1.0 - math.cos(rho)
    r2 = rho * rho
    return r2 / 2.0 - r2 * r2 / 24.0 + r2 * r2 * r2 / 720.0


class _EabbState:
    """Marching state: either interior (lam, s) or in-layer (pole, psi, s)."""

    __slots__ = ("lam", "s", "in_layer", "pole", "psi", "u")

    def __init__(self, lam: float, s: int):
        self.lam = lam
        self.s = s
        self.in_layer = False
        self.pole = 1
        self.psi = 0.0
        self.u = 0.0

    def current_u(self) -> float:
        return self.u if self.in_layer else 1.0 - abs(self.lam)

    def current_lam(self) -> float:
        return self.pole * (1.0 - self.u) if self.in_layer else self.lam

    def enter_layer(self) -> None:
        if self.in_layer:
            return
        self.pole = 1 if self.lam > 0 else -1
        self.u = 1.0 - abs(self.lam)
        rho = _rho_from_u(self.u)
        # pole +1: psi = -s*rho; pole -1: psi = +s*rho
        self.psi = -self.s * rho if self.pole > 0 else self.s * rho
        self.in_layer = True

    def exit_layer(self) -> None:
        if not self.in_layer:
            return
        self.lam = self.pole * (1.0 - self.u)
        self.in_layer = False

    def layer_step(self, f: Callable[[float], float], t: float, h: float) -> None:
        self.psi += _simpson(f, t, t + h)
        rho = abs(self.psi)
        if rho > BOUNDARY_CONTACT:
            if self.pole > 0:
                self.s = -1 if self.psi > 0 else 1
            else:
                self.s = 1 if self.psi > 0 else -1
        self.u = _u_from_rho(rho)
        if self.u > LAYER_U:
            self.exit_layer()

    def rk4_step(self, f: Callable[[float], float], t: float, h: float) -> None:
        s = float(self.s)

        def g(tt: float, lam: float) -> float:
            fv = float(f(tt))
            if not math.isfinite(fv):
                raise NumericalError(f"integrand returned a non-finite value at t={tt}")
            return s * fv * math.sqrt(max(0.0, 1.0 - lam * lam))

        y = self.lam
        k1 = g(t, y)
        k2 = g(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = g(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = g(t + h, y + h * k3)
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if abs(y) > 1.0 + RANGE_TOL:
            raise NumericalError(f"integration step left [-1,1]: lambda = {y!r}")
        self.lam = min(1.0, max(-1.0, y))


def solve_eabb(
    f: Callable[[float], float],
    lambda0: float,
    sign_init: int,
    t0: float,
    grid: Sequence[float],
    dt: float = DEFAULT_STEP,
) -> LambdaTrajectory:
    """Integrate lambda' = s f(t) sqrt(1 - lambda^2) with turning points.

    sign_init picks the branch at t0; at each boundary contact the branch
    flips automatically (handled exactly by the zero crossing of the
    pole-distance coordinate). Must agree with solve_theta started from any
    theta0 with cos(theta0) = lambda0 and matching branch.
    """
    lam0 = float(lambda0)
    if abs(lam0) > 1.0:
        raise InputValidationError("hyperbolic initial data: |lambda0| > 1")
    if sign_init not in (1, -1):
        raise InputValidationError("sign_init must be +1 or -1")
    if dt <= 0:
        raise InputValidationError("dt must be positive")
    pts = _check_grid(float(t0), grid)
    state = _EabbState(lam0, int(sign_init))
    if state.current_u() <= LAYER_U:
        state.enter_layer()

    lams: list[float] = []
    signs: list[int] = []
    prev = float(t0)
    for target in pts:
        while prev < target - 1e-15:
            u_now = state.current_u()
            if u_now <= LAYER_U:
                state.enter_layer()
                h = min(dt, target - prev)
                state.layer_step(f, prev, h)
                prev += h
            elif u_now <= 4.0 * LAYER_U:
                state.exit_layer()
                h = min(dt / 4.0, target - prev)
                state.rk4_step(f, prev, h)
                prev += h
            else:
                state.exit_layer()
                h = min(dt, target - prev)
                state.rk4_step(f, prev, h)
                prev += h
        lams.append(state.current_lam())
        signs.append(state.s)
        prev = target

    thetas: list[float] = []
    two_pi = 2.0 * math.pi
    for i, (lv, sv) in enumerate(zip(lams, signs)):
        principal = math.atan2(-sv * math.sqrt(max(0.0, 1.0 - lv * lv)), lv)
        if i == 0:
            thetas.append(principal)
        else:
            k = round((thetas[-1] - principal) / two_pi)
            thetas.append(principal + two_pi * k)
    return LambdaTrajectory(
        grid=tuple(pts), lam=tuple(lams), theta=tuple(thetas), method=DIRECT_EABB
    )


def _uniform_dt(grid: Sequence[float]) -> float:
    d = np.diff(np.asarray(grid, dtype=float))
    if d.size < 2:
        raise InputValidationError("need at least 3 grid points")
    dt = float(np.mean(d))
    if np.max(np.abs(d - dt)) > 1e-9 * max(abs(dt), 1e-300):
        raise InputValidationError("grid is not uniform")
    return dt


def harmonic_residual(traj: LambdaTrajectory, omega: float) -> float:
    """max over interior points of |lambda'' + omega^2 lambda| (central diff)."""
    dt = _uniform_dt(traj.grid)
    lam = np.asarray(traj.lam)
    d2 = (lam[2:] - 2.0 * lam[1:-1] + lam[:-2]) / (dt * dt)
    return float(np.max(np.abs(d2 + float(omega) ** 2 * lam[1:-1])))


@dataclass(frozen=True)
class HarmonicFit:
    """Least-squares harmonic diagnosis of a lambda trajectory."""

    is_harmonic: bool
    fitted_omega: float
    residual: float
    degenerate: bool

    def energy(self, h: float = 1.0) -> float:
        return float(h) * self.fitted_omega


def schroedinger_detector(traj: LambdaTrajectory) -> HarmonicFit:
    """Fit omega^2 in lambda'' = -omega^2 lambda and judge harmonicity.

    is_harmonic iff the post-fit residual is at most 1e-3 of the trajectory's
    amplitude. fitted_omega ~ 0 with a clean fit marks the degenerate
    (constant-lambda) case.
    """
    if len(traj.grid) < 16:
        raise InputValidationError("need at least 16 grid points")
    dt = _uniform_dt(traj.grid)
    lam = np.asarray(traj.lam)
    interior = lam[1:-1]
    d2 = (lam[2:] - 2.0 * interior + lam[:-2]) / (dt * dt)
    denom = float(np.dot(interior, interior))
    if denom <= 0.0:
        raise NumericalError("indeterminate frequency: lambda is identically zero")
    omega_sq = -float(np.dot(d2, interior)) / denom
    residual = float(np.max(np.abs(d2 + omega_sq * interior)))
    amplitude = float(np.max(np.abs(lam)))
    fitted = math.sqrt(omega_sq) if omega_sq > 0.0 else 0.0
    return HarmonicFit(
        is_harmonic=residual <= HARMONIC_REL_TOL * amplitude,
        fitted_omega=fitted,
        residual=residual,
        degenerate=fitted < DEGENERATE_OMEGA,
    )
