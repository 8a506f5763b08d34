"""Equilibrium marching in S, tip-load shooting and the rigid-body oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .material import RigidityTensors
from .so3 import E3, cross
from .state import ConfigurationError, Grid

SHOOT_TOL = 1e-10
SHOOT_MAX_ITER = 50
SHOOT_FD_STEP = 1e-6
RIGID_DT_FRACTION = 1e-5


def _static_rates(N, M, m):
    eps = N / m.G
    kappa = M / m.H
    return -cross(kappa, N), -cross(kappa, M) - cross(eps + E3, N)


def static_ivp(eps0, kappa0, m: RigidityTensors, grid: Grid):
    """Strain and curvature profiles of an unloaded span from root values.

    Marches ``N' = -kappa x N``, ``M' = -kappa x M - (eps + e3) x N`` with
    classical RK4 at the grid spacing and returns ``(eps, kappa)``, each (n, 3).
    """
    N = m.G * np.asarray(eps0, dtype=float)
    M = m.H * np.asarray(kappa0, dtype=float)
    h = grid.ds
    Ns = np.empty((grid.n_nodes, 3))
    Ms = np.empty((grid.n_nodes, 3))
    Ns[0], Ms[0] = N, M
    for j in range(grid.n_nodes - 1):
        a1, b1 = _static_rates(N, M, m)
        a2, b2 = _static_rates(N + 0.5 * h * a1, M + 0.5 * h * b1, m)
        a3, b3 = _static_rates(N + 0.5 * h * a2, M + 0.5 * h * b2, m)
        a4, b4 = _static_rates(N + h * a3, M + h * b3, m)
        N = N + h * (a1 + 2 * a2 + 2 * a3 + a4) / 6.0
        M = M + h * (b1 + 2 * b2 + 2 * b3 + b4) / 6.0
        Ns[j + 1], Ms[j + 1] = N, M
    return Ns / m.G, Ms / m.H


@dataclass(frozen=True)
class StaticBVPSpec:
    """Root strains are the unknowns; the tip section force and moment are the targets.

    That is three plus three scalar conditions for the six root unknowns.
    """

    tip_N: tuple = (0.0, 0.0, 0.0)
    tip_M: tuple = (0.0, 0.0, 0.0)
    guess_eps0: tuple = (0.0, 0.0, 0.0)
    guess_kappa0: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        for name in ("tip_N", "tip_M", "guess_eps0", "guess_kappa0"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,) or not np.all(np.isfinite(v)):
                raise ConfigurationError(f"{name} must be three finite reals, got {getattr(self, name)!r}")
            object.__setattr__(self, name, tuple(float(x) for x in v))

    @property
    def target(self):
        return np.concatenate([self.tip_N, self.tip_M])


@dataclass
class ShootResult:
    eps0: np.ndarray
    kappa0: np.ndarray
    eps: np.ndarray
    kappa: np.ndarray
    residual: float
    iterations: int
    converged: bool


def _tip_residual(x, spec, m, grid):
    eps, kappa = static_ivp(x[:3], x[3:], m, grid)
    tip = np.concatenate([m.G * eps[-1], m.H * kappa[-1]])
    return tip - spec.target, eps, kappa


def static_shoot(spec: StaticBVPSpec, m: RigidityTensors, grid: Grid, *, tol=SHOOT_TOL, max_iter=SHOOT_MAX_ITER):
    """Newton shooting on the root strains with a forward-difference Jacobian.

    Each Newton step is halved until the tip residual decreases (at most 30
    halvings). Returns the best iterate found, flagged unconverged if the
    residual norm never dropped below ``tol``.
    """
    x = np.concatenate([spec.guess_eps0, spec.guess_kappa0])
    r, eps, kappa = _tip_residual(x, spec, m, grid)
    res = float(np.linalg.norm(r))
    it = 0
    while res > tol and it < max_iter:
        it += 1
        jac = np.empty((6, 6))
        for k in range(6):
            xk = x.copy()
            step = SHOOT_FD_STEP * (1.0 + abs(x[k]))
            xk[k] += step
            jac[:, k] = (_tip_residual(xk, spec, m, grid)[0] - r) / step
        try:
            dx = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            dx = np.linalg.lstsq(jac, -r, rcond=None)[0]
        lam = 1.0
        for _ in range(30):
            trial = x + lam * dx
            r_t, eps_t, kappa_t = _tip_residual(trial, spec, m, grid)
            if np.all(np.isfinite(r_t)) and np.linalg.norm(r_t) < res:
                break
            lam *= 0.5
        else:
            break
        x, r, eps, kappa = trial, r_t, eps_t, kappa_t
        res = float(np.linalg.norm(r))
    return ShootResult(x[:3].copy(), x[3:].copy(), eps, kappa, res, it, res <= tol)


def _euler_rate(w, j):
    # J w' = -w x J w, written out for speed in the tight loop
    a, b, c = w
    ja, jb, jc = j[0] * a, j[1] * b, j[2] * c
    return ((jb * c - jc * b) / j[0], (jc * a - ja * c) / j[1], (ja * b - jb * a) / j[2])


def rigid_euler(omega0, T, m: RigidityTensors, dt=None):
    """Classical RK4 for the free rigid body, ``dt <= 1e-5 T``.

    Returns ``(times, omega)`` with omega of shape (n_steps + 1, 3).
    """
    if not T > 0:
        raise ConfigurationError(f"T must be > 0, got {T!r}")
    dt_max = RIGID_DT_FRACTION * T
    dt = dt_max if dt is None else min(float(dt), dt_max)
    n = int(np.ceil(T / dt - 1e-9))
    dt = T / n
    j = tuple(float(x) for x in m.J)
    w = tuple(float(x) for x in omega0)
    out = np.empty((n + 1, 3))
    out[0] = w
    h2 = 0.5 * dt
    for k in range(n):
        k1 = _euler_rate(w, j)
        k2 = _euler_rate((w[0] + h2 * k1[0], w[1] + h2 * k1[1], w[2] + h2 * k1[2]), j)
        k3 = _euler_rate((w[0] + h2 * k2[0], w[1] + h2 * k2[1], w[2] + h2 * k2[2]), j)
        k4 = _euler_rate((w[0] + dt * k3[0], w[1] + dt * k3[1], w[2] + dt * k3[2]), j)
        w = tuple(w[i] + dt * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) / 6.0 for i in range(3))
        out[k + 1] = w
    return np.linspace(0.0, T, n + 1), out


def axisymmetric_precession_rate(omega3, m: RigidityTensors):
    """Body precession rate ``omega3 (J3 - J1) / J1`` for ``J1 == J2``."""
    return omega3 * (m.J[2] - m.J[0]) / m.J[0]
