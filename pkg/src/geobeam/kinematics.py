"""Recovering placement and director frames from the mobile fields.

Two routes: in time, co-advanced with the field integrator (the production
path), and in space, marching from boundary data at S = 0 (used to build
initial data and to cross-check the time route).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .so3 import E3, dexp_inv, exp_so3, hat, orthonormalize, orthonormalize_if_drifted
from .state import Grid, KinematicState, MobileFieldState, strain_from_kinematics

RK4_WEIGHTS = np.array([1.0, 2.0, 2.0, 1.0]) / 6.0
# frames further than this from orthogonal are projected back after an update
FRAME_DRIFT_TOL = 1e-13


def _rotate(r, x):
    return np.einsum("...ij,...j->...i", r, x)


def rkmk4_increments(omega_stages, dt):
    """Lie-algebra increments of a Munthe-Kaas RK4 step.

    ``omega_stages`` is (4, n, 3): the spin at the four classical RK4 stages.
    Returns ``(theta_stages, theta)`` where ``R_s = R exp(theta_stages[s])``
    are the stage frames and ``R exp(theta)`` is the frame at t + dt.
    """
    w = np.asarray(omega_stages, dtype=float)
    th = np.zeros_like(w)
    k1 = w[0]
    th[1] = 0.5 * dt * k1
    k2 = dexp_inv(th[1], w[1])
    th[2] = 0.5 * dt * k2
    k3 = dexp_inv(th[2], w[2])
    th[3] = dt * k3
    k4 = dexp_inv(th[3], w[3])
    theta = dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return th, theta


def update_kinematics(kin: KinematicState, v, omega, dt):
    """Advance ``(phi, R)`` by ``dt`` given mobile velocity and spin.

    With (n, 3) inputs this is a single Lie-Euler step
    ``R <- R exp(dt omega)``, ``phi <- phi + dt R v``. With (4, n, 3) inputs
    the arrays are the four RK4 stage values and the step is RK4 in the
    exponential coordinates of each frame, matching the stage structure of
    the field integrator.
    """
    v = np.asarray(v, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if v.ndim == 2:
        phi = kin.phi + dt * _rotate(kin.R, v)
        return KinematicState(phi, orthonormalize_if_drifted(kin.R @ exp_so3(dt * omega), FRAME_DRIFT_TOL))

    th, theta = rkmk4_increments(omega, dt)
    # stage 0 sits at the current frame; only the later stages need an exponential
    xdot = np.empty_like(v)
    xdot[0] = _rotate(kin.R, v[0])
    xdot[1:] = _rotate(kin.R[None] @ exp_so3(th[1:]), v[1:])
    phi = kin.phi + dt * np.tensordot(RK4_WEIGHTS, xdot, axes=(0, 0))
    return KinematicState(phi, orthonormalize_if_drifted(kin.R @ exp_so3(theta), FRAME_DRIFT_TOL))


def reconstruct_space(phi0, R0, eps, kappa, grid: Grid):
    """Integrate ``R' = R hat(kappa)``, ``phi' = R (eps + e3)`` from S = 0.

    Classical RK4 with linear interpolation of the nodal strains at the half
    steps; each frame is projected back onto SO(3) after its step.
    """
    eps = np.asarray(eps, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    n, h = grid.n_nodes, grid.ds
    phi = np.empty((n, 3))
    r = np.empty((n, 3, 3))
    phi[0] = phi0
    r[0] = R0

    def f(rot, e, k):
        return rot @ (e + E3), rot @ hat(k)

    for j in range(n - 1):
        e_mid = 0.5 * (eps[j] + eps[j + 1])
        k_mid = 0.5 * (kappa[j] + kappa[j + 1])
        p, q = phi[j], r[j]
        dp1, dq1 = f(q, eps[j], kappa[j])
        dp2, dq2 = f(q + 0.5 * h * dq1, e_mid, k_mid)
        dp3, dq3 = f(q + 0.5 * h * dq2, e_mid, k_mid)
        dp4, dq4 = f(q + h * dq3, eps[j + 1], kappa[j + 1])
        phi[j + 1] = p + h * (dp1 + 2 * dp2 + 2 * dp3 + dp4) / 6.0
        r[j + 1] = orthonormalize(q + h * (dq1 + 2 * dq2 + 2 * dq3 + dq4) / 6.0)
    return KinematicState(phi, r)


class ClosureResiduals(NamedTuple):
    r_eps: float
    r_kappa: float

    def exceeds(self, tol):
        return self.r_eps > tol or self.r_kappa > tol


def closure_residuals(u: MobileFieldState, kin: KinematicState, grid: Grid):
    """Max-norm mismatch between evolved strains and strains of the evolved kinematics."""
    eps, kappa = strain_from_kinematics(kin, grid)
    return ClosureResiduals(
        float(np.max(np.abs(eps - u.eps))),
        float(np.max(np.abs(kappa - u.kappa))),
    )
