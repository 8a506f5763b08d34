"""Phase-space form of the beam: (phi, p_phi, R, sigma).

``phi`` and ``p_phi`` are Cartesian, ``sigma = J omega`` is the rotational
momentum in director components. The bracket below works on the discrete
phase space: nodal values paired by the grid quadrature, so a nodal partial
``df/dx_j`` corresponds to the functional derivative ``df/dx_j / w_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import BoundarySpec, End, Trajectory
from .material import RigidityTensors, kinetic_energy_density, strain_energy_density
from .so3 import E3, cross, exp_so3, frobenius, hat, skew_part, vee
from .state import Grid, KinematicState, MobileFieldState, NumericFailure, d_ds, strain_from_kinematics

H_FD = 1e-5


def _rotate(r, x):
    return np.einsum("...ij,...j->...i", r, x)


def _rotate_t(r, x):
    return np.einsum("...ji,...j->...i", r, x)


@dataclass
class PhaseState:
    phi: np.ndarray
    p_phi: np.ndarray
    R: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        for k in ("phi", "p_phi", "R", "sigma"):
            setattr(self, k, np.array(getattr(self, k), dtype=float))

    @property
    def n_nodes(self):
        return self.phi.shape[0]

    @property
    def kinematics(self):
        return KinematicState(self.phi, self.R)

    def copy(self):
        return PhaseState(self.phi, self.p_phi, self.R, self.sigma)


@dataclass
class TangentState:
    """Velocity on configuration space: Cartesian ``phi_dot`` and ``R_dot = R hat(omega)``."""

    phi_dot: np.ndarray
    R_dot: np.ndarray

    @classmethod
    def from_mobile(cls, u: MobileFieldState, kin: KinematicState):
        return cls(_rotate(kin.R, u.v), kin.R @ hat(u.omega))


def legendre(u: MobileFieldState, kin: KinematicState, m: RigidityTensors):
    return PhaseState(kin.phi, m.A * _rotate(kin.R, u.v), kin.R, m.J * u.omega)


def inverse_legendre(ps: PhaseState, m: RigidityTensors, grid: Grid):
    kin = ps.kinematics
    eps, kappa = strain_from_kinematics(kin, grid)
    u = MobileFieldState(_rotate_t(ps.R, ps.p_phi) / m.A, ps.sigma / m.J, eps, kappa)
    return u, kin.copy()


def hamiltonian_density(ps: PhaseState, m: RigidityTensors, grid: Grid):
    eps, kappa = strain_from_kinematics(ps.kinematics, grid)
    kinetic = 0.5 * np.einsum("ni,ni->n", ps.p_phi, ps.p_phi / m.A) + 0.5 * np.einsum(
        "ni,ni->n", ps.sigma, ps.sigma / m.J
    )
    return kinetic + strain_energy_density(eps, kappa, m)


def hamiltonian(ps: PhaseState, m: RigidityTensors, grid: Grid):
    return float(grid.integrate(hamiltonian_density(ps, m, grid)))


def hamilton_rhs(ps: PhaseState, bc: BoundarySpec, m: RigidityTensors, grid: Grid):
    """Time derivative ``(phi_dot, p_dot, R_dot, sigma_dot)`` of a phase state.

    The linear-momentum rate is taken in the frame-intrinsic form
    ``R (N' + kappa x N)``, so that mapping back to director components gives
    exactly the velocity line of :func:`rhs_mobile`. ``sigma_dot`` holds
    component rates, transport term ``-omega x sigma`` included.
    """
    if not all(np.all(np.isfinite(a)) for a in (ps.phi, ps.p_phi, ps.R, ps.sigma)):
        raise NumericFailure("non-finite value in phase state")
    eps, kappa = strain_from_kinematics(ps.kinematics, grid)
    N = m.G * eps
    M = m.H * kappa
    omega = ps.sigma / m.J
    phi_dot = ps.p_phi / m.A
    p_dot = _rotate(ps.R, d_ds(N, grid) + cross(kappa, N))
    r_dot = ps.R @ hat(omega)
    sigma_dot = d_ds(M, grid) + cross(kappa, M) + cross(eps + E3, N) - cross(omega, ps.sigma)
    for i, end in bc.ends():
        if end is End.CLAMPED:
            p_dot[i] = 0.0
            sigma_dot[i] = 0.0
    return PhaseState(phi_dot, p_dot, r_dot, sigma_dot)


def intrinsic_sigma_rate(ps: PhaseState, rate: PhaseState, m: RigidityTensors):
    """``sigma_dot + omega x sigma``: the rate of sigma seen without frame transport."""
    return rate.sigma + cross(ps.sigma / m.J, ps.sigma)


def mobile_tangent(ps: PhaseState, rate: PhaseState, m: RigidityTensors):
    """Push a phase-space rate to ``(v_dot, omega_dot)`` in director components.

    ``v = R^T p / A`` differentiates to ``-omega x v + R^T p_dot / A``.
    """
    omega = vee(skew_part(np.swapaxes(ps.R, -1, -2) @ rate.R))
    v = _rotate_t(ps.R, ps.p_phi) / m.A
    v_dot = -cross(omega, v) + _rotate_t(ps.R, rate.p_phi) / m.A
    return v_dot, rate.sigma / m.J


@dataclass(frozen=True)
class Observable:
    """Scalar function of a phase state.

    ``support`` lists the nodes the value depends on (``None`` for all); the
    bracket only differentiates where the supports of both arguments meet.
    """

    fn: Callable[[PhaseState], float]
    support: tuple | None = None
    name: str = ""

    def __call__(self, ps):
        return float(self.fn(ps))


def hamiltonian_observable(m: RigidityTensors, grid: Grid):
    return Observable(lambda ps: hamiltonian(ps, m, grid), None, "H")


def sampler(field, node, comp):
    """Observable returning one nodal component of ``phi``, ``p_phi`` or ``sigma``."""
    if field not in ("phi", "p_phi", "sigma"):
        raise ValueError(f"cannot sample field {field!r}")
    return Observable(lambda ps: getattr(ps, field)[node, comp], (node,), f"{field}[{node},{comp}]")


def strain_sampler(which, node, comp, grid: Grid):
    """Observable reading ``eps`` or ``kappa`` from the kinematics at one node."""
    idx = 0 if which == "eps" else 1
    stencil = 6 if grid.scheme == "sbp42" else 3
    lo, hi = max(0, node - stencil), min(grid.n_nodes, node + stencil + 1)
    return Observable(
        lambda ps: strain_from_kinematics(ps.kinematics, grid)[idx][node, comp],
        tuple(range(lo, hi)),
        f"{which}[{node},{comp}]",
    )


def _shifted(ps, field, j, i, h):
    q = ps.copy()
    getattr(q, field)[j, i] += h
    return q


def _rotated(ps, j, i, h):
    q = ps.copy()
    q.R[j] = q.R[j] @ exp_so3(h * np.eye(3)[i])
    return q


def nodal_gradient(f: Observable, ps: PhaseState, nodes):
    """Central-difference partials of ``f`` at ``nodes``.

    Returns a dict of (len(nodes), 3) arrays keyed ``phi``, ``p_phi``,
    ``sigma`` and ``R``; the ``R`` entry holds derivatives along the
    left-trivialized directions ``R hat(e_i)``.
    """
    out = {k: np.zeros((len(nodes), 3)) for k in ("phi", "p_phi", "sigma", "R")}
    for a, j in enumerate(nodes):
        for i in range(3):
            for field in ("phi", "p_phi", "sigma"):
                h = H_FD * (1.0 + abs(getattr(ps, field)[j, i]))
                out[field][a, i] = (f(_shifted(ps, field, j, i, h)) - f(_shifted(ps, field, j, i, -h))) / (2 * h)
            out["R"][a, i] = (f(_rotated(ps, j, i, H_FD)) - f(_rotated(ps, j, i, -H_FD))) / (2 * H_FD)
    for k, g in out.items():
        if not np.all(np.isfinite(g)):
            raise NumericFailure(f"non-finite gradient of {f.name or 'observable'} in {k}")
    return out


def _common_support(f, g, n):
    if f.support is None and g.support is None:
        return list(range(n))
    if f.support is None:
        return sorted(set(g.support))
    if g.support is None:
        return sorted(set(f.support))
    return sorted(set(f.support) & set(g.support))


def bracket(f: Observable, g: Observable, ps: PhaseState, grid: Grid, *, lie_poisson=False):
    """Trivialized Poisson bracket ``{f, g}`` by finite differences.

    Translational part pairs ``df/dphi`` with ``dg/dp``; rotational part
    pairs the left-trivialized ``df/dR`` with ``R hat(dg/dsigma)`` through
    the half-trace inner product. With ``lie_poisson=True`` the term
    ``-sigma . (df/dsigma x dg/dsigma)`` of the reduced rotational bracket is
    added, which makes ``{sigma, H}`` the component rate instead of the rate
    without frame transport.
    """
    nodes = _common_support(f, g, ps.n_nodes)
    if not nodes:
        return 0.0
    gf = nodal_gradient(f, ps, nodes)
    gg = nodal_gradient(g, ps, nodes)
    inv_w = 1.0 / grid.weights[nodes]
    dot = lambda a, b: np.einsum("ni,ni->n", a, b)  # noqa: E731
    rot = lambda a, b: frobenius(hat(a), hat(b))  # noqa: E731
    terms = (
        dot(gf["phi"], gg["p_phi"])
        - dot(gg["phi"], gf["p_phi"])
        + rot(gf["R"], gg["sigma"])
        - rot(gg["R"], gf["sigma"])
    )
    if lie_poisson:
        terms = terms - dot(ps.sigma[nodes], cross(gf["sigma"], gg["sigma"]))
    return float(np.sum(inv_w * terms))


def lagrangian(vel: TangentState, kin: KinematicState, m: RigidityTensors, grid: Grid):
    """Kinetic minus strain energy of a configuration moving with ``vel``."""
    omega = vee(skew_part(np.swapaxes(kin.R, -1, -2) @ vel.R_dot))
    v = _rotate_t(kin.R, vel.phi_dot)
    eps, kappa = strain_from_kinematics(kin, grid)
    density = kinetic_energy_density(v, omega, m) - strain_energy_density(eps, kappa, m)
    return float(grid.integrate(density))


def metric(a: TangentState, b: TangentState, kin: KinematicState, m: RigidityTensors, grid: Grid):
    """Kinetic metric ``int A a_phi . b_phi + << R^T a_R, hat(J vee(R^T b_R)) >>``."""
    rt = np.swapaxes(kin.R, -1, -2)
    wb = vee(skew_part(rt @ b.R_dot))
    density = np.einsum("ni,i,ni->n", a.phi_dot, m.A, b.phi_dot) + frobenius(rt @ a.R_dot, hat(m.J * wb))
    return float(grid.integrate(density))


def duality_pairing(ps: PhaseState, vel: TangentState, grid: Grid):
    """Momentum acting on a velocity: ``int p . phi_dot + << R hat(sigma), R_dot >>``."""
    density = np.einsum("ni,ni->n", ps.p_phi, vel.phi_dot) + frobenius(ps.R @ hat(ps.sigma), vel.R_dot)
    return float(grid.integrate(density))


def _time_derivative(f, dt):
    """Fourth-order central differences along axis 0, second order in the two end layers."""
    out = np.gradient(f, dt, axis=0, edge_order=2)
    if f.shape[0] >= 5:
        out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * dt)
    return out


def discrete_action(phis, rs, dt, m: RigidityTensors, grid: Grid):
    """Time-trapezoid of the Lagrangian along snapshots ``(phi_k, R_k)`` spaced ``dt``."""
    phi_dot = _time_derivative(phis, dt)
    r_dot = _time_derivative(rs, dt)
    lag = np.array(
        [
            lagrangian(TangentState(phi_dot[k], r_dot[k]), KinematicState(phis[k], rs[k]), m, grid)
            for k in range(len(phis))
        ]
    )
    return float(np.trapezoid(lag, dx=dt))


def admissible_variation(rng, times, grid: Grid, bc: BoundarySpec, n_modes=3):
    """Smooth random ``(dphi, dtheta)`` vanishing at both end times and at clamped ends."""
    t = np.asarray(times, dtype=float)
    s = grid.S / grid.L
    bump_t = np.sin(np.pi * (t - t[0]) / (t[-1] - t[0])) ** 2
    shape = np.ones_like(s)
    if bc.end0 is End.CLAMPED:
        shape = shape * np.sin(0.5 * np.pi * s)
    if bc.endL is End.CLAMPED:
        shape = shape * np.sin(0.5 * np.pi * (1.0 - s))
    fields = []
    for _ in range(2):
        coef = rng.standard_normal((n_modes, 3))
        prof = sum(np.outer(np.cos(k * np.pi * s), coef[k]) for k in range(n_modes))
        fields.append(bump_t[:, None, None] * (shape[:, None] * prof)[None])
    return fields[0], fields[1]


def perturb_trajectory(traj, amplitude, *, t_center=None, width=None):
    """Copy of ``traj`` with a smooth bump added to the placements.

    The bump is a Gaussian in time (default: centred mid-run, width a tenth
    of the run) times ``sin(pi S / 2L)`` in space, directed along e1. The
    result is not a solution of the dynamics; it serves as a detector check.
    """
    times = np.asarray(traj.times)
    t_center = 0.5 * (times[0] + times[-1]) if t_center is None else t_center
    width = 0.1 * (times[-1] - times[0]) if width is None else width
    s = traj.grid.S / traj.grid.L
    shape = np.outer(np.sin(0.5 * np.pi * s), np.array([1.0, 0.0, 0.0]))
    out = Trajectory(list(traj.times), list(traj.states), [], [], traj.grid, traj.tensors, traj.bc, traj.dt)
    for t, kin in zip(times, traj.kinematics):
        bump = amplitude * np.exp(-(((t - t_center) / width) ** 2))
        out.kinematics.append(KinematicState(kin.phi + bump * shape, kin.R.copy()))
    return out


def action_stationarity(traj, m: RigidityTensors, grid: Grid, n_variations=10, *, rng=None, step=1e-5):
    """Max |dS/ds| over random admissible variations of a snapshot sequence.

    Frames are varied as ``R exp(s dtheta)``, placements as ``phi + s dphi``;
    each variation is normalized to unit max-norm before differencing, and
    the directional derivative is a fourth-order central difference in s.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    times = np.asarray(traj.times)
    dt = float(times[1] - times[0])
    if not np.allclose(np.diff(times), dt, rtol=1e-9, atol=0.0):
        raise ValueError("action_stationarity needs uniformly spaced snapshots")
    phis = np.stack([k.phi for k in traj.kinematics])
    rs = np.stack([k.R for k in traj.kinematics])
    worst = 0.0
    for _ in range(n_variations):
        dphi, dth = admissible_variation(rng, times, grid, traj.bc)
        scale = max(np.max(np.abs(dphi)), np.max(np.abs(dth)))
        dphi, dth = dphi / scale, dth / scale

        def action(s):
            return discrete_action(phis + s * dphi, rs @ exp_so3(s * dth), dt, m, grid)

        # fourth-order central difference: the rotation variation makes the action odd in s at O(s^3)
        d1 = action(step) - action(-step)
        d2 = action(2 * step) - action(-2 * step)
        worst = max(worst, abs(8.0 * d1 - d2) / (12.0 * step))
    return worst
