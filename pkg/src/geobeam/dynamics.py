"""Mobile-frame first-order system, boundary conditions and RK4 time stepping.

Per node, with N = G eps, M = H kappa and primes the discrete S-derivative:

    A v'    = N' + kappa x N - omega x A v
    J w'    = M' + kappa x M + (eps + e3) x N - omega x J omega
    eps'    = v' + kappa x v + (eps + e3) x omega
    kappa'  = omega' + kappa x omega

(left-hand primes are time rates). Clamped ends pin v and omega, free ends
pin eps and kappa; both are imposed by overwriting the time-derivative rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .energy import energy_report
from .kinematics import update_kinematics
from .material import RigidityTensors
from .so3 import E3, cross, hat
from .state import ConfigurationError, Grid, KinematicState, MobileFieldState, NumericFailure, d_ds, d_ds_matrix

CFL_SAFETY = 0.5


class End(str, Enum):
    CLAMPED = "clamped"
    FREE = "free"


@dataclass(frozen=True)
class BoundarySpec:
    end0: End = End.CLAMPED
    endL: End = End.FREE

    def __post_init__(self):
        object.__setattr__(self, "end0", End(self.end0))
        object.__setattr__(self, "endL", End(self.endL))

    def ends(self):
        return ((0, self.end0), (-1, self.endL))

    @property
    def conservative(self):
        """Every end pins either (v, omega) or (eps, kappa), so no power crosses it."""
        return True


def apply_boundary_rows(du: MobileFieldState, bc: BoundarySpec):
    for i, end in bc.ends():
        if end is End.CLAMPED:
            du.v[i] = 0.0
            du.omega[i] = 0.0
        else:
            du.eps[i] = 0.0
            du.kappa[i] = 0.0
    return du


def _boundary_rows_array(du, bc):
    for i, end in bc.ends():
        if end is End.CLAMPED:
            du[i, 0:6] = 0.0
        else:
            du[i, 6:12] = 0.0
    return du


def _rhs_array(x, bc, m, grid):
    """Right-hand side on the stacked (n, 12) layout."""
    v, w, e, k = x[:, 0:3], x[:, 3:6], x[:, 6:9], x[:, 9:12]
    N = m.G * e
    M = m.H * k
    d = d_ds(np.concatenate([N, M, v, w], axis=1), grid)
    # all eight cross products in one batched call
    e3 = e + E3
    lhs = np.empty((8,) + k.shape)
    rhs = np.empty_like(lhs)
    lhs[0], lhs[1], lhs[2], lhs[3], lhs[4], lhs[5], lhs[6], lhs[7] = k, w, k, e3, w, k, e3, k
    rhs[0], rhs[1], rhs[2], rhs[3], rhs[4], rhs[5], rhs[6], rhs[7] = N, m.A * v, M, N, m.J * w, v, w, w
    c = cross(lhs, rhs)
    du = np.empty_like(x)
    du[:, 0:3] = (d[:, 0:3] + c[0] - c[1]) / m.A
    du[:, 3:6] = (d[:, 3:6] + c[2] + c[3] - c[4]) / m.J
    du[:, 6:9] = d[:, 6:9] + c[5] + c[6]
    du[:, 9:12] = d[:, 9:12] + c[7]
    return _boundary_rows_array(du, bc)


def rhs_mobile(u: MobileFieldState, bc: BoundarySpec, m: RigidityTensors, grid: Grid):
    """Time derivative of the mobile fields, nodewise."""
    if not u.is_finite():
        raise NumericFailure("non-finite value in mobile state")
    return MobileFieldState.from_array(_rhs_array(u.to_array(), bc, m, grid))


def assemble_operators(u: MobileFieldState, m: RigidityTensors, grid: Grid):
    """Global matrices of ``D u' + Y(u) u = M u_t`` for an (n*12,) state vector.

    Debug path for small grids; the production RHS never assembles.
    """
    n = grid.n_nodes
    mats = m.matrices()
    G, H, A, J = mats["G"], mats["H"], mats["A"], mats["J"]
    Z = np.zeros((3, 3))
    d_node = np.block([[Z, Z, G, Z], [Z, Z, Z, H], [G, Z, Z, Z], [Z, H, Z, Z]])
    m_node = np.block([[A, Z, Z, Z], [Z, J, Z, Z], [Z, Z, G, Z], [Z, Z, Z, H]])
    D = np.kron(np.eye(n), d_node) @ np.kron(d_ds_matrix(grid), np.eye(12))
    Y = np.zeros((12 * n, 12 * n))
    for j in range(n):
        W, K, Em = hat(u.omega[j]), hat(u.kappa[j]), hat(u.eps[j] + E3)
        Y[12 * j : 12 * j + 12, 12 * j : 12 * j + 12] = np.block(
            [
                [-W @ A, Z, K @ G, Z],
                [Z, -W @ J, Em @ G, K @ H],
                [G @ K, G @ Em, Z, Z],
                [Z, H @ K, Z, Z],
            ]
        )
    return D, Y, np.kron(np.eye(n), m_node)


def rhs_mobile_assembled(u: MobileFieldState, bc: BoundarySpec, m: RigidityTensors, grid: Grid):
    D, Y, Mm = assemble_operators(u, m, grid)
    x = u.to_array().ravel()
    du = np.linalg.solve(Mm, D @ x + Y @ x)
    return apply_boundary_rows(MobileFieldState.from_array(du.reshape(-1, 12)), bc)


def admissible_dt(m: RigidityTensors, grid: Grid, cfl_safety=CFL_SAFETY):
    return cfl_safety * grid.ds / m.c_max


class CFLViolation(ConfigurationError):
    def __init__(self, dt, dt_max, c_max):
        super().__init__(f"dt={dt!r} exceeds the admissible step {dt_max!r} (c_max={c_max!r})")
        self.dt = dt
        self.dt_max = dt_max
        self.c_max = c_max


def check_dt(dt, m: RigidityTensors, grid: Grid, cfl_safety=CFL_SAFETY):
    dt_max = admissible_dt(m, grid, cfl_safety)
    if not dt > 0 or dt > dt_max * (1 + 1e-12):
        raise CFLViolation(dt, dt_max, m.c_max)


def step_rk4(u, kin, dt, bc, m, grid, *, frozen=None, cfl_safety=CFL_SAFETY, check=True):
    """One classical RK4 step of the fields, with the frames co-advanced.

    ``frozen`` is an optional boolean mask over the 12 field components whose
    rates are held at zero (used by the subspace presets).
    """
    if check:
        check_dt(dt, m, grid, cfl_safety)
    if not u.is_finite():
        raise NumericFailure("non-finite value in mobile state")
    x0 = u.to_array()

    def f(x):
        du = _rhs_array(x, bc, m, grid)
        if frozen is not None:
            du[:, frozen] = 0.0
        return du

    k1 = f(x0)
    x2 = x0 + 0.5 * dt * k1
    k2 = f(x2)
    x3 = x0 + 0.5 * dt * k2
    k3 = f(x3)
    x4 = x0 + dt * k3
    k4 = f(x4)
    x = x0 + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    if not np.all(np.isfinite(x)):
        raise NumericFailure("RK4 step produced non-finite values")
    stages = np.stack([x0, x2, x3, x4])
    kin = update_kinematics(kin, stages[:, :, 0:3], stages[:, :, 3:6], dt)
    return MobileFieldState.from_array(x), kin


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    kinematics: list = field(default_factory=list)
    ledger: list = field(default_factory=list)
    grid: Grid | None = None
    tensors: RigidityTensors | None = None
    bc: BoundarySpec | None = None
    dt: float = 0.0

    def append(self, t, u, kin):
        self.times.append(float(t))
        self.states.append(u.copy())
        self.kinematics.append(kin.copy())


def integrate(u, kin, bc, m, grid, dt, n_steps, *, output_stride=1, frozen=None, cfl_safety=CFL_SAFETY):
    """Fixed-step loop; snapshots at step 0 and every ``output_stride`` steps."""
    if output_stride < 1:
        raise ConfigurationError(f"output_stride must be >= 1, got {output_stride}")
    check_dt(dt, m, grid, cfl_safety)
    traj = Trajectory(grid=grid, tensors=m, bc=bc, dt=dt)
    traj.append(0.0, u, kin)
    for k in range(1, n_steps + 1):
        u, kin = step_rk4(u, kin, dt, bc, m, grid, frozen=frozen, check=False)
        if k % output_stride == 0 or k == n_steps:
            traj.append(k * dt, u, kin)
    traj.ledger = energy_report(traj.times, traj.states, m, grid)
    return traj
