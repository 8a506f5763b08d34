"""Named initial-condition families.

Every family returns mobile fields plus the kinematics obtained by marching
the initial strains from ``phi(0) = 0``, ``R(0) = I``.
"""

from __future__ import annotations

import numpy as np

from .config import InitSection
from .dynamics import BoundarySpec, End
from .kinematics import reconstruct_space
from .material import RigidityTensors
from .state import Grid, MobileFieldState
from .static import static_ivp


def mode_shape(grid: Grid, mode):
    """``cos((2 mode - 1) pi S / 2L)``: unit at S = 0, zero at S = L."""
    return np.cos((2 * mode - 1) * np.pi * grid.S / (2.0 * grid.L))


def _end_taper(grid, bc, pinned_at):
    """Smooth factor vanishing at the ends whose condition is ``pinned_at``."""
    s = grid.S / grid.L
    w = np.ones_like(s)
    if bc.end0 is pinned_at:
        w = w * np.sin(0.5 * np.pi * s)
    if bc.endL is pinned_at:
        w = w * np.sin(0.5 * np.pi * (1.0 - s))
    return w


def smooth_noise(rng, grid: Grid, bc: BoundarySpec, scale, n_modes=4):
    """Seeded low-mode perturbation respecting the end conditions.

    Velocity and spin vanish at clamped ends, strain and curvature at free ends.
    """
    s = grid.S / grid.L
    coef = rng.standard_normal((4, n_modes, 3)) * scale
    basis = np.stack([np.cos(k * np.pi * s) for k in range(n_modes)])
    parts = [np.einsum("kn,ki->ni", basis, coef[f]) for f in range(4)]
    clamp = _end_taper(grid, bc, End.CLAMPED)[:, None]
    free = _end_taper(grid, bc, End.FREE)[:, None]
    return MobileFieldState(parts[0] * clamp, parts[1] * clamp, parts[2] * free, parts[3] * free)


def make_initial(init: InitSection, grid: Grid, m: RigidityTensors, bc: BoundarySpec, rng=None):
    u = MobileFieldState.zeros(grid.n_nodes)
    shape = mode_shape(grid, init.mode)
    if init.kind == "bending_pluck":
        if init.axis == 3:
            raise ValueError("bending_pluck needs axis 1 or 2; use twist_pulse for axis 3")
        u.kappa[:, init.axis - 1] = init.amplitude * shape
    elif init.kind == "axial_pulse":
        u.eps[:, 2] = init.amplitude * shape
    elif init.kind == "twist_pulse":
        u.kappa[:, 2] = init.amplitude * shape
    elif init.kind == "rigid_spin":
        u.omega[:] = init.omega0
    elif init.kind == "static_inject":
        u.eps[:], u.kappa[:] = static_ivp(init.eps0, init.kappa0, m, grid)
    if init.noise > 0:
        rng = np.random.default_rng(0) if rng is None else rng
        u = u + smooth_noise(rng, grid, bc, init.noise)
    kin = reconstruct_space(np.zeros(3), np.eye(3), u.eps, u.kappa, grid)
    return u, kin
