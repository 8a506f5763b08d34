"""Config-driven runs of the dynamic solver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import STRING_FLOOR, SimConfig, active_mask
from .dynamics import Trajectory, admissible_dt, integrate
from .initial import make_initial
from .kinematics import ClosureResiduals, closure_residuals
from .material import RigidityTensors
from .state import ConfigurationError, Grid


@dataclass
class SimulationResult:
    trajectory: Trajectory
    closure: list
    config: SimConfig


def build_tensors(cfg: SimConfig):
    m = RigidityTensors.from_params(cfg.material)
    if cfg.model.string:
        # string limit: keep only the extensional stiffness
        m = m.scaled(G=(STRING_FLOOR, STRING_FLOOR, 1.0), H=np.full(3, STRING_FLOOR))
    return m


def build_grid(cfg: SimConfig):
    return Grid(cfg.grid.n_nodes, cfg.material.L, cfg.grid.scheme)


def time_step(cfg: SimConfig, m: RigidityTensors, grid: Grid):
    """Step size and count covering ``t_end`` exactly, never above the requested step."""
    t = cfg.time
    if t.dt is not None:
        dt = t.dt
        limit = admissible_dt(m, grid)
        if dt > limit * (1 + 1e-12):
            raise ConfigurationError(f"time.dt={dt!r} exceeds the admissible step {limit!r} (c_max={m.c_max!r})")
    else:
        dt = admissible_dt(m, grid, 0.5 if t.cfl is None else t.cfl)
    n_steps = int(np.ceil(t.t_end / dt - 1e-9))
    return t.t_end / n_steps, n_steps


def simulate(cfg: SimConfig, rng=None):
    """Run the configured experiment; snapshots every ``output_stride`` steps."""
    m = build_tensors(cfg)
    grid = build_grid(cfg)
    u, kin = make_initial(cfg.init, grid, m, cfg.bc, rng)
    mask = active_mask(cfg.model.subspace)
    frozen = None
    if not mask.all():
        stray = np.max(np.abs(u.to_array()[:, ~mask]))
        if stray > 0:
            raise ConfigurationError(
                f"initial data leaves the {cfg.model.subspace!r} subspace (max stray component {stray!r})"
            )
        frozen = ~mask
    dt, n_steps = time_step(cfg, m, grid)
    traj = integrate(u, kin, cfg.bc, m, grid, dt, n_steps, output_stride=cfg.time.output_stride, frozen=frozen)
    closure = [closure_residuals(s, k, grid) for s, k in zip(traj.states, traj.kinematics)]
    return SimulationResult(traj, closure, cfg)


def closure_table(times, closure):
    return np.array([(t, c.r_eps, c.r_kappa) for t, c in zip(times, closure)]).reshape(-1, 3)


__all__ = ["SimulationResult", "build_grid", "build_tensors", "closure_table", "simulate", "time_step", "ClosureResiduals"]
