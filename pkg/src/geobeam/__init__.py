"""Geometrically exact (Cosserat / Timoshenko) beam dynamics in director-frame variables."""

from .config import SimConfig, load_config, parse_config, preset
from .dynamics import BoundarySpec, End, integrate, rhs_mobile, step_rk4
from .energy import EnergyLedgerRow, boundary_flux, energy_report, total_energy
from .hamiltonian import (
    Observable,
    PhaseState,
    action_stationarity,
    bracket,
    hamilton_rhs,
    hamiltonian,
    inverse_legendre,
    legendre,
)
from .kinematics import closure_residuals, reconstruct_space, update_kinematics
from .material import MaterialParams, RigidityTensors
from .simulation import simulate
from .so3 import exp_so3, frobenius, hat, vee
from .state import ConfigurationError, Grid, KinematicState, MobileFieldState, NumericFailure, d_ds
from .static import StaticBVPSpec, rigid_euler, static_ivp, static_shoot

__all__ = [
    "BoundarySpec",
    "ConfigurationError",
    "End",
    "EnergyLedgerRow",
    "Grid",
    "KinematicState",
    "MaterialParams",
    "MobileFieldState",
    "NumericFailure",
    "Observable",
    "PhaseState",
    "RigidityTensors",
    "SimConfig",
    "StaticBVPSpec",
    "action_stationarity",
    "boundary_flux",
    "bracket",
    "closure_residuals",
    "d_ds",
    "energy_report",
    "exp_so3",
    "frobenius",
    "hamilton_rhs",
    "hamiltonian",
    "hat",
    "integrate",
    "inverse_legendre",
    "legendre",
    "load_config",
    "parse_config",
    "preset",
    "reconstruct_space",
    "rhs_mobile",
    "rigid_euler",
    "simulate",
    "static_ivp",
    "static_shoot",
    "step_rk4",
    "total_energy",
    "update_kinematics",
    "vee",
]
