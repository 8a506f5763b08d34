"""Energy bookkeeping: totals, boundary power and the drift ledger."""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np

from .material import RigidityTensors, kinetic_energy_density, strain_energy_density
from .state import Grid, MobileFieldState

LEDGER_COLUMNS = ("t", "kinetic", "strain", "total", "boundary_flux", "cumulative_flux_integral", "drift")


@dataclass(frozen=True)
class EnergyLedgerRow:
    t: float
    kinetic: float
    strain: float
    total: float
    boundary_flux: float
    cumulative_flux_integral: float
    drift: float


def total_energy(u: MobileFieldState, m: RigidityTensors, grid: Grid):
    """Kinetic and strain energy, integrated with the grid quadrature."""
    kinetic = grid.integrate(kinetic_energy_density(u.v, u.omega, m))
    strain = grid.integrate(strain_energy_density(u.eps, u.kappa, m))
    return float(kinetic), float(strain)


def _end_power(u, m, i):
    return float(u.v[i] @ (m.G * u.eps[i]) + u.omega[i] @ (m.H * u.kappa[i]))


def boundary_flux(u: MobileFieldState, m: RigidityTensors):
    """Power through the ends, ``[v.G eps + omega.H kappa]`` at S = L minus at S = 0."""
    return _end_power(u, m, -1) - _end_power(u, m, 0)


def energy_report(times, states, m: RigidityTensors, grid: Grid):
    """Ledger rows for a sequence of snapshots; the flux is integrated in time by trapezoid."""
    rows = []
    e0 = None
    cum = 0.0
    prev_t = prev_flux = None
    for t, u in zip(times, states):
        kinetic, strain = total_energy(u, m, grid)
        total = kinetic + strain
        flux = boundary_flux(u, m)
        if e0 is None:
            e0 = total
        else:
            cum += 0.5 * (t - prev_t) * (flux + prev_flux)
        rows.append(EnergyLedgerRow(t, kinetic, strain, total, flux, cum, total - e0 - cum))
        prev_t, prev_flux = t, flux
    return rows


def flux_flagged(rows, tol=0.0):
    """True when any snapshot carries boundary power above ``tol`` (a driven or non-conservative run)."""
    return any(abs(r.boundary_flux) > tol for r in rows)


def max_relative_drift(rows):
    e0 = rows[0].total
    drift = max(abs(r.drift) for r in rows)
    return drift / e0 if e0 > 0 else drift


def ledger_array(rows):
    return np.array([astuple(r) for r in rows]).reshape(-1, len(fields(EnergyLedgerRow)))
