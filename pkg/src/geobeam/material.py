"""Section and material parameters, rigidity/inertia tensors, energy densities.

All four tensors are diagonal in the director frame, so they are stored as
their diagonals and applied by elementwise products on ``(..., 3)`` arrays.
``E`` is used in the extensional and bending slots (EA, EI1, EI2).
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np


@dataclass(frozen=True)
class MaterialParams:
    rho: float = 1.0
    E: float = 1.0
    G_mod: float = 0.5
    A_sec: float = 1.0
    I1: float = 1e-2
    I2: float = 1e-2
    I3: float = 2e-2
    L: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"material parameter {f.name} must be finite and > 0, got {value!r}")

    @property
    def wave_speed(self):
        """Fastest characteristic speed, max of extensional and shear."""
        return max(np.sqrt(self.E / self.rho), np.sqrt(self.G_mod / self.rho))

    def tensors(self):
        return RigidityTensors.from_params(self)


@dataclass(frozen=True)
class RigidityTensors:
    """Diagonals of the shear/extension (G), bending/torsion (H),
    translational inertia (A) and rotational inertia (J) tensors."""

    G: np.ndarray
    H: np.ndarray
    A: np.ndarray
    J: np.ndarray
    c_max: float = field(default=1.0)

    @classmethod
    def from_params(cls, p: MaterialParams):
        return cls(
            G=np.array([p.G_mod * p.A_sec, p.G_mod * p.A_sec, p.E * p.A_sec]),
            H=np.array([p.E * p.I1, p.E * p.I2, p.G_mod * p.I3]),
            A=np.full(3, p.rho * p.A_sec),
            J=np.array([p.rho * p.I1, p.rho * p.I2, p.rho * p.I3]),
            c_max=p.wave_speed,
        )

    def scaled(self, G=None, H=None):
        """Copy with the stiffness diagonals multiplied componentwise."""
        return RigidityTensors(
            G=self.G * (1.0 if G is None else np.asarray(G, dtype=float)),
            H=self.H * (1.0 if H is None else np.asarray(H, dtype=float)),
            A=self.A,
            J=self.J,
            c_max=self.c_max,
        )

    @property
    def mass_per_length(self):
        return float(self.A[0])

    def matrices(self):
        return {name: np.diag(getattr(self, name)) for name in ("G", "H", "A", "J")}


def stress_resultants(eps, kappa, m: RigidityTensors):
    """Section force ``N = G eps`` and moment ``M = H kappa`` (mobile components)."""
    return m.G * np.asarray(eps, dtype=float), m.H * np.asarray(kappa, dtype=float)


def strain_energy_density(eps, kappa, m: RigidityTensors):
    eps = np.asarray(eps, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    return 0.5 * (np.sum(eps * m.G * eps, axis=-1) + np.sum(kappa * m.H * kappa, axis=-1))


def kinetic_energy_density(v, omega, m: RigidityTensors):
    v = np.asarray(v, dtype=float)
    omega = np.asarray(omega, dtype=float)
    return 0.5 * (np.sum(v * m.A * v, axis=-1) + np.sum(omega * m.J * omega, axis=-1))
