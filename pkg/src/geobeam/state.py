"""Grid, field containers and the discrete spatial derivative."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .so3 import E3, is_rotation, skew_part, vee

FIELDS = ("v", "omega", "eps", "kappa")


class ConfigurationError(ValueError):
    """Invalid discretization or run parameters."""


class NumericFailure(FloatingPointError):
    """A non-finite value appeared in a state or derivative."""


SCHEMES = ("sbp42", "central2")

# Diagonal-norm summation-by-parts closure, interior order 4, boundary order 2.
_SBP42_BLOCK = np.array(
    [
        [-24 / 17, 59 / 34, -4 / 17, -3 / 34, 0.0, 0.0],
        [-1 / 2, 0.0, 1 / 2, 0.0, 0.0, 0.0],
        [4 / 43, -59 / 86, 0.0, 59 / 86, -4 / 43, 0.0],
        [3 / 98, 0.0, -59 / 98, 0.0, 32 / 49, -4 / 49],
    ]
)
_SBP42_NORM = np.array([17 / 48, 59 / 48, 43 / 48, 49 / 48])


@dataclass(frozen=True)
class Grid:
    """Uniform nodes S_j = j ds on [0, L].

    ``scheme`` selects the first-derivative operator and its matching
    quadrature:

    * ``"sbp42"`` (default): summation-by-parts operator, fourth order
      inside and second order at the two end blocks, with its diagonal norm
      as quadrature. Needs at least 8 nodes.
    * ``"central2"``: second-order central differences inside, three-point
      one-sided stencils at the ends, trapezoid quadrature.

    With ``sbp42`` the quadrature and derivative satisfy
    ``W D + D^T W = diag(-1, 0, ..., 0, 1)``, which is what makes the
    discrete energy balance exact.
    """

    n_nodes: int
    L: float = 1.0
    scheme: str = "sbp42"

    def __post_init__(self):
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 3:
            raise ConfigurationError(f"n_nodes must be an integer >= 3, got {self.n_nodes!r}")
        if not self.L > 0:
            raise ConfigurationError(f"L must be > 0, got {self.L!r}")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown derivative scheme {self.scheme!r}, expected one of {SCHEMES}")
        if self.scheme == "sbp42" and self.n_nodes < 8:
            raise ConfigurationError(f"scheme 'sbp42' needs n_nodes >= 8, got {self.n_nodes}")

    @property
    def ds(self):
        return self.L / (self.n_nodes - 1)

    @property
    def S(self):
        return np.linspace(0.0, self.L, self.n_nodes)

    @property
    def weights(self):
        """Quadrature weights matched to the derivative scheme."""
        w = np.full(self.n_nodes, self.ds)
        if self.scheme == "sbp42":
            w[:4] *= _SBP42_NORM
            w[-4:] *= _SBP42_NORM[::-1]
        else:
            w[0] = w[-1] = 0.5 * self.ds
        return w

    def integrate(self, density):
        """Quadrature along the first axis of ``density``."""
        density = np.asarray(density, dtype=float)
        return np.tensordot(self.weights, density, axes=(0, 0))

    def refined(self, factor=2):
        return Grid((self.n_nodes - 1) * factor + 1, self.L, self.scheme)


@dataclass
class MobileFieldState:
    """Director-frame components of velocity, spin, strain and curvature, each (n, 3)."""

    v: np.ndarray
    omega: np.ndarray
    eps: np.ndarray
    kappa: np.ndarray

    def __post_init__(self):
        for name in FIELDS:
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        shapes = {getattr(self, name).shape for name in FIELDS}
        if len(shapes) != 1 or len(next(iter(shapes))) != 2 or next(iter(shapes))[1] != 3:
            raise ConfigurationError(f"field arrays must share one (n, 3) shape, got {shapes}")

    @classmethod
    def zeros(cls, n):
        return cls(*(np.zeros((n, 3)) for _ in FIELDS))

    @classmethod
    def from_array(cls, a):
        a = np.asarray(a, dtype=float)
        return cls(a[:, 0:3], a[:, 3:6], a[:, 6:9], a[:, 9:12])

    def to_array(self):
        """Stacked (n, 12) array in the order v, omega, eps, kappa."""
        return np.concatenate([self.v, self.omega, self.eps, self.kappa], axis=1)

    @property
    def n_nodes(self):
        return self.v.shape[0]

    def copy(self):
        return MobileFieldState(*(getattr(self, k).copy() for k in FIELDS))

    def is_finite(self):
        return all(np.all(np.isfinite(getattr(self, k))) for k in FIELDS)

    def __add__(self, other):
        return MobileFieldState.from_array(self.to_array() + other.to_array())

    def __mul__(self, c):
        return MobileFieldState.from_array(self.to_array() * c)

    __rmul__ = __mul__


@dataclass
class KinematicState:
    """Cartesian placement ``phi`` (n, 3) and director frames ``R`` (n, 3, 3)."""

    phi: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        self.R = np.asarray(self.R, dtype=float)
        n = self.phi.shape[0]
        if self.phi.shape != (n, 3) or self.R.shape != (n, 3, 3):
            raise ConfigurationError(
                f"phi must be (n, 3) and R (n, 3, 3), got {self.phi.shape} and {self.R.shape}"
            )

    @classmethod
    def straight(cls, grid: Grid):
        """Stress-free reference: phi(S) = S e3, R = I."""
        phi = np.outer(grid.S, E3)
        return cls(phi, np.tile(np.eye(3), (grid.n_nodes, 1, 1)))

    @property
    def n_nodes(self):
        return self.phi.shape[0]

    def copy(self):
        return KinematicState(self.phi.copy(), self.R.copy())

    def is_valid(self, tol=1e-10):
        return bool(np.all(np.isfinite(self.phi))) and is_rotation(self.R, tol)


def d_ds(f, grid: Grid):
    """First derivative along the first axis of ``f`` (any trailing shape)."""
    f = np.asarray(f, dtype=float)
    n = f.shape[0]
    if n < 3:
        raise ConfigurationError(f"d_ds needs at least 3 nodes, got {n}")
    if n != grid.n_nodes:
        raise ConfigurationError(f"field has {n} nodes but grid has {grid.n_nodes}")
    h = grid.ds
    out = np.empty_like(f)
    if grid.scheme == "central2":
        out[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
        out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
        return out
    out[4:-4] = (f[2:-6] - 8.0 * f[3:-5] + 8.0 * f[5:-3] - f[6:-2]) / (12.0 * h)
    flat_in = f.reshape(n, -1)
    flat_out = out.reshape(n, -1)
    flat_out[:4] = _SBP42_BLOCK @ flat_in[:6] / h
    flat_out[-4:] = -(_SBP42_BLOCK[::-1, ::-1] @ flat_in[-6:]) / h
    return out


def d_ds_matrix(grid: Grid):
    """Dense matrix of :func:`d_ds`, for small-grid checks."""
    return d_ds(np.eye(grid.n_nodes), grid)


def strain_from_kinematics(kin: KinematicState, grid: Grid):
    """Mobile strain ``R^T phi' - e3`` and curvature ``vee(skew(R^T R'))``."""
    rt = np.swapaxes(kin.R, -1, -2)
    eps = np.einsum("nij,nj->ni", rt, d_ds(kin.phi, grid)) - E3
    kappa = vee(skew_part(rt @ d_ds(kin.R, grid)))
    return eps, kappa
