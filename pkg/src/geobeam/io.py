"""CSV serialization: 17 significant digits, RFC 4180 quoting, LF endings."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .so3 import to_quaternion

TRAJECTORY_COLUMNS = (
    "t", "S",
    "v1", "v2", "v3",
    "w1", "w2", "w3",
    "e1", "e2", "e3",
    "k1", "k2", "k3",
    "phi_x", "phi_y", "phi_z",
    "qw", "qx", "qy", "qz",
)  # fmt: skip
CLOSURE_COLUMNS = ("t", "r_eps", "r_kappa")


def format_real(x):
    """Shortest text that still carries 17 significant digits of a double."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    """Write ``rows`` (iterables of reals or strings) below ``header``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else format_real(c) for c in row])
    return path


def read_csv(path):
    """Header and float array of a file written by :func:`write_csv`."""
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = np.array([[float(c) for c in row] for row in r], dtype=float)
    return header, data.reshape(-1, len(header))


def trajectory_rows(times, states, kinematics, grid):
    S = grid.S
    for t, u, kin in zip(times, states, kinematics):
        q = to_quaternion(kin.R)
        block = np.column_stack([np.full(grid.n_nodes, t), S, u.to_array(), kin.phi, q])
        yield from block


def write_trajectory(traj, path):
    return write_csv(path, TRAJECTORY_COLUMNS, trajectory_rows(traj.times, traj.states, traj.kinematics, traj.grid))


def write_ledger(rows, path):
    from .energy import LEDGER_COLUMNS, ledger_array

    return write_csv(path, LEDGER_COLUMNS, ledger_array(rows))
