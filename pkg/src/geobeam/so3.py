"""so(3) / SO(3) primitives.

Vectors are numpy arrays with a trailing axis of length 3, skew matrices and
rotations have trailing shape (3, 3). Every function broadcasts over leading
axes, so a field of n nodes is simply an (n, 3) or (n, 3, 3) array.

Skew matrices are never stored: fields keep the axial vector and ``hat``
materializes the dense matrix on demand, so antisymmetry holds by
construction.
"""

from __future__ import annotations

import numpy as np

TOL_ORTH = 1e-10
SMALL_ANGLE = 1e-6

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def hat(u):
    """Map axial vectors ``(..., 3)`` to antisymmetric matrices ``(..., 3, 3)``.

    ``hat(u) @ w == np.cross(u, w)`` for every ``w``.
    """
    u = np.asarray(u, dtype=float)
    x, y, z = u[..., 0], u[..., 1], u[..., 2]
    m = np.zeros(u.shape[:-1] + (3, 3))
    m[..., 0, 1] = -z
    m[..., 0, 2] = y
    m[..., 1, 0] = z
    m[..., 1, 2] = -x
    m[..., 2, 0] = -y
    m[..., 2, 1] = x
    return m


def vee(a):
    """Inverse of :func:`hat`: read the axial vector of an antisymmetric matrix."""
    a = np.asarray(a, dtype=float)
    return np.stack([a[..., 2, 1], a[..., 0, 2], a[..., 1, 0]], axis=-1)


def skew_part(m):
    """Antisymmetric projection ``(M - M^T) / 2``."""
    m = np.asarray(m, dtype=float)
    return 0.5 * (m - np.swapaxes(m, -1, -2))


def cross(a, b):
    """``a x b`` over the last axis; leaner than ``np.cross`` on small arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]
    out[..., 1] = a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2]
    out[..., 2] = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return out


def frobenius(a, b):
    """Half-trace matrix inner product ``Tr(A^T B) / 2``.

    On skew matrices this equals the dot product of the axial vectors.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return 0.5 * np.sum(a * b, axis=(-2, -1))


def commutator(a, b):
    return a @ b - b @ a


def _rodrigues_coefficients(theta):
    """sin(t)/t and (1 - cos(t))/t**2 with a Taylor branch near zero."""
    theta = np.asarray(theta, dtype=float)
    small = theta < SMALL_ANGLE
    t = np.where(small, 1.0, theta)
    t2 = theta * theta
    a = np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, np.sin(t) / t)
    b = np.where(small, 0.5 - t2 / 24.0 + t2 * t2 / 720.0, (1.0 - np.cos(t)) / (t * t))
    return a, b


def exp_so3(w):
    """Rodrigues exponential ``I + a hat(w) + b hat(w)^2``."""
    w = np.asarray(w, dtype=float)
    theta = np.linalg.norm(w, axis=-1)
    a, b = _rodrigues_coefficients(theta)
    # hat(w)^2 = w w^T - |w|^2 I
    k2 = w[..., :, None] * w[..., None, :]
    out = b[..., None, None] * k2 + a[..., None, None] * hat(w)
    diag = 1.0 - b * theta * theta
    for i in range(3):
        out[..., i, i] += diag
    return out


def right_jacobian(x):
    """``J`` with ``exp(x)^T d/dt exp(x) = hat(J(x) x_dot)``."""
    x = np.asarray(x, dtype=float)
    theta = np.linalg.norm(x, axis=-1)
    small = theta < SMALL_ANGLE
    t = np.where(small, 1.0, theta)
    t2 = theta * theta
    b = np.where(small, 0.5 - t2 / 24.0, (1.0 - np.cos(t)) / (t * t))
    c = np.where(small, 1.0 / 6.0 - t2 / 120.0, (t - np.sin(t)) / (t * t * t))
    k = hat(x)
    eye = np.broadcast_to(np.eye(3), k.shape)
    return eye - b[..., None, None] * k + c[..., None, None] * (k @ k)


def dexp_inv(theta, w):
    """Rate of ``theta`` for ``R exp(theta)`` spinning with body rate ``w``.

    Series of the inverse exp tangent truncated after the second Bernoulli
    term; the omitted terms are O(|theta|^4) and do not affect fourth order
    in the Munthe-Kaas RK4 rotation update.
    """
    return w + 0.5 * cross(theta, w) + cross(theta, cross(theta, w)) / 12.0


def orthogonality_error(r):
    """Max-norm of ``R^T R - I`` and ``|det R - 1|`` over all rotations in ``r``."""
    r = np.asarray(r, dtype=float)
    gram = np.swapaxes(r, -1, -2) @ r - np.eye(3)
    det = np.linalg.det(r)
    return max(float(np.max(np.abs(gram))), float(np.max(np.abs(det - 1.0))))


def is_rotation(r, tol=TOL_ORTH):
    return orthogonality_error(r) <= tol


def orthonormalize(r):
    """Nearest rotation (polar factor) of each 3x3 block."""
    r = np.asarray(r, dtype=float)
    u, _, vt = np.linalg.svd(r)
    q = u @ vt
    # reflect if a block came out improper
    d = np.linalg.det(q)
    if np.any(d < 0):
        u = u.copy()
        u[d < 0, :, -1] *= -1.0
        q = u @ vt
    return q


def orthonormalize_if_drifted(r, tol=TOL_ORTH):
    """Project onto SO(3) when ``R^T R`` has drifted from I by more than ``tol``.

    Only the Gram defect is checked: a product of rotations cannot change the
    sign of its determinant without first leaving the orthogonal matrices.
    """
    r = np.asarray(r, dtype=float)
    gram = np.swapaxes(r, -1, -2) @ r - np.eye(3)
    if np.max(np.abs(gram)) > tol:
        return orthonormalize(r)
    return r


def rotation_about(axis, angle):
    """Closed-form rotation by ``angle`` about coordinate axis 0, 1 or 2."""
    c, s = np.cos(angle), np.sin(angle)
    i, j = [(1, 2), (2, 0), (0, 1)][axis]
    r = np.eye(3)
    r[i, i] = c
    r[j, j] = c
    r[i, j] = -s
    r[j, i] = s
    return r


def to_quaternion(r):
    """Unit quaternion ``(w, x, y, z)`` with ``w >= 0`` for each rotation."""
    r = np.asarray(r, dtype=float)
    flat = r.reshape(-1, 3, 3)
    out = np.empty((flat.shape[0], 4))
    for k, m in enumerate(flat):
        tr = m[0, 0] + m[1, 1] + m[2, 2]
        # Shepperd: branch on the largest diagonal term for stability
        cand = np.array([tr, m[0, 0], m[1, 1], m[2, 2]])
        i = int(np.argmax(cand))
        if i == 0:
            s = 2.0 * np.sqrt(1.0 + tr)
            q = [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
        elif i == 1:
            s = 2.0 * np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2])
            q = [(m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s]
        elif i == 2:
            s = 2.0 * np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2])
            q = [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s]
        else:
            s = 2.0 * np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1])
            q = [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s]
        q = np.asarray(q)
        q /= np.linalg.norm(q)
        out[k] = -q if q[0] < 0 else q
    return out.reshape(r.shape[:-2] + (4,))


def from_quaternion(q):
    """Rotation matrices from unit quaternions ``(w, x, y, z)``."""
    q = np.asarray(q, dtype=float)
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    r = np.empty(q.shape[:-1] + (3, 3))
    r[..., 0, 0] = 1 - 2 * (y * y + z * z)
    r[..., 0, 1] = 2 * (x * y - w * z)
    r[..., 0, 2] = 2 * (x * z + w * y)
    r[..., 1, 0] = 2 * (x * y + w * z)
    r[..., 1, 1] = 1 - 2 * (x * x + z * z)
    r[..., 1, 2] = 2 * (y * z - w * x)
    r[..., 2, 0] = 2 * (x * z - w * y)
    r[..., 2, 1] = 2 * (y * z + w * x)
    r[..., 2, 2] = 1 - 2 * (x * x + y * y)
    return r
