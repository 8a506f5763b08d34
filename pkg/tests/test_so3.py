"""so(3) primitives: hat/vee, metric, exponential and quaternions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from geobeam.so3 import (
    E1,
    E2,
    E3,
    commutator,
    cross,
    dexp_inv,
    exp_so3,
    from_quaternion,
    frobenius,
    hat,
    is_rotation,
    orthogonality_error,
    orthonormalize,
    orthonormalize_if_drifted,
    right_jacobian,
    rotation_about,
    skew_part,
    to_quaternion,
    vee,
)
from geobeam.kinematics import rkmk4_increments

finite = st.floats(-1e3, 1e3, allow_nan=False)
vec3 = arrays(np.float64, 3, elements=finite)
small_vec3 = arrays(np.float64, 3, elements=st.floats(-3.0, 3.0, allow_nan=False))


class TestHatVee:
    def test_roundtrip_example(self):
        np.testing.assert_array_equal(vee(hat([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])

    def test_axis_three_matrix(self):
        m = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        np.testing.assert_array_equal(hat(E3), m)
        np.testing.assert_array_equal(vee(m), E3)

    def test_zero(self):
        np.testing.assert_array_equal(hat(np.zeros(3)), np.zeros((3, 3)))
        np.testing.assert_array_equal(vee(np.zeros((3, 3))), np.zeros(3))

    def test_cross_action_example(self):
        np.testing.assert_array_equal(hat(E1) @ E2, E3)

    @given(vec3, vec3)
    def test_hat_acts_as_cross(self, u, w):
        np.testing.assert_allclose(hat(u) @ w, np.cross(u, w), rtol=0, atol=1e-9)

    @given(vec3)
    def test_inverse_pair_exact(self, u):
        np.testing.assert_array_equal(vee(hat(u)), u)

    @given(vec3)
    def test_antisymmetric_exactly(self, u):
        a = hat(u)
        np.testing.assert_array_equal(a + a.T, np.zeros((3, 3)))

    def test_broadcasts(self, rng):
        u = rng.standard_normal((4, 5, 3))
        assert hat(u).shape == (4, 5, 3, 3)
        np.testing.assert_array_equal(vee(hat(u)), u)

    def test_skew_part_of_hat_is_identity(self, rng):
        a = hat(rng.standard_normal(3))
        np.testing.assert_array_equal(skew_part(a), a)


class TestMetricAndBracket:
    def test_frobenius_unit(self):
        assert frobenius(hat(E1), hat(E1)) == 1.0

    def test_frobenius_example(self):
        assert frobenius(hat([1.0, 2.0, 3.0]), hat([4.0, 5.0, 6.0])) == pytest.approx(32.0, abs=1e-14)

    def test_frobenius_zero(self, rng):
        assert frobenius(hat(rng.standard_normal(3)), np.zeros((3, 3))) == 0.0

    def test_isometry_random(self, rng):
        a, b = rng.standard_normal((2, 500, 3))
        err = np.abs(frobenius(hat(a), hat(b)) - np.einsum("ni,ni->n", a, b))
        assert err.max() <= 1e-14 * max(1.0, np.abs(np.einsum("ni,ni->n", a, b)).max())

    def test_lie_morphism_random(self, rng):
        a, b = rng.standard_normal((2, 500, 3))
        np.testing.assert_allclose(vee(commutator(hat(a), hat(b))), np.cross(a, b), rtol=0, atol=1e-14)

    @given(vec3, vec3)
    def test_cross_matches_numpy(self, a, b):
        np.testing.assert_allclose(cross(a, b), np.cross(a, b), rtol=0, atol=1e-9)


class TestExp:
    def test_zero_is_identity(self):
        np.testing.assert_array_equal(exp_so3(np.zeros(3)), np.eye(3))

    @pytest.mark.parametrize("axis", [0, 1, 2])
    @pytest.mark.parametrize("angle", [0.3, -1.2, 2.9])
    def test_axis_angle(self, axis, angle):
        w = np.zeros(3)
        w[axis] = angle
        np.testing.assert_allclose(exp_so3(w), rotation_about(axis, angle), rtol=0, atol=1e-15)

    def test_group_inverse(self, rng):
        w = rng.standard_normal((100, 3)) * 3
        np.testing.assert_allclose(exp_so3(w) @ exp_so3(-w), np.broadcast_to(np.eye(3), (100, 3, 3)), atol=1e-14)

    @settings(max_examples=200)
    @given(arrays(np.float64, 3, elements=st.floats(-10 / np.sqrt(3), 10 / np.sqrt(3), allow_nan=False)))
    def test_rotation_up_to_norm_ten(self, w):
        assert orthogonality_error(exp_so3(w)) <= 1e-12

    def test_small_angle_branch_is_continuous(self):
        # both sides of the Taylor switch agree to roundoff
        w = np.array([1.0, -2.0, 0.5]) / np.sqrt(5.25)
        for theta in (1e-6 * (1 - 1e-9), 1e-6 * (1 + 1e-9)):
            exact = np.eye(3) + np.sin(theta) * hat(w) + (1 - np.cos(theta)) * hat(w) @ hat(w)
            np.testing.assert_allclose(exp_so3(theta * w), exact, rtol=0, atol=4e-16)

    def test_tiny_angle_first_order(self):
        w = np.array([1e-9, 0.0, 0.0])
        np.testing.assert_allclose(exp_so3(w), np.eye(3) + hat(w), rtol=0, atol=1e-17)

    @given(small_vec3, small_vec3)
    def test_right_jacobian_matches_difference(self, x, xdot):
        h = 1e-6
        d = (exp_so3(x + h * xdot) - exp_so3(x - h * xdot)) / (2 * h)
        np.testing.assert_allclose(exp_so3(x).T @ d, hat(right_jacobian(x) @ xdot), atol=1e-7)

    def test_rkmk4_is_fourth_order(self):
        # spin field with explicit time dependence; reference by a fine run
        def omega(t):
            return np.array([np.cos(3 * t), 0.5 * np.sin(2 * t), 1.0 + 0.3 * t])[None]

        def run(n):
            dt = 1.0 / n
            r = np.eye(3)[None]
            for k in range(n):
                t = k * dt
                stages = np.stack([omega(t), omega(t + dt / 2), omega(t + dt / 2), omega(t + dt)])
                _, theta = rkmk4_increments(stages, dt)
                r = r @ exp_so3(theta)
            return r[0]

        ref = run(4096)
        errs = [np.abs(run(n) - ref).max() for n in (16, 32, 64)]
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(orders > 3.6)

    def test_dexp_inv_zero_theta(self, rng):
        w = rng.standard_normal(3)
        np.testing.assert_array_equal(dexp_inv(np.zeros(3), w), w)


class TestOrthonormalization:
    def test_is_rotation(self, rng):
        assert is_rotation(exp_so3(rng.standard_normal((10, 3))))
        assert not is_rotation(1.001 * np.eye(3))

    def test_projection_restores_rotation(self, rng):
        r = exp_so3(rng.standard_normal((20, 3))) + 1e-6 * rng.standard_normal((20, 3, 3))
        q = orthonormalize(r)
        assert orthogonality_error(q) < 1e-14
        assert np.abs(q - r).max() < 1e-5

    def test_improper_block_is_reflected(self):
        q = orthonormalize(np.diag([1.0, 1.0, -1.0]))
        assert np.linalg.det(q) == pytest.approx(1.0)

    def test_only_when_drifted(self, rng):
        r = exp_so3(rng.standard_normal((5, 3)))
        assert orthonormalize_if_drifted(r) is r


class TestQuaternion:
    def test_identity(self):
        np.testing.assert_array_equal(to_quaternion(np.eye(3)), [1.0, 0.0, 0.0, 0.0])

    def test_roundtrip(self, rng):
        r = exp_so3(rng.standard_normal((200, 3)) * 2)
        q = to_quaternion(r)
        assert np.all(q[:, 0] >= 0)
        np.testing.assert_allclose(np.linalg.norm(q, axis=1), 1.0, atol=1e-15)
        np.testing.assert_allclose(from_quaternion(q), r, atol=1e-14)

    def test_half_turn(self):
        r = rotation_about(0, np.pi)
        q = to_quaternion(r)
        np.testing.assert_allclose(np.abs(q), [0.0, 1.0, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(from_quaternion(q), r, atol=1e-15)

    @given(small_vec3)
    def test_sign_convention(self, w):
        q = to_quaternion(exp_so3(w))
        assert q[0] >= 0
        np.testing.assert_allclose(from_quaternion(q), exp_so3(w), atol=1e-13)
