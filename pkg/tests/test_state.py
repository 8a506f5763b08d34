import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geobeam.so3 import E3, rotation_about
from geobeam.state import (
    ConfigurationError,
    Grid,
    KinematicState,
    MobileFieldState,
    d_ds,
    d_ds_matrix,
    strain_from_kinematics,
)
from geobeam.experiments import loglog_slope

SCHEMES = ("sbp42", "central2")


def arc(grid, c):
    S = grid.S
    phi = np.column_stack([(1 - np.cos(c * S)) / c, np.zeros_like(S), np.sin(c * S) / c])
    R = np.stack([rotation_about(1, c * s) for s in S])
    return KinematicState(phi, R)


class TestGrid:
    def test_spacing(self):
        g = Grid(11, 2.0)
        assert g.ds == pytest.approx(0.2)
        np.testing.assert_allclose(g.S, np.linspace(0, 2, 11))

    @pytest.mark.parametrize("n", [0, 2, 2.5])
    def test_too_few_nodes(self, n):
        with pytest.raises(ConfigurationError):
            Grid(n)

    def test_sbp_needs_eight(self):
        with pytest.raises(ConfigurationError):
            Grid(7)
        Grid(7, scheme="central2")

    def test_bad_scheme_and_length(self):
        with pytest.raises(ConfigurationError):
            Grid(11, scheme="spectral")
        with pytest.raises(ConfigurationError):
            Grid(11, L=0.0)

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_weights_sum_to_length(self, scheme):
        assert Grid(41, 1.7, scheme).weights.sum() == pytest.approx(1.7, abs=1e-15)

    def test_trapezoid_exact_on_linear(self):
        g = Grid(9, scheme="central2")
        assert g.integrate(g.S) == pytest.approx(0.5, abs=1e-15)

    def test_sbp_quadrature_exact_on_cubic(self):
        g = Grid(21)
        assert g.integrate(g.S**3) == pytest.approx(0.25, abs=1e-15)

    def test_refined(self):
        assert Grid(11).refined().n_nodes == 21


class TestDerivative:
    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_constant(self, scheme):
        g = Grid(21, scheme=scheme)
        np.testing.assert_allclose(d_ds(np.full((21, 3), 4.2), g), 0.0, atol=1e-12)

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_linear_exact_everywhere(self, scheme):
        g = Grid(41, scheme=scheme)
        np.testing.assert_allclose(d_ds(g.S, g), np.ones(41), rtol=0, atol=1e-12)

    def test_too_few_nodes(self):
        g = Grid(3, scheme="central2")
        with pytest.raises(ConfigurationError):
            d_ds(np.zeros((2, 3)), g)

    def test_node_mismatch(self):
        with pytest.raises(ConfigurationError):
            d_ds(np.zeros((10, 3)), Grid(11))

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_sin_second_order(self, scheme):
        levels = [41, 81, 161]
        h = [1 / (n - 1) for n in levels]
        errs = []
        for n in levels:
            g = Grid(n, scheme=scheme)
            errs.append(np.max(np.abs(d_ds(np.sin(g.S), g) - np.cos(g.S))))
        # the boundary closures set the max-norm order for both schemes
        assert loglog_slope(h, errs) == pytest.approx(2.0, abs=0.2)

    def test_sbp_interior_fourth_order(self):
        levels = [41, 81, 161]
        errs = []
        for n in levels:
            g = Grid(n)
            errs.append(np.max(np.abs((d_ds(np.sin(g.S), g) - np.cos(g.S))[4:-4])))
        assert loglog_slope([1 / (n - 1) for n in levels], errs) == pytest.approx(4.0, abs=0.2)

    def test_sbp_property(self):
        g = Grid(17)
        D = d_ds_matrix(g)
        W = np.diag(g.weights)
        B = np.zeros((17, 17))
        B[0, 0], B[-1, -1] = -1.0, 1.0
        np.testing.assert_allclose(W @ D + D.T @ W, B, atol=1e-13)

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_trailing_shapes(self, scheme, rng):
        g = Grid(12, scheme=scheme)
        f = rng.standard_normal((12, 3, 3))
        out = d_ds(f, g)
        np.testing.assert_allclose(out[:, 1, 2], d_ds(f[:, 1, 2], g), atol=1e-14)

    @settings(max_examples=30)
    @given(st.integers(8, 40), st.floats(0.1, 10))
    def test_linear_property(self, n, L):
        g = Grid(n, L)
        a, b = 0.3, -1.7
        np.testing.assert_allclose(d_ds(a * g.S + b, g), a, atol=1e-10)


class TestContainers:
    def test_mobile_roundtrip(self, rng):
        a = rng.standard_normal((6, 12))
        u = MobileFieldState.from_array(a)
        np.testing.assert_array_equal(u.to_array(), a)
        np.testing.assert_array_equal(u.kappa, a[:, 9:12])

    def test_mobile_shape_mismatch(self):
        with pytest.raises(ConfigurationError):
            MobileFieldState(np.zeros((3, 3)), np.zeros((4, 3)), np.zeros((3, 3)), np.zeros((3, 3)))

    def test_mobile_arithmetic(self, rng):
        u = MobileFieldState.from_array(rng.standard_normal((5, 12)))
        np.testing.assert_allclose((u + 2.0 * u).to_array(), 3 * u.to_array())

    def test_finiteness(self):
        u = MobileFieldState.zeros(4)
        assert u.is_finite()
        u.omega[1, 1] = np.nan
        assert not u.is_finite()

    def test_kinematic_shapes(self):
        with pytest.raises(ConfigurationError):
            KinematicState(np.zeros((4, 3)), np.zeros((3, 3, 3)))

    def test_straight_is_valid(self):
        kin = KinematicState.straight(Grid(11))
        assert kin.is_valid()
        np.testing.assert_allclose(kin.phi[-1], E3)

    def test_copy_is_deep(self):
        kin = KinematicState.straight(Grid(11))
        c = kin.copy()
        c.R[0, 0, 0] = 5.0
        assert kin.R[0, 0, 0] == 1.0


class TestStrainFromKinematics:
    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_straight_reference(self, scheme):
        g = Grid(21, scheme=scheme)
        eps, kappa = strain_from_kinematics(KinematicState.straight(g), g)
        np.testing.assert_allclose(eps, 0.0, atol=1e-13)
        np.testing.assert_array_equal(kappa, 0.0)

    def test_uniform_stretch(self):
        g = Grid(21)
        kin = KinematicState(np.outer(1.03 * g.S, E3), np.tile(np.eye(3), (21, 1, 1)))
        eps, kappa = strain_from_kinematics(kin, g)
        np.testing.assert_allclose(eps, np.tile([0, 0, 0.03], (21, 1)), atol=1e-13)
        np.testing.assert_array_equal(kappa, 0.0)

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_arc_second_order(self, scheme):
        c = 2.0
        errs, h = [], []
        for n in (21, 41, 81):
            g = Grid(n, scheme=scheme)
            eps, kappa = strain_from_kinematics(arc(g, c), g)
            errs.append(max(np.abs(eps).max(), np.abs(kappa - [0, c, 0]).max()))
            h.append(g.ds)
        assert errs[-1] < 1e-3
        assert loglog_slope(h, errs) > 1.8
