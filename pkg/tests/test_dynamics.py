import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geobeam.config import InitSection, active_mask, preset
from geobeam.dynamics import (
    BoundarySpec,
    CFLViolation,
    End,
    admissible_dt,
    check_dt,
    integrate,
    rhs_mobile,
    rhs_mobile_assembled,
    step_rk4,
)
from geobeam.experiments import CLAMPED_FREE, default_tensors, loglog_slope, random_admissible_state
from geobeam.initial import make_initial
from geobeam.simulation import simulate
from geobeam.state import Grid, KinematicState, MobileFieldState, NumericFailure
from geobeam.static import rigid_euler, static_ivp

M = default_tensors()
FREE_FREE = BoundarySpec(End.FREE, End.FREE)
ALL_BCS = [BoundarySpec(a, b) for a in End for b in End]


class TestRhs:
    def test_rest_is_equilibrium(self):
        g = Grid(21)
        du = rhs_mobile(MobileFieldState.zeros(21), CLAMPED_FREE, M, g)
        np.testing.assert_array_equal(du.to_array(), 0.0)

    def test_uniform_extension_equilibrium(self):
        g = Grid(21)
        u = MobileFieldState.zeros(21)
        u.eps[:, 2] = 0.01
        np.testing.assert_allclose(rhs_mobile(u, FREE_FREE, M, g).to_array(), 0.0, atol=1e-15)

    def test_principal_spin_is_steady(self):
        g = Grid(21)
        u = MobileFieldState.zeros(21)
        u.omega[:, 2] = 1.5
        du = rhs_mobile(u, FREE_FREE, M, g)
        np.testing.assert_array_equal(du.omega, 0.0)
        # d/dS of a constant spin is zero up to stencil roundoff
        np.testing.assert_allclose(du.to_array(), 0.0, atol=1e-13)

    def test_nonfinite_input(self):
        g = Grid(21)
        u = MobileFieldState.zeros(21)
        u.v[3, 0] = np.inf
        with pytest.raises(NumericFailure):
            rhs_mobile(u, CLAMPED_FREE, M, g)

    @pytest.mark.parametrize("bc", ALL_BCS, ids=lambda b: f"{b.end0.value}-{b.endL.value}")
    def test_boundary_rows(self, bc, rng):
        g = Grid(15)
        u = MobileFieldState.from_array(rng.standard_normal((15, 12)))
        du = rhs_mobile(u, bc, M, g)
        for i, end in bc.ends():
            pinned = du.to_array()[i, 0:6] if end is End.CLAMPED else du.to_array()[i, 6:12]
            np.testing.assert_array_equal(pinned, 0.0)

    @pytest.mark.parametrize("scheme", ["sbp42", "central2"])
    @pytest.mark.parametrize("bc", ALL_BCS, ids=lambda b: f"{b.end0.value}-{b.endL.value}")
    def test_assembled_matches_nodewise(self, scheme, bc, rng):
        g = Grid(9, scheme=scheme)
        u = MobileFieldState.from_array(0.3 * rng.standard_normal((9, 12)))
        a = rhs_mobile(u, bc, M, g).to_array()
        b = rhs_mobile_assembled(u, bc, M, g).to_array()
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-14 * max(1.0, np.abs(a).max()))

    @pytest.mark.parametrize("bc", ALL_BCS, ids=lambda b: f"{b.end0.value}-{b.endL.value}")
    def test_power_balance_exact(self, bc, rng):
        from geobeam.experiments import power_balance

        assert power_balance(rng, Grid(41), bc, M) < 1e-12

    def test_static_profile_is_fixed_point(self):
        errs, h = [], []
        for n in (41, 81, 161):
            g = Grid(n)
            eps, kappa = static_ivp([0.01, -0.02, 0.03], [0.5, -0.3, 0.2], M, g)
            u = MobileFieldState(np.zeros((n, 3)), np.zeros((n, 3)), eps, kappa)
            errs.append(np.abs(rhs_mobile(u, CLAMPED_FREE, M, g).to_array()).max())
            h.append(g.ds)
        assert errs[-1] < 1e-4
        assert loglog_slope(h, errs) > 1.8


class TestInvariantSubspaces:
    @pytest.mark.parametrize("name", ["planar13", "planar23", "longitudinal"])
    def test_stray_components_stay_zero_without_masks(self, name):
        cfg = preset(name).replace(
            grid={"n_nodes": 41}, time={"t_end": 0.2, "cfl": 0.5, "output_stride": 1}, model={"subspace": "full"}
        )
        traj = simulate(cfg).trajectory
        inactive = ~active_mask(name)
        for u in traj.states:
            np.testing.assert_array_equal(u.to_array()[:, inactive], 0.0)
        assert np.abs(traj.states[-1].to_array()).max() > 0

    def test_planar_kinematics_stay_in_plane(self):
        cfg = preset("planar13").replace(grid={"n_nodes": 41}, time={"t_end": 0.2, "cfl": 0.5})
        kin = simulate(cfg).trajectory.kinematics[-1]
        np.testing.assert_array_equal(kin.phi[:, 1], 0.0)


class TestTimeStepping:
    def test_cfl_refusal_carries_diagnostics(self):
        g = Grid(21)
        with pytest.raises(CFLViolation) as info:
            check_dt(1.1 * admissible_dt(M, g), M, g)
        assert info.value.c_max == M.c_max
        assert info.value.dt_max == pytest.approx(0.5 * g.ds / M.c_max)
        assert "c_max" in str(info.value)

    def test_zero_state_unchanged(self):
        g = Grid(21)
        kin = KinematicState.straight(g)
        u, k = step_rk4(MobileFieldState.zeros(21), kin, admissible_dt(M, g), CLAMPED_FREE, M, g)
        np.testing.assert_array_equal(u.to_array(), 0.0)
        np.testing.assert_array_equal(k.phi, kin.phi)
        np.testing.assert_array_equal(k.R, kin.R)

    def test_zero_run_all_zero(self):
        g = Grid(21)
        traj = integrate(MobileFieldState.zeros(21), KinematicState.straight(g), CLAMPED_FREE, M, g, 0.01, 100)
        assert len(traj.times) == 101
        for u in traj.states:
            np.testing.assert_array_equal(u.to_array(), 0.0)
        for row in traj.ledger:
            assert (row.kinetic, row.strain, row.total, row.boundary_flux, row.drift) == (0, 0, 0, 0, 0)

    def test_output_stride(self):
        g = Grid(21)
        traj = integrate(MobileFieldState.zeros(21), KinematicState.straight(g), CLAMPED_FREE, M, g, 0.01, 10, output_stride=4)
        np.testing.assert_allclose(traj.times, [0.0, 0.04, 0.08, 0.10])

    def test_blowup_is_reported(self):
        g = Grid(21)
        u = MobileFieldState.zeros(21)
        u.v[5, 0] = np.nan
        with pytest.raises(NumericFailure):
            step_rk4(u, KinematicState.straight(g), 0.01, CLAMPED_FREE, M, g)

    def test_fourth_order_in_time(self):
        g = Grid(41)
        u0, k0 = make_initial(InitSection(kind="axial_pulse", amplitude=1e-3), g, M, CLAMPED_FREE)

        def run(dt, t_end=0.5):
            u, k = u0, k0
            for _ in range(round(t_end / dt)):
                u, k = step_rk4(u, k, dt, CLAMPED_FREE, M, g)
            return u.to_array()

        dts = [admissible_dt(M, g) / 2**i for i in range(1, 5)]
        sols = [run(dt) for dt in dts]
        diffs = [np.abs(a - b).max() for a, b in zip(sols[:-1], sols[1:])]
        assert loglog_slope(dts[:-1], diffs) == pytest.approx(4.0, abs=0.4)

    def test_rigid_spin_matches_oracle_fine_step(self):
        cfg = preset("rigid").replace(time={"dt": 1e-4})
        traj = simulate(cfg).trajectory
        m = default_tensors()
        _, w_ref = rigid_euler(cfg.init.omega0, 1.0, m)
        w_sim = traj.states[-1].omega
        assert np.abs(w_sim - w_ref[-1]).max() <= 1e-10

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_frames_stay_orthogonal(self, seed):
        rng = np.random.default_rng(seed)
        g = Grid(21)
        u, kin = random_admissible_state(rng, g, CLAMPED_FREE, amplitude=0.5)
        for _ in range(20):
            u, kin = step_rk4(u, kin, admissible_dt(M, g), CLAMPED_FREE, M, g)
        assert kin.is_valid(1e-13)
