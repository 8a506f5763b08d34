"""Reference experiments behind the verification suites.

Each function runs one numerical experiment and returns the measured
quantities; thresholds live with the callers.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.optimize import curve_fit

from .config import InitSection, SimConfig, preset
from .dynamics import BoundarySpec, End, rhs_mobile
from .hamiltonian import (
    TangentState,
    action_stationarity,
    bracket,
    duality_pairing,
    hamilton_rhs,
    hamiltonian,
    hamiltonian_observable,
    intrinsic_sigma_rate,
    inverse_legendre,
    lagrangian,
    legendre,
    metric,
    mobile_tangent,
    perturb_trajectory,
    sampler,
    strain_sampler,
)
from .initial import smooth_noise
from .kinematics import reconstruct_space
from .material import MaterialParams, RigidityTensors
from .simulation import build_grid, build_tensors, simulate
from .so3 import commutator, exp_so3, frobenius, hat, is_rotation, right_jacobian, vee
from .state import Grid
from .static import axisymmetric_precession_rate, rigid_euler, static_ivp

CLAMPED_FREE = BoundarySpec(End.CLAMPED, End.FREE)


def default_tensors():
    return RigidityTensors.from_params(MaterialParams())


def random_admissible_state(rng, grid: Grid, bc: BoundarySpec, amplitude=0.1):
    """Smooth random fields meeting the end conditions, with kinematics marched from a random root."""
    u = smooth_noise(rng, grid, bc, amplitude, n_modes=3)
    kin = reconstruct_space(rng.standard_normal(3), exp_so3(rng.standard_normal(3)), u.eps, u.kappa, grid)
    return u, kin


def loglog_slope(h, err):
    return float(np.polyfit(np.log(h), np.log(err), 1)[0])


# --- algebra -----------------------------------------------------------------


def so3_invariants(rng, n=200):
    """Worst deviations of the hat/vee, bracket, metric and exponential identities."""
    a = rng.standard_normal((n, 3))
    b = rng.standard_normal((n, 3))
    A, B = hat(a), hat(b)
    w = rng.uniform(-1, 1, (n, 3))
    w *= (10.0 * rng.uniform(0, 1, n) / np.linalg.norm(w, axis=1))[:, None]
    Rw = exp_so3(w)
    ortho = np.max(np.abs(np.swapaxes(Rw, -1, -2) @ Rw - np.eye(3)))
    det = np.max(np.abs(np.linalg.det(Rw) - 1.0))
    return {
        "hat_vee_roundtrip": float(np.max(np.abs(vee(A) - a))),
        "antisymmetry": float(np.max(np.abs(A + np.swapaxes(A, -1, -2)))),
        "lie_morphism": float(np.max(np.abs(vee(commutator(A, B)) - np.cross(a, b)))),
        "isometry": float(np.max(np.abs(frobenius(A, B) - np.einsum("ni,ni->n", a, b)))),
        "exp_orthogonality": float(max(ortho, det)),
        "exp_group_inverse": float(np.max(np.abs(Rw @ exp_so3(-w) - np.eye(3)))),
        "exp_all_rotations": bool(is_rotation(Rw, 1e-12)),
    }


def perturbation_identity(a, b, c, t=0.7, s=0.4, steps=(1e-2, 1e-3, 1e-4)):
    """Finite-difference check of ``dW/ds = dSigma/dt + [W, Sigma]``.

    Two-parameter family ``R(t, s) = exp(t a + s b + t s c)`` with
    ``W = R^T dR/dt`` and ``Sigma = R^T dR/ds`` evaluated in closed form; the
    outer derivatives ``dW/ds`` and ``dSigma/dt`` are central differences of
    step ``h``. Returns the errors per step and their log-log slope.
    """
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))

    def W(tt, ss):
        return hat(right_jacobian(tt * a + ss * b + tt * ss * c) @ (a + ss * c))

    def Sig(tt, ss):
        return hat(right_jacobian(tt * a + ss * b + tt * ss * c) @ (b + tt * c))

    errs = []
    for h in steps:
        dW = (W(t, s + h) - W(t, s - h)) / (2 * h)
        dS = (Sig(t + h, s) - Sig(t - h, s)) / (2 * h)
        errs.append(float(np.max(np.abs(dW - dS - commutator(W(t, s), Sig(t, s))))))
    return np.array(errs), loglog_slope(np.array(steps), np.array(errs))


def curvature_variation_identity(steps=(1e-2, 1e-3, 1e-4), S=0.6):
    """Finite-difference check of ``d kappa = (d theta)' + kappa x d theta``.

    Manufactured frame field ``R(S) = exp(x(S))`` varied as
    ``R exp(e dtheta(S))``; the varied curvature is evaluated in closed form
    and differenced in ``e``. Returns the errors per step and their slope.
    """

    def x(S):
        return np.array([0.4 * np.sin(S), 0.3 * S**2, -0.2 + 0.5 * S])

    def x_s(S):
        return np.array([0.4 * np.cos(S), 0.6 * S, 0.5])

    def th(S):
        return np.array([np.cos(2 * S), 0.3 * S, np.sin(S) ** 2])

    def th_s(S):
        return np.array([-2 * np.sin(2 * S), 0.3, np.sin(2 * S)])

    kappa = right_jacobian(x(S)) @ x_s(S)

    def varied(e):
        # R_e^T R_e' = exp(-e th) K exp(e th) + hat(J(e th) e th')
        return exp_so3(-e * th(S)) @ kappa + right_jacobian(e * th(S)) @ (e * th_s(S))

    expected = th_s(S) + np.cross(kappa, th(S))
    errs = np.array([np.max(np.abs((varied(h) - varied(-h)) / (2 * h) - expected)) for h in steps])
    return errs, loglog_slope(np.array(steps), errs)


# --- dynamics ----------------------------------------------------------------


def energy_run(n_nodes, t_end=1.0, amplitude=0.1, scheme="sbp42"):
    """Clamped-free bending pluck with the default material at half the CFL step."""
    cfg = SimConfig(init=InitSection(kind="bending_pluck", amplitude=amplitude, mode=1, axis=2))
    cfg = cfg.replace(grid={"n_nodes": n_nodes, "scheme": scheme}, time={"t_end": t_end, "cfl": 0.5})
    return simulate(cfg)


def energy_conservation(levels=(101, 201), t_end=1.0):
    """Relative drift per level and the refinement ratios between consecutive levels."""
    drifts = []
    for n in levels:
        traj = energy_run(n, t_end).trajectory
        e0 = traj.ledger[0].total
        drifts.append(max(abs(r.drift) for r in traj.ledger) / e0)
    drifts = np.array(drifts)
    return drifts, drifts[:-1] / drifts[1:]


def closure_refinement(levels=(101, 201, 401), t_end=1.0):
    """Final-time closure residuals per level and the observed orders (two refinements)."""
    res = []
    for n in levels:
        c = energy_run(n, t_end).closure[-1]
        res.append((c.r_eps, c.r_kappa))
    res = np.array(res)
    ds = 1.0 / (np.array(levels) - 1)
    orders = np.log(res[:-1] / res[1:]) / np.log(ds[:-1] / ds[1:])[:, None]
    return res, orders


def power_balance(rng, grid: Grid, bc: BoundarySpec, m: RigidityTensors, n_states=5):
    """Worst |dE/dt - boundary power| along rhs_mobile over admissible random states."""
    from .energy import boundary_flux

    worst = 0.0
    for _ in range(n_states):
        u, _ = random_admissible_state(rng, grid, bc)
        du = rhs_mobile(u, bc, m, grid)
        rate = grid.integrate(
            np.einsum("ni,ni->n", u.v, m.A * du.v)
            + np.einsum("ni,ni->n", u.omega, m.J * du.omega)
            + np.einsum("ni,ni->n", u.eps, m.G * du.eps)
            + np.einsum("ni,ni->n", u.kappa, m.H * du.kappa)
        )
        worst = max(worst, abs(rate - boundary_flux(u, m)))
    return worst


def rigid_comparison(cfg: SimConfig | None = None):
    """Rigid preset against the Euler oracle: max deviation and fitted precession rate."""
    cfg = preset("rigid") if cfg is None else cfg
    result = simulate(cfg)
    traj = result.trajectory
    m = build_tensors(cfg)
    t_ref, w_ref = rigid_euler(cfg.init.omega0, cfg.time.t_end, m)
    times = np.array(traj.times)
    w_sim = np.array([s.omega for s in traj.states])
    idx = np.rint(times / (t_ref[1] - t_ref[0])).astype(int)
    ref = w_ref[idx]
    dev = float(np.max(np.abs(w_sim - ref[:, None, :])))
    w1 = w_sim[:, 0, 0]
    rate0 = axisymmetric_precession_rate(cfg.init.omega0[2], m)

    def model(t, a, rate, phase):
        return a * np.cos(rate * t + phase)

    amp0 = float(np.hypot(w1[0], w_sim[0, 0, 1]))
    with warnings.catch_warnings():
        # the covariance is irrelevant here and scipy warns when it is singular
        warnings.simplefilter("ignore")
        (_, rate, _), _ = curve_fit(model, times, w1, p0=[amp0, rate0, 0.0], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return {
        "times": times,
        "omega_sim": w_sim[:, 0, :],
        "omega_ref": ref,
        "max_deviation": dev,
        "fitted_rate": float(rate),
        "closed_form_rate": float(rate0),
        "rate_rel_error": float(abs(rate - rate0) / abs(rate0)),
    }


def axial_frequency(cfg: SimConfig | None = None):
    """Root-strain oscillation frequency of the longitudinal preset from zero crossings."""
    cfg = preset("longitudinal") if cfg is None else cfg
    traj = simulate(cfg).trajectory
    t = np.array(traj.times)
    y = np.array([s.eps[0, 2] for s in traj.states])
    i = np.nonzero(np.signbit(y[:-1]) != np.signbit(y[1:]))[0]
    tc = t[i] - y[i] * (t[i + 1] - t[i]) / (y[i + 1] - y[i])
    periods = (len(tc) - 1) / 2
    freq = 2 * np.pi * periods / (tc[-1] - tc[0])
    p = cfg.material
    exact = 0.5 * np.pi * np.sqrt(p.E / p.rho) / p.L
    return {"frequency": float(freq), "exact": float(exact), "periods": periods, "rel_error": float(abs(freq / exact - 1))}


def pure_bending(n_nodes=101, quarter_turns=1.0):
    """Static march from a principal-axis root curvature and the arc it should trace.

    The root curvature bends the span through ``quarter_turns`` quarter
    circles. Returns the worst departure of the profiles from constant and of
    the reconstructed centerline from the analytic circular arc.
    """
    m = default_tensors()
    grid = Grid(n_nodes)
    c = quarter_turns * 0.5 * np.pi / grid.L
    kappa0 = np.array([0.0, c, 0.0])
    eps, kappa = static_ivp(np.zeros(3), kappa0, m, grid)
    kin = reconstruct_space(np.zeros(3), np.eye(3), eps, kappa, grid)
    S = grid.S
    arc = np.column_stack([(1 - np.cos(c * S)) / c, np.zeros_like(S), np.sin(c * S) / c])
    return {
        "profile_deviation": float(max(np.max(np.abs(eps)), np.max(np.abs(kappa - kappa0)))),
        "arc_deviation": float(np.max(np.abs(kin.phi - arc))),
    }


# --- Hamiltonian side ----------------------------------------------------------


def hamilton_equivalence(rng, n_states=20, n_nodes=31, bc=CLAMPED_FREE):
    """Worst mismatch between the phase-space rate pushed to director components and rhs_mobile."""
    grid = Grid(n_nodes)
    m = default_tensors()
    worst = {"v_dot": 0.0, "omega_dot": 0.0, "phi_dot": 0.0, "R_dot": 0.0}
    for _ in range(n_states):
        u, kin = random_admissible_state(rng, grid, bc)
        ps = legendre(u, kin, m)
        u_h, _ = inverse_legendre(ps, m, grid)
        rate = hamilton_rhs(ps, bc, m, grid)
        v_dot, w_dot = mobile_tangent(ps, rate, m)
        ref = rhs_mobile(u_h, bc, m, grid)
        vel = TangentState.from_mobile(u_h, kin)
        worst["v_dot"] = max(worst["v_dot"], float(np.max(np.abs(v_dot - ref.v))))
        worst["omega_dot"] = max(worst["omega_dot"], float(np.max(np.abs(w_dot - ref.omega))))
        worst["phi_dot"] = max(worst["phi_dot"], float(np.max(np.abs(rate.phi - vel.phi_dot))))
        worst["R_dot"] = max(worst["R_dot"], float(np.max(np.abs(rate.R - vel.R_dot))))
    return worst


def bracket_consistency(rng, n_probes=5, n_nodes=31, bc=CLAMPED_FREE, amplitude=0.05):
    """Samplers at random non-end nodes: bracket with H against the Hamilton rates.

    Returns the worst errors for position samplers, rotational-momentum
    samplers (reduced bracket against the component rate, plain bracket
    against the transport-free rate), the linear-momentum samplers
    (reported, not asserted) and the worst self-bracket.
    """
    grid = Grid(n_nodes)
    m = default_tensors()
    u, kin = random_admissible_state(rng, grid, bc, amplitude)
    ps = legendre(u, kin, m)
    rate = hamilton_rhs(ps, bc, m, grid)
    sig_free = intrinsic_sigma_rate(ps, rate, m)
    H = hamiltonian_observable(m, grid)
    out = {"phi": 0.0, "sigma": 0.0, "sigma_lie_poisson": 0.0, "p_phi": 0.0, "self": 0.0}
    nodes = rng.integers(1, n_nodes - 1, n_probes)
    comps = rng.integers(0, 3, n_probes)
    for j, c in zip(nodes, comps):
        f_phi, f_sig, f_p = sampler("phi", j, c), sampler("sigma", j, c), sampler("p_phi", j, c)
        out["phi"] = max(out["phi"], abs(bracket(f_phi, H, ps, grid) - rate.phi[j, c]))
        out["sigma"] = max(out["sigma"], abs(bracket(f_sig, H, ps, grid) - sig_free[j, c]))
        lp = bracket(f_sig, H, ps, grid, lie_poisson=True)
        out["sigma_lie_poisson"] = max(out["sigma_lie_poisson"], abs(lp - rate.sigma[j, c]))
        out["p_phi"] = max(out["p_phi"], abs(bracket(f_p, H, ps, grid) - rate.p_phi[j, c]))
        for f in (f_phi, f_sig):
            out["self"] = max(out["self"], abs(bracket(f, f, ps, grid)))
            out["self"] = max(out["self"], abs(bracket(f, H, ps, grid) + bracket(H, f, ps, grid)))
    return {k: float(v) for k, v in out.items()}


def strain_bracket(rng, n_probes=3, n_nodes=31, bc=CLAMPED_FREE, amplitude=0.05):
    """Brackets of strain and curvature samplers with H against the closure rates.

    The closure right-hand sides are taken from rhs_mobile on the same state.
    Returns the worst mismatch for ``eps`` and ``kappa`` samplers; these are
    reported, not asserted.
    """
    grid = Grid(n_nodes)
    m = default_tensors()
    u, kin = random_admissible_state(rng, grid, bc, amplitude)
    ps = legendre(u, kin, m)
    u_h, _ = inverse_legendre(ps, m, grid)
    ref = rhs_mobile(u_h, bc, m, grid)
    H = hamiltonian_observable(m, grid)
    out = {"eps": 0.0, "kappa": 0.0}
    nodes = rng.integers(1, n_nodes - 1, n_probes)
    comps = rng.integers(0, 3, n_probes)
    for j, c in zip(nodes, comps):
        for which in out:
            value = bracket(strain_sampler(which, j, c, grid), H, ps, grid)
            out[which] = max(out[which], abs(value - getattr(ref, which)[j, c]))
    return {k: float(v) for k, v in out.items()}


def duality(rng, n_states=20, n_nodes=31, bc=CLAMPED_FREE):
    """Worst |<p, V> - (L + H)| and |g(V, V) - <p, V>| over random states."""
    grid = Grid(n_nodes)
    m = default_tensors()
    worst_dual = worst_metric = 0.0
    for _ in range(n_states):
        u, kin = random_admissible_state(rng, grid, bc)
        ps = legendre(u, kin, m)
        vel = TangentState.from_mobile(u, kin)
        pair = duality_pairing(ps, vel, grid)
        worst_dual = max(worst_dual, abs(pair - (lagrangian(vel, kin, m, grid) + hamiltonian(ps, m, grid))))
        worst_metric = max(worst_metric, abs(metric(vel, vel, kin, m, grid) - pair))
    return worst_dual, worst_metric


def action_check(rng, n_nodes=201, n_variations=10, bump=1e-3):
    """Stationarity residual of a converged run against a perturbed copy of it."""
    run = energy_run(n_nodes)
    traj = run.trajectory
    m = build_tensors(run.config)
    grid = build_grid(run.config)
    seed = int(rng.integers(2**31))
    res = action_stationarity(traj, m, grid, n_variations, rng=np.random.default_rng(seed))
    bad = action_stationarity(perturb_trajectory(traj, bump), m, grid, n_variations, rng=np.random.default_rng(seed))
    return res, bad
