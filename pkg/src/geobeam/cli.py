"""Command line: ``geobeam simulate|static|rigid|verify <path|name>``.

Exit status 0 on success, 1 when a run or verification fails, 2 for usage,
configuration and I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .config import PRESETS, load_config, preset
from .io import CLOSURE_COLUMNS, write_csv, write_ledger, write_trajectory
from .kinematics import reconstruct_space
from .simulation import build_grid, build_tensors, closure_table, simulate
from .so3 import to_quaternion
from .state import ConfigurationError, NumericFailure
from .static import StaticBVPSpec, static_ivp, static_shoot
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

STATIC_COLUMNS = ("S", "e1", "e2", "e3", "k1", "k2", "k3", "phi_x", "phi_y", "phi_z", "qw", "qx", "qy", "qz")
RIGID_COLUMNS = ("t", "w1_sim", "w2_sim", "w3_sim", "w1_ref", "w2_ref", "w3_ref", "abs_error")


class UsageError(Exception):
    pass


def _config(target):
    if Path(target).is_file():
        return load_config(target)
    if target in PRESETS:
        return preset(target)
    raise UsageError(f"{target!r} is neither a config file nor a preset ({', '.join(PRESETS)})")


def _out_dir(args, cfg):
    out = Path(args.out if args.out is not None else cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args):
    cfg = _config(args.target)
    result = simulate(cfg, rng=np.random.default_rng(args.seed))
    traj = result.trajectory
    out = _out_dir(args, cfg)
    if "trajectory" in cfg.output.formats:
        write_trajectory(traj, out / "trajectory.csv")
    if "ledger" in cfg.output.formats:
        write_ledger(traj.ledger, out / "energy_ledger.csv")
    if "closure" in cfg.output.formats:
        write_csv(out / "closure_residuals.csv", CLOSURE_COLUMNS, closure_table(traj.times, result.closure))
    last = traj.ledger[-1]
    print(f"simulated to t={traj.times[-1]!r} in {len(traj.times)} snapshots, dt={traj.dt!r}")
    print(f"final energy {last.total!r}, drift {last.drift!r}")
    return EXIT_OK


def cmd_static(args):
    cfg = _config(args.target)
    m = build_tensors(cfg)
    grid = build_grid(cfg)
    st = cfg.static
    status = EXIT_OK
    if st.mode == "ivp":
        eps, kappa = static_ivp(st.eps0, st.kappa0, m, grid)
        print("static march from the root values")
    else:
        spec = StaticBVPSpec(st.tip_N, st.tip_M, st.eps0, st.kappa0)
        res = static_shoot(spec, m, grid)
        eps, kappa = res.eps, res.kappa
        print(f"shooting: residual {res.residual!r} after {res.iterations} iterations")
        if not res.converged:
            print("shooting did not converge", file=sys.stderr)
            status = EXIT_FAIL
    kin = reconstruct_space(np.zeros(3), np.eye(3), eps, kappa, grid)
    rows = np.column_stack([grid.S, eps, kappa, kin.phi, to_quaternion(kin.R)])
    write_csv(_out_dir(args, cfg) / "static_profile.csv", STATIC_COLUMNS, rows)
    return status


def cmd_rigid(args):
    cfg = _config(args.target)
    if cfg.init.kind != "rigid_spin" or cfg.model.subspace != "rigid":
        raise ConfigurationError("rigid needs init.kind = rigid_spin and model.subspace = rigid")
    r = ex.rigid_comparison(cfg)
    err = np.max(np.abs(r["omega_sim"] - r["omega_ref"]), axis=1)
    rows = np.column_stack([r["times"], r["omega_sim"], r["omega_ref"], err])
    out = _out_dir(args, cfg)
    write_csv(out / "rigid_comparison.csv", RIGID_COLUMNS, rows)
    keys = ("max_deviation", "fitted_rate", "closed_form_rate", "rate_rel_error")
    summary = [(k, r[k]) for k in keys]
    write_csv(out / "rigid_summary.csv", ("quantity", "value"), summary)
    for k, v in summary:
        print(f"{k}: {v!r}")
    return EXIT_OK


def cmd_verify(args):
    names = list(SUITES) if args.target == "all" else [args.target]
    if any(n not in SUITES for n in names):
        raise UsageError(f"unknown suite {args.target!r}; choose from {', '.join(SUITES)} or all")
    ok = True
    for name in names:
        report = run_suite(name, args.seed)
        print(report.text())
        ok = ok and report.passed
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"simulate": cmd_simulate, "static": cmd_static, "rigid": cmd_rigid, "verify": cmd_verify}


def build_parser():
    p = argparse.ArgumentParser(prog="geobeam", description="Geometrically exact beam dynamics simulator.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("target", help="config file or preset name; suite name (or 'all') for verify")
    p.add_argument("--out", default=None, help="output directory (overrides output.directory)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized initial data and suites")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericFailure as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
