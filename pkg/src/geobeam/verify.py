"""Named property suites with pass/fail reporting."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import experiments as ex
from .state import Grid


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    limit: float
    passed: bool
    relation: str = "<="

    def line(self):
        if self.relation == "reported":
            return f"INFO  {self.name}: {self.measured:.3e} (reported only)"
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.measured:.3e} {self.relation} {self.limit:.3e}"


@dataclass
class Report:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def at_most(self, name, measured, limit):
        self.checks.append(Check(name, float(measured), float(limit), bool(measured <= limit), "<="))

    def at_least(self, name, measured, limit):
        self.checks.append(Check(name, float(measured), float(limit), bool(measured >= limit), ">="))

    def within(self, name, measured, target, tol):
        ok = abs(measured - target) <= tol
        self.checks.append(Check(name, float(measured), float(target), bool(ok), f"== (+-{tol:g})"))

    def report(self, name, measured):
        """Record a measurement without a pass/fail threshold."""
        self.checks.append(Check(name, float(measured), float("nan"), True, "reported"))

    def text(self):
        lines = [f"[{self.suite}]"] + [c.line() for c in self.checks]
        lines.append(f"{self.suite}: {'ok' if self.passed else 'FAILED'}")
        return "\n".join(lines)


def suite_so3(rng):
    r = Report("so3")
    inv = ex.so3_invariants(rng)
    r.at_most("hat/vee round trip", inv["hat_vee_roundtrip"], 0.0)
    r.at_most("antisymmetry of hat", inv["antisymmetry"], 0.0)
    r.at_most("Lie morphism", inv["lie_morphism"], 1e-14)
    r.at_most("isometry", inv["isometry"], 1e-14)
    r.at_most("exp orthogonality (|w| <= 10)", inv["exp_orthogonality"], 1e-12)
    r.at_most("exp group inverse", inv["exp_group_inverse"], 1e-14)
    _, slope = ex.perturbation_identity(*rng.uniform(-1, 1, (3, 3)))
    r.within("perturbation identity slope", slope, 2.0, 0.3)
    _, slope = ex.curvature_variation_identity()
    r.within("curvature variation slope", slope, 2.0, 0.3)
    return r


def suite_energy(rng):
    r = Report("energy")
    drifts, ratios = ex.energy_conservation((101, 201))
    r.at_most("relative drift, n=101", drifts[0], 1e-6)
    r.at_least("drift reduction on refinement", ratios[0], 3.0)
    m = ex.default_tensors()
    r.at_most("instantaneous power balance", ex.power_balance(rng, Grid(41), ex.CLAMPED_FREE, m), 1e-12)
    return r


def suite_hamilton_equivalence(rng):
    r = Report("hamilton-equivalence")
    worst = ex.hamilton_equivalence(rng)
    for key, value in worst.items():
        r.at_most(f"{key} vs mobile system", value, 1e-10)
    dual, met = ex.duality(rng)
    r.at_most("duality <p, V> = L + H", dual, 1e-12)
    r.at_most("metric g(V, V) = <p, V>", met, 1e-12)
    return r


def suite_bracket(rng):
    r = Report("bracket")
    out = ex.bracket_consistency(rng)
    r.at_most("{phi, H} vs phi rate", out["phi"], 1e-6)
    r.at_most("{sigma, H} vs transport-free sigma rate", out["sigma"], 1e-6)
    r.at_most("reduced {sigma, H} vs sigma rate", out["sigma_lie_poisson"], 1e-6)
    r.at_most("antisymmetry", out["self"], 0.0)
    r.report("{p_phi, H} vs linear-momentum rate", out["p_phi"])
    strain = ex.strain_bracket(rng)
    r.report("{eps, H} vs closure rate", strain["eps"])
    r.report("{kappa, H} vs closure rate", strain["kappa"])
    return r


def suite_action(rng):
    r = Report("action")
    res, bad = ex.action_check(rng)
    r.at_most("stationarity residual / perturbed residual", res / bad, 1e-3)
    return r


def suite_closure(rng):
    r = Report("closure")
    _, orders = ex.closure_refinement((101, 201, 401))
    for k, name in enumerate(("eps", "kappa")):
        r.at_least(f"closure order ({name}), first refinement", orders[0, k], 1.5)
        r.at_least(f"closure order ({name}), second refinement", orders[1, k], 1.5)
    return r


SUITES = {
    "so3": suite_so3,
    "energy": suite_energy,
    "hamilton-equivalence": suite_hamilton_equivalence,
    "bracket": suite_bracket,
    "action": suite_action,
    "closure": suite_closure,
}


def run_suite(name, seed=0):
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](np.random.default_rng(seed))
