import math

import pytest

from geobeam.verify import SUITES, Report, run_suite


class TestReport:
    def test_thresholds(self):
        r = Report("demo")
        r.at_most("small", 1e-15, 1e-14)
        r.at_least("order", 1.9, 1.5)
        r.within("slope", 2.05, 2.0, 0.2)
        assert r.passed
        r.at_most("large", 1.0, 0.5)
        assert not r.passed
        assert r.text().splitlines()[-2].startswith("FAIL  large")
        assert r.text().endswith("demo: FAILED")

    def test_reported_lines_never_fail(self):
        r = Report("demo")
        r.report("aside", 3.0)
        assert r.passed
        assert math.isnan(r.checks[0].limit)
        assert "reported only" in r.text()


class TestSuites:
    def test_names(self):
        assert set(SUITES) == {"so3", "energy", "hamilton-equivalence", "bracket", "action", "closure"}

    def test_unknown(self):
        with pytest.raises(KeyError):
            run_suite("nope")

    def test_seeded(self):
        a = run_suite("so3", seed=3).text()
        assert a == run_suite("so3", seed=3).text()
