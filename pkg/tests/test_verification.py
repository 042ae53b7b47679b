import math

import numpy as np
import pytest

from dirac_shell.core.errors import DomainError, NoRootError
from dirac_shell.services import verification


def test_median_spread():
    assert verification.median_spread(np.array([1.0, -1.0, 1.0])) == 1.0
    assert verification.median_spread(np.array([1.0, 2.0, 4.0])) == 2.0


def test_check_bounds():
    assert verification._check("below", 1e-13, 1e-12).passed
    assert not verification._check("above", 1e-11, 1e-12).passed
    assert verification._check("floor", 2e-4, 1e-4, at_least=True).passed
    assert not verification._check("nan", math.nan, 1.0).passed


def test_guarded_check_records_failure():
    def broken():
        raise NoRootError("no bracket")

    result = verification._guarded("broken", 1e-8, broken)
    assert not result.passed
    assert math.isnan(result.value)
    assert "no bracket" in result.detail


def test_unknown_suite():
    with pytest.raises(DomainError):
        verification.run_suite("everything")


def test_symmetry_suite_passes():
    report = verification.run_suite("symmetry")
    assert report.ok
    assert [check.name for check in report.checks] == ["symmetry.eta=+2", "symmetry.eta=-2"]


def test_wronskian_defect():
    assert verification.wronskian_defect(k_max=20, points=15) <= 1e-12


def test_bessel_agreement_with_mpmath():
    assert verification.mpmath_defect(samples=200, seed=7) <= 1e-12


@pytest.mark.slow
def test_bessel_agreement_with_mpmath_full_sample():
    assert verification.mpmath_defect() <= 1e-12


def test_bessel_suite_passes_on_a_subset():
    report = verification.bessel_suite(samples=100)
    assert [check.name for check in report] == ["bessel.wronskian", "bessel.mpmath_agreement"]
    assert all(check.passed for check in report)


@pytest.mark.slow
def test_line_suite_passes():
    assert verification.run_suite("line").ok


@pytest.mark.slow
def test_asymptotics_suite_passes():
    report = verification.run_suite("asymptotics")
    assert report.ok, [check.name for check in report.failures()]


@pytest.mark.slow
def test_exclusion_holds_at_every_order(ev_config):
    checks = verification.exclusion_checks(ev_config, "ev", k_max=50)
    assert [check.name for check in checks] == ["circle.ev.residual_excluded", "circle.ev.determinant_excluded"]
    assert all(check.passed for check in checks), [check.detail for check in checks]
