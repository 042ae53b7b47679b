import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import special

from dirac_shell.core.config import settings
from dirac_shell.core.errors import DomainError
from dirac_shell.services import special_functions as sf

EPS = np.finfo(float).eps


def reference_log_ik(k, t):
    with mpmath.workdps(40):
        return float(mpmath.log(mpmath.besseli(k, t))), float(mpmath.log(mpmath.besselk(k, t)))


@pytest.mark.parametrize("k", [0, 1, 5, 30, 60, 250])
@pytest.mark.parametrize("t", [1e-4, 0.5, 3.0, 40.0, 600.0])
def test_logs_match_mpmath(k, t):
    ours = sf.log_bessel_ik(k, t)
    reference = reference_log_ik(k, t)
    for a, b in zip(ours, reference):
        assert abs(math.expm1(a - b)) <= 1e-12 + 4.0 * EPS * abs(b)


def reference_scaled_ik(k, t):
    with mpmath.workdps(40):
        x = mpmath.mpf(t)
        return float(mpmath.besseli(k, x) * mpmath.exp(-x)), float(mpmath.besselk(k, x) * mpmath.exp(x))


@pytest.mark.parametrize("k", [0, 1, 7, 23, 50])
@pytest.mark.parametrize("t", [1e-4, 0.03, 1.0, 9.5, 75.0, 300.0])
def test_scaled_values_match_mpmath(k, t):
    ref_i, ref_k = reference_scaled_ik(k, t)
    assert sf.bessel_i_scaled(k, t) == pytest.approx(ref_i, rel=1e-12)
    assert sf.bessel_k_scaled(k, t) == pytest.approx(ref_k, rel=1e-12)


@pytest.mark.parametrize("t", [5.0, 20.0, 50.0])
def test_continuous_across_large_order_threshold(t):
    threshold = settings.LARGE_ORDER_THRESHOLD
    for k in (threshold - 1, threshold):
        assert t < k / 3.0
        with mpmath.workdps(40):
            def product(n):
                return mpmath.besseli(n, t) * mpmath.besselk(n, t)

            expected_product = float(product(k))
            expected_ratio = float(product(k + 1) / product(k))
        ref_i, ref_k = reference_scaled_ik(k, t)
        assert sf.product_ik(k, t) == pytest.approx(expected_product, rel=1e-12)
        assert sf.ratio_f(k, t) == pytest.approx(expected_ratio, rel=1e-12)
        assert sf.bessel_i_scaled(k, t) == pytest.approx(ref_i, rel=1e-12)
        assert sf.bessel_k_scaled(k, t) == pytest.approx(ref_k, rel=1e-12)
    below, above = sf.ratio_f(threshold - 1, t), sf.ratio_f(threshold, t)
    assert 0.0 < below < above < 1.0


def test_wronskian_on_log_grid():
    t = np.logspace(-4.0, math.log10(600.0), 25)
    for k in range(0, 61, 3):
        log_i0, log_k0 = sf.log_bessel_ik(k, t)
        log_i1, log_k1 = sf.log_bessel_ik(k + 1, t)
        w = np.exp(np.log(t) + log_i0 + log_k1) + np.exp(np.log(t) + log_i1 + log_k0)
        assert np.max(np.abs(w - 1.0)) <= 1e-12


def test_scaled_values_match_scipy():
    t = np.array([0.1, 1.0, 7.5, 55.0, 300.0])
    for k in (0, 1, 2, 10, 30):
        assert_allclose(sf.bessel_i_scaled(k, t), special.ive(k, t), rtol=1e-12)
        assert_allclose(sf.bessel_k_scaled(k, t), special.kve(k, t), rtol=1e-12)


def test_sequence_matches_single_orders():
    sequence = sf.bessel_i_scaled_sequence(20, 7.5)
    assert sequence.shape == (21,)
    assert_allclose(sequence, [sf.bessel_i_scaled(j, 7.5) for j in range(21)], rtol=1e-13)


def test_scalar_in_scalar_out():
    assert isinstance(sf.bessel_i_scaled(3, 2.0), float)
    pair = sf.log_bessel_ik(3, 2.0)
    assert all(isinstance(v, float) for v in pair)
    assert sf.log_bessel_ik(3, np.array([[1.0, 2.0], [3.0, 4.0]]))[0].shape == (2, 2)


def test_debye_agrees_with_mpmath_at_large_order():
    log_i, log_k = sf.debye_log_ik(250, 50.0)
    ref_i, ref_k = reference_log_ik(250, 50.0)
    assert abs(math.expm1(log_i - ref_i)) <= 1e-12
    assert abs(math.expm1(log_k - ref_k)) <= 1e-12


def test_large_orders_do_not_overflow():
    log_i, log_k = sf.log_bessel_ik(1000, 0.5)
    assert math.isfinite(log_i) and math.isfinite(log_k)
    assert log_i < -5000.0 < 5000.0 < log_k
    assert math.isfinite(sf.product_ik(1000, 0.5))


@pytest.mark.parametrize("k", [-7, -1, 0, 3, 10, 45])
@pytest.mark.parametrize("t", [0.05, 1.0, 12.0])
def test_product_and_ratio_match_mpmath(k, t):
    with mpmath.workdps(40):
        def product(n):
            return mpmath.besseli(abs(n), t) * mpmath.besselk(abs(n), t)

        expected_product = float(product(k))
        expected_ratio = float(product(k + 1) / product(k))
    assert sf.product_ik(k, t) == pytest.approx(expected_product, rel=1e-12)
    assert sf.ratio_f(k, t) == pytest.approx(expected_ratio, rel=1e-12)


def test_ratio_below_one_for_nonnegative_orders_and_reflected_below():
    t = np.logspace(-3, 2, 30)
    for k in range(0, 40):
        f = sf.ratio_f(k, t)
        assert np.all((f > 0.0) & (f < 1.0))
        assert_allclose(sf.ratio_f(-k - 1, t), 1.0 / f, rtol=1e-15)


def test_product_ratio_model():
    record = sf.product_ratio(4, 2.0)
    assert record.ratio_f == pytest.approx(sf.product_ik(5, 2.0) / sf.product_ik(4, 2.0), rel=1e-13)


def test_scaled_pair_model():
    pair = sf.scaled_pair(2, 3.0)
    assert pair.i_scaled == pytest.approx(special.ive(2, 3.0), rel=1e-13)
    assert pair.k_scaled == pytest.approx(special.kve(2, 3.0), rel=1e-13)


def test_large_order_expansion_value():
    assert sf.large_order_ratio_expansion(100, 1.0, 3) == pytest.approx(0.9901, abs=1e-15)
    assert sf.large_order_ratio_expansion(100, 1.0, 1) == pytest.approx(0.99, abs=1e-15)


@pytest.mark.parametrize("t", [0.5, 1.0])
def test_large_order_expansion_error_is_fourth_order(t):
    for k in (50, 100, 200):
        error = abs(sf.ratio_f(k, t) - sf.large_order_ratio_expansion(k, t, 3))
        assert error * k**4 < 5.0


def test_limit_laws():
    assert sf.small_argument_i(5, 1e-3) == pytest.approx(special.iv(5, 1e-3), rel=1e-6)
    i_law, k_law = sf.large_argument_ik(500.0)
    assert i_law == pytest.approx(special.ive(0, 500.0), rel=1e-3)
    assert k_law == pytest.approx(special.kve(0, 500.0), rel=1e-3)


def test_miller_start_grows_with_order_and_argument():
    assert sf.miller_start(10, 1.0) > 10
    assert sf.miller_start(10, 400.0) > sf.miller_start(10, 1.0)


@pytest.mark.parametrize("t", [0.0, -1.0, math.nan, 701.0])
def test_rejects_bad_arguments(t):
    with pytest.raises(DomainError):
        sf.log_bessel_ik(3, t)


def test_rejects_negative_order():
    with pytest.raises(DomainError):
        sf.log_bessel_ik(-2, 1.0)
    with pytest.raises(DomainError):
        sf.bessel_i_scaled(-1, 1.0)


def test_expansion_rejects_order_zero():
    with pytest.raises(DomainError):
        sf.large_order_ratio_expansion(0, 1.0)
    with pytest.raises(DomainError):
        sf.large_order_ratio_expansion(5, 1.0, order=4)
