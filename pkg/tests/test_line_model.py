import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dirac_shell.core.errors import CriticalityError, DomainError
from dirac_shell.models.circle import CouplingPair
from dirac_shell.models.line import KQuadrature, LineConfig, LineFormFactor
from dirac_shell.services import line_model as lm
from dirac_shell.services.verification import random_hermite_form_factor


def test_lambda_for_pure_electrostatic_coupling():
    entries = lm.lambda_matrix(CouplingPair(eta=2.0, tau=0.0)).entries
    assert_allclose(entries, [[0.0, -1j], [-1j, 0.0]], atol=1e-15)


def test_lambda_for_mixed_coupling():
    eta = math.sqrt(13.0)
    entries = lm.lambda_matrix(CouplingPair(eta=eta, tau=-3.0)).entries
    assert entries[0, 1] == pytest.approx(-0.5j * (eta + 3.0))
    assert entries[1, 0] == pytest.approx(-0.5j * (eta - 3.0))


def test_lambda_squares_to_minus_identity():
    rng = np.random.default_rng(11)
    for tau, sign in zip(rng.uniform(-10.0, 10.0, 200), rng.choice([-1, 1], 200)):
        coupling = CouplingPair.from_tau(float(tau), int(sign))
        assert lm.lambda_matrix(coupling).square_defect() <= 1e-14
        critical = lm.lambda_matrix(coupling).entries
        general = lm.general_lambda_matrix(coupling.eta, coupling.tau)
        assert np.max(np.abs(general - critical)) <= 1e-14 * max(1.0, np.max(np.abs(critical)))


def test_noncritical_lambda_uses_general_form():
    coupling = CouplingPair(eta=3.0, tau=1.0, allow_noncritical=True)
    entries = lm.lambda_matrix(coupling).entries
    assert_allclose(entries, lm.general_lambda_matrix(3.0, 1.0))
    assert lm.lambda_matrix(coupling).square_defect() > 1e-3


def test_momentum_profile_at_zero(line_b0_config):
    upper, lower = lm.momentum_profile(line_b0_config, 0.0)
    assert abs(upper) == pytest.approx(1.0)
    assert lower == pytest.approx(-1j)


def test_momentum_profile_product_identity(line_tilted_config):
    eta, tau = line_tilted_config.eta, line_tilted_config.tau
    p = tau / eta
    k = np.linspace(-50.0, 50.0, 101)
    upper, lower = lm.momentum_profile(line_tilted_config, k)
    # |P_0|^2 |P_1|^2 = (1 - p^2) (lambda^2 - k^2) = (1 - p^2) 4 / eta^2
    assert_allclose(np.abs(upper * lower) ** 2, (1.0 - p * p) * 4.0 / eta**2 * np.ones_like(k), rtol=1e-10)
    lam = np.sqrt(k * k + 4.0 / eta**2)
    assert_allclose(np.abs(upper) ** 2 + np.abs(lower) ** 2, 2.0 * lam - 2.0 * p * k, rtol=1e-12)


def test_momentum_profile_needs_bound_state():
    config = LineConfig(mass=1.0, coupling=CouplingPair(eta=1.0, tau=2.0, allow_noncritical=True))
    with pytest.raises(CriticalityError):
        lm.momentum_profile(config, 0.0)


def test_hermite_functions_are_orthonormal():
    k, w = lm.momentum_rule(lm.hermite_form_factor(20))
    table = np.array([lm.evaluate_form_factor(lm.hermite_form_factor(n), k).real for n in range(21)])
    gram = (table * w) @ table.T
    assert_allclose(gram, np.eye(21), atol=1e-12)


def test_first_hermite_function():
    k = np.linspace(-3.0, 3.0, 13)
    expected = 2.0 * (2.0 / math.pi) ** 0.25 * k * np.exp(-k * k)
    assert_allclose(lm.evaluate_form_factor(lm.hermite_form_factor(1), k).real, expected, atol=1e-15)


def test_tilted_form_factor_is_unit():
    assert lm.form_factor_norm(lm.tilted_gaussian_form_factor()) == pytest.approx(1.0, abs=1e-12)


def test_hermite_order_limits():
    with pytest.raises(DomainError):
        lm.hermite_form_factor(201)
    with pytest.raises(ValueError):
        LineFormFactor.hermite(np.ones(202))


def test_form_factor_derivative_matches_differences():
    xi = lm.hermite_form_factor(3, shift_y0=0.7)
    k = np.array([-1.0, 0.2, 1.5])
    h = 1e-5
    numeric = (lm.evaluate_form_factor(xi, k + h) - lm.evaluate_form_factor(xi, k - h)) / (2.0 * h)
    assert_allclose(lm.form_factor_derivative(xi, k), numeric, atol=1e-8)


def test_transmission_across_the_line(line_tilted_config):
    xi = lm.tilted_gaussian_form_factor()
    ys = np.linspace(-4.0, 4.0, 17)
    minus = lm.evaluate_psi(line_tilted_config, xi, 0.0, ys, side="minus")
    plus = lm.evaluate_psi(line_tilted_config, xi, 0.0, ys, side="plus")
    mapped = minus @ lm.lambda_matrix(line_tilted_config.coupling).entries.T
    assert np.max(np.linalg.norm(plus - mapped, axis=-1) / np.linalg.norm(plus, axis=-1)) <= 1e-8
    # one-sided limits
    near = lm.evaluate_psi(line_tilted_config, xi, 1e-9, ys)
    assert_allclose(near, plus, rtol=1e-6, atol=1e-12)


def test_side_flag_is_checked(line_b0_config):
    with pytest.raises(DomainError):
        lm.evaluate_psi(line_b0_config, lm.hermite_form_factor(0), 0.0, 0.0, side="left")


def test_grid_matches_pointwise_evaluation(line_b0_config):
    xi = lm.hermite_form_factor(2)
    xs = np.array([-1.5, -0.2, 0.4, 2.0])
    ys = np.array([-1.0, 0.0, 0.5])
    grid = lm.psi_on_grid(line_b0_config, xi, xs, ys)
    points = lm.evaluate_psi(line_b0_config, xi, xs[:, None], ys[None, :])
    assert grid.shape == points.shape == (4, 3, 2)
    assert_allclose(grid, points, rtol=1e-12, atol=1e-15)
    with pytest.raises(DomainError):
        lm.psi_on_grid(line_b0_config, xi, [0.0], ys)


@pytest.mark.parametrize(
    "coefficients, expected",
    [([1.0], 1.0), ([2.0], 2.0), ([1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)], 1.0)],
    ids=["b0", "2b0", "superposition"],
)
def test_norm_identity(line_b0_config, coefficients, expected):
    lhs, rhs = lm.norm_identity(line_b0_config, LineFormFactor.hermite(coefficients))
    assert rhs == pytest.approx(expected, abs=1e-12)
    assert lhs == pytest.approx(rhs, abs=1e-6)


def test_norm_identity_for_random_hermite_combinations(line_b0_config):
    rng = np.random.default_rng(8)
    for _ in range(10):
        xi = random_hermite_form_factor(rng)
        lhs, rhs = lm.norm_identity(line_b0_config, xi)
        assert rhs == pytest.approx(1.0, abs=1e-12)
        assert lhs == pytest.approx(rhs, abs=1e-6)


def test_closed_form_observables_for_electrostatic_line(line_b0_config):
    result = lm.line_observables(line_b0_config, lm.hermite_form_factor(0))
    assert result.sigma3.as_tuple() == pytest.approx((0.0, 1.0))
    assert result.x.mean == pytest.approx(0.0, abs=1e-15)
    assert result.y.mean == pytest.approx(0.0, abs=1e-15)
    assert result.vx.as_tuple() == (0.0, 1.0)


def test_scalar_coupling_shifts_the_profile(line_tilted_config):
    result = lm.line_observables(line_tilted_config, lm.tilted_gaussian_form_factor())
    eta = line_tilted_config.eta
    assert result.sigma3.as_tuple() == pytest.approx((3.0 / eta, 4.0 / eta**2))
    assert result.x.mean < -1e-3
    assert result.x.var > 0.0


def test_shift_moves_the_mean_position(line_b0_config):
    shifted = lm.line_observables(line_b0_config, lm.hermite_form_factor(0, shift_y0=1.5))
    assert shifted.y.mean == pytest.approx(-1.5, abs=1e-12)


def test_observables_require_unit_form_factor(line_b0_config):
    with pytest.raises(DomainError):
        lm.line_observables(line_b0_config, LineFormFactor.hermite([2.0]))


@pytest.mark.slow
@pytest.mark.parametrize("which", ["b0", "tilted"])
def test_closed_form_matches_plane_quadrature(line_b0_config, line_tilted_config, which):
    config, xi = {
        "b0": (line_b0_config, lm.hermite_form_factor(0)),
        "tilted": (line_tilted_config, lm.tilted_gaussian_form_factor()),
    }[which]
    closed = lm.line_observables(config, xi)
    direct = lm.line_observables_quadrature(config, xi)
    for name in ("sigma3", "x", "y", "vx", "vy"):
        assert getattr(direct, name).as_tuple() == pytest.approx(getattr(closed, name).as_tuple(), abs=1e-5)


@pytest.mark.parametrize("which", ["b0", "tilted"])
def test_tail_exponent(line_b0_config, line_tilted_config, which):
    config, xi = {
        "b0": (line_b0_config, lm.hermite_form_factor(0)),
        "tilted": (line_tilted_config, lm.tilted_gaussian_form_factor()),
    }[which]
    rate = lm.fit_tail_exponent(config, xi)
    assert rate == pytest.approx(config.decay_floor, rel=0.02)


def test_laplace_tail_leading_term(line_b0_config):
    xi = lm.hermite_form_factor(0)
    for x in (-30.0, 30.0):
        psi = lm.evaluate_psi(line_b0_config, xi, x, 0.0)
        tail = lm.laplace_tail(line_b0_config, xi, x)
        assert np.linalg.norm(psi) / np.linalg.norm(tail) == pytest.approx(1.0, rel=0.15)


def test_fast_decay_along_the_line(line_b0_config):
    xi = lm.hermite_form_factor(0)
    quad = KQuadrature(nodes=1600)
    near = np.linalg.norm(lm.evaluate_psi(line_b0_config, xi, 1.0, 5.0, quad)) * 5.0**4
    far = np.linalg.norm(lm.evaluate_psi(line_b0_config, xi, 1.0, 40.0, quad)) * 40.0**4
    assert far < 1e-3 * near


def test_free_dirac_equation_off_the_line(line_b0_config, line_tilted_config):
    for config, xi in (
        (line_b0_config, lm.hermite_form_factor(0)),
        (line_tilted_config, lm.tilted_gaussian_form_factor()),
    ):
        residual = lm.apply_free_dirac(config, xi, [-1.0, 1.0, 2.0], [0.3, 0.3, -1.0])
        assert np.max(residual) <= 1e-5
    with pytest.raises(DomainError):
        lm.apply_free_dirac(line_b0_config, lm.hermite_form_factor(0), [0.001], [0.0])


def test_sampled_form_factor_from_csv(tmp_path, line_b0_config):
    k = np.linspace(-6.0, 6.0, 601)
    values = (2.0 / math.pi) ** 0.25 * np.exp(-k * k)
    path = tmp_path / "xi.csv"
    np.savetxt(path, np.column_stack([k, values]), delimiter=",", header="k,re", comments="# ")
    xi = lm.form_factor_from_csv(path)
    assert lm.form_factor_norm(xi) == pytest.approx(1.0, abs=1e-6)
    sampled = lm.line_observables(line_b0_config, xi)
    exact = lm.line_observables(line_b0_config, lm.hermite_form_factor(0))
    assert sampled.x.var == pytest.approx(exact.x.var, abs=1e-6)
    assert sampled.y.var == pytest.approx(exact.y.var, abs=1e-5)


def test_sampled_form_factor_must_vanish_at_edges_for_y(tmp_path, line_b0_config):
    k = np.linspace(-1.0, 1.0, 201)
    values = np.full_like(k, 1.0 / math.sqrt(2.0))
    path = tmp_path / "flat.csv"
    np.savetxt(path, np.column_stack([k, values]), delimiter=",")
    xi = lm.form_factor_from_csv(path)
    with pytest.raises(DomainError):
        lm.line_observables(line_b0_config, xi)
    assert lm.line_observables(line_b0_config, xi, include_y=False).y is None


def test_csv_with_wrong_columns(tmp_path):
    path = tmp_path / "bad.csv"
    np.savetxt(path, np.ones((5, 4)), delimiter=",")
    with pytest.raises(DomainError):
        lm.form_factor_from_csv(path)
