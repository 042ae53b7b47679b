import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import special

from dirac_shell.core.errors import DomainError
from dirac_shell.services import circle_eigenfunctions as eigen
from dirac_shell.services.circle_spectrum import solve_eigenvalue
from dirac_shell.services.verification import large_order_slopes


@pytest.fixture(scope="module")
def tau0_states(tau0_config, tau0_sweep):
    records = {r.k: r for r in tau0_sweep.records}
    return {k: eigen.eigenfunction(tau0_config, k, record=records[k]) for k in range(-40, 41)}


def test_boundary_conditions_and_norm(tau0_states):
    for eig in tau0_states.values():
        res_v, res_u = eigen.boundary_residual(eig)
        assert res_v <= 1e-10 and res_u <= 1e-10
        assert abs(eigen.norm_quadrature(eig) - 1.0) <= 1e-8
        assert eig.a_norm > 0.0


@pytest.mark.parametrize("k", [-7, -1, 0, 2, 9])
def test_boundary_conditions_with_scalar_coupling(ev_config, k):
    eig = eigen.eigenfunction(ev_config, k)
    assert max(eigen.boundary_residual(eig)) <= 1e-10
    assert abs(eigen.norm_quadrature(eig) - 1.0) <= 1e-8


def test_boundary_residual_detects_wrong_energy(tau0_config):
    z = solve_eigenvalue(tau0_config, 2).z
    shifted = eigen.eigenfunction_at(tau0_config, 2, z * (1.0 + 1e-4))
    assert max(eigen.boundary_residual(shifted)) > 1e-6


def test_record_must_match_fiber(tau0_config):
    record = solve_eigenvalue(tau0_config, 1)
    with pytest.raises(DomainError):
        eigen.eigenfunction(tau0_config, 2, record=record)


def test_matching_constant_is_stored_as_log(tau0_states):
    eig = tau0_states[3]
    c = eigen.matching_constant(eig.config, 3, eig.z)
    assert eig.c_match == pytest.approx(c, rel=1e-12)
    assert eig.a_norm == pytest.approx(eigen.normalization(eig.config, 3, eig.z), rel=1e-12)
    assert eig.j3 == pytest.approx(3.5)


def test_sign_of_matching_constant_follows_eta(tau0_config):
    flipped = tau0_config.model_copy(update={"coupling": tau0_config.coupling.model_copy(update={"eta": -2.0})})
    for config in (tau0_config, flipped):
        expected = -1 if config.eta > 0 else 1
        for k in (-30, 30):
            eig = eigen.eigenfunction(config, k)
            assert eig.c_sign == expected
            assert eigen.large_k_asymptotics(config, k).c_sign == expected


def test_components_inside_follow_first_kind(tau0_states):
    eig = tau0_states[3]
    kappa = eig.decay_rate
    s = math.sqrt((1.0 - eig.z) / (1.0 + eig.z))
    r = np.array([0.1, 0.4, 0.9])
    u, v = eigen.radial_components(eig, r)
    assert_allclose(u.real, eig.a_norm * special.iv(3, kappa * r), rtol=1e-12)
    assert_allclose(v.imag, -eig.a_norm * s * special.iv(4, kappa * r), rtol=1e-12)
    assert np.all(u.imag == 0.0) and np.all(v.real == 0.0)


def test_components_outside_follow_second_kind(tau0_states):
    eig = tau0_states[3]
    kappa = eig.decay_rate
    r = np.array([1.2, 2.5, 6.0])
    u, _ = eigen.radial_components(eig, r)
    assert_allclose(u.real, eig.a_norm * eig.c_match * special.kv(3, kappa * r), rtol=1e-12)


def test_components_reject_circle_and_origin(tau0_states):
    eig = tau0_states[0]
    with pytest.raises(DomainError):
        eigen.radial_components(eig, 1.0)
    with pytest.raises(DomainError):
        eigen.radial_components(eig, 0.0)
    u, v = eigen.radial_components(eig, 0.5)
    assert isinstance(u, complex) and isinstance(v, complex)


def test_density_is_rotation_invariant(tau0_states):
    eig = tau0_states[5]
    r = np.array([0.3, 0.99, 1.01, 2.0])
    theta = np.linspace(0.0, 2.0 * math.pi, 9)
    grid = eigen.density_grid(eig, r, theta)
    assert grid.shape == (4, 9)
    assert_allclose(grid, grid[:, :1] * np.ones_like(theta), rtol=1e-14)


def test_density_integrates_to_one(tau0_states):
    eig = tau0_states[-4]
    grid = eigen.default_grid(eig)
    theta = 2.0 * math.pi * np.arange(8) / 8
    density = eigen.density_grid(eig, grid.nodes, theta)
    total = np.sum(grid.weights * grid.nodes * density.mean(axis=1)) * 2.0 * math.pi
    assert total == pytest.approx(1.0, abs=1e-8)


def test_observables(tau0_states):
    for k in (-5, 0, 4):
        result = eigen.observables(tau0_states[k])
        assert result.norm == pytest.approx(1.0, abs=1e-8)
        assert abs(result.v_r_quadrature) <= 1e-12
        assert result.v_r == 0.0
        assert result.error_estimate <= 1e-8
        assert -1.0 <= result.sigma3 <= 1.0


def test_concentration_on_the_circle(tau0_states):
    distances = []
    for k in (10, 20, 30, 40):
        result = eigen.concentration(tau0_states[k])
        assert 0.9 <= result.peak_radius <= 1.1
        distances.append(result.mean_distance)
    assert all(a > b for a, b in zip(distances, distances[1:]))


def test_density_off_the_circle_decreases_with_k(tau0_states):
    for r in (0.5, 2.0):
        values = [float(eigen.density_grid(tau0_states[k], [r], [0.0])[0, 0]) for k in range(10, 41, 5)]
        assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("k", [-3, 0, 1, 5, 10])
def test_radial_dirac_residual(tau0_states, k):
    r = np.array([0.5, 0.8, 1.3, 2.0])
    assert np.max(eigen.radial_dirac_residual(tau0_states[k], r)) <= 1e-6


def test_radial_dirac_stencil_must_stay_on_one_side(tau0_states):
    with pytest.raises(DomainError):
        eigen.radial_dirac_residual(tau0_states[0], [0.999], h=1e-3)


def test_large_order_slopes(tau0_config):
    slopes = large_order_slopes(tau0_config, range(20, 61, 5))
    assert slopes["c"] == pytest.approx(1.0, abs=0.05)
    assert slopes["a"] == pytest.approx(1.0, abs=0.05)
    negative = large_order_slopes(tau0_config, range(-60, -19, 5))
    assert negative["c"] == pytest.approx(1.0, abs=0.05)


def test_large_order_law_rejects_zero(tau0_config):
    with pytest.raises(DomainError):
        eigen.large_k_asymptotics(tau0_config, 0)
