"""
Normalized bound states of the circle model.

With v = -i w the fiber-k eigenfunction is real:

    r < R:  u = a I_k(kappa r),        w = a s I_{k+1}(kappa r)
    r > R:  u = a c K_k(kappa r),      w = -a c s K_{k+1}(kappa r)

where kappa = sqrt(m^2 - z^2) and s = sqrt((m - z)/(m + z)). The matching constant c
and the normalization a are carried as logarithms; all Bessel ratios entering them
are formed from log values so nothing overflows at large |k|.
"""
import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np

from dirac_shell.core.config import settings
from dirac_shell.core.errors import DomainError, NearSingularDenominator, NonPositiveNormArgument, QuadratureError
from dirac_shell.models.circle import (
    CircleConfig,
    CircleObservables,
    Concentration,
    EigenvalueRecord,
    LargeOrderLaw,
    RadialEigenfunction,
    RadialGrid,
)
from dirac_shell.services import quadrature
from dirac_shell.services.circle_spectrum import solve_eigenvalue
from dirac_shell.services.special_functions import log_bessel_ik

logger = logging.getLogger(__name__)


def _kinematics(config: CircleConfig, z: float) -> Tuple[float, float]:
    m = config.mass
    if abs(z) >= m:
        raise DomainError(f"z = {z} is outside the gap (-{m}, {m})")
    return math.sqrt((m - z) * (m + z)), math.sqrt((m - z) / (m + z))


def _log_orders(k: int, t: float, shifts=(-1, 0, 1, 2)) -> Tuple[Dict[int, float], Dict[int, float]]:
    """log I_{k+j}(t), log K_{k+j}(t) for the requested shifts j (orders folded to |k+j|)."""
    log_i, log_k = {}, {}
    for j in shifts:
        log_i[j], log_k[j] = log_bessel_ik(abs(k + j), t)
    return log_i, log_k


def _scaled_matching(config: CircleConfig, k: int, z: float):
    """c' = c K_k(t_k) / I_k(t_k) together with the Bessel logs at t_k."""
    kappa, s = _kinematics(config, z)
    t = kappa * config.radius
    log_i, log_k = _log_orders(k, t)
    rho1 = math.exp(log_i[1] - log_i[0])
    kap1 = math.exp(log_k[1] - log_k[0])
    g = (config.eta - config.tau) * s
    numerator = g * rho1 - 2.0
    denominator = g * kap1 - 2.0
    scale = max(abs(g * kap1), 2.0)
    if abs(denominator) <= settings.DENOMINATOR_FLOOR or abs(denominator) <= 4.0 * np.finfo(float).eps * scale:
        raise NearSingularDenominator(
            f"k={k}, z={z:.17g}: matching denominator {denominator:.3e} "
            f"vanishes against terms of size {scale:.3e} (t={t:.17g})"
        )
    return numerator / denominator, log_i, log_k, s


def matching_constant(config: CircleConfig, k: int, z: float) -> float:
    """c_k linking the interior I-branch to the exterior K-branch.

    Underflows to zero for very large |k|; ``eigenfunction`` keeps its logarithm.
    """
    c_scaled, log_i, log_k, _ = _scaled_matching(config, k, z)
    return c_scaled * math.exp(log_i[0] - log_k[0])


def _log_normalization(config: CircleConfig, k: int, c_scaled: float, log_i, log_k, s: float) -> float:
    rho = {j: math.exp(log_i[j] - log_i[0]) for j in (-1, 1, 2)}
    kap = {j: math.exp(log_k[j] - log_k[0]) for j in (-1, 1, 2)}
    c2 = c_scaled * c_scaled
    bracket = (
        1.0
        - rho[-1] * rho[1]
        + c2 * (kap[-1] * kap[1] - 1.0)
        + s * s * (rho[1] ** 2 - rho[2] + c2 * (kap[2] - kap[1] ** 2))
    )
    if not bracket > 0.0:
        raise NonPositiveNormArgument(
            f"k={k}: normalization bracket {bracket:.6e} is not positive; (k, z) is not an eigenpair"
        )
    return 0.5 * math.log(2.0) - math.log(config.radius) - log_i[0] - 0.5 * math.log(bracket)


def normalization(config: CircleConfig, k: int, z: float, c_k: Optional[float] = None) -> float:
    """Closed-form a_k > 0 making the radial norm one.

    When c_k is given it replaces the matching constant recomputed from (k, z).
    """
    c_scaled, log_i, log_k, s = _scaled_matching(config, k, z)
    if c_k is not None:
        c_scaled = c_k * math.exp(log_k[0] - log_i[0])
    return math.exp(_log_normalization(config, k, c_scaled, log_i, log_k, s))


def eigenfunction(
    config: CircleConfig,
    k: int,
    record: Optional[EigenvalueRecord] = None,
    tol: Optional[float] = None,
) -> RadialEigenfunction:
    """Solve fiber k (unless a record is supplied) and build its normalized bound state."""
    if record is None:
        record = solve_eigenvalue(config, k, tol)
    elif record.k != k:
        raise DomainError(f"record belongs to k={record.k}, not k={k}")
    return eigenfunction_at(config, k, record.z, record)


def eigenfunction_at(
    config: CircleConfig, k: int, z: float, record: Optional[EigenvalueRecord] = None
) -> RadialEigenfunction:
    """Bound-state construction at a given z; used directly for sensitivity checks."""
    c_scaled, log_i, log_k, s = _scaled_matching(config, k, z)
    log_a = _log_normalization(config, k, c_scaled, log_i, log_k, s)
    log_abs_c = (math.log(abs(c_scaled)) if c_scaled != 0.0 else -math.inf) + log_i[0] - log_k[0]
    return RadialEigenfunction(
        config=config,
        k=k,
        z=z,
        log_abs_c=log_abs_c,
        c_sign=1 if c_scaled >= 0.0 else -1,
        log_a=log_a,
        record=record,
    )


def _real_components(eig: RadialEigenfunction, r) -> Tuple[np.ndarray, np.ndarray]:
    r = np.atleast_1d(np.asarray(r, dtype=float))
    radius = eig.config.radius
    if np.any(r <= 0.0):
        raise DomainError("radial components need r > 0")
    if np.any(r == radius):
        raise DomainError(f"u and v jump at r = R = {radius}; pick a side")
    kappa, s = _kinematics(eig.config, eig.z)
    u = np.empty_like(r)
    w = np.empty_like(r)
    inside = r < radius
    if np.any(inside):
        t = kappa * r[inside]
        log_i0 = log_bessel_ik(abs(eig.k), t)[0]
        log_i1 = log_bessel_ik(abs(eig.k + 1), t)[0]
        u[inside] = np.exp(eig.log_a + log_i0)
        w[inside] = s * np.exp(eig.log_a + log_i1)
    outside = ~inside
    if np.any(outside):
        t = kappa * r[outside]
        log_k0 = log_bessel_ik(abs(eig.k), t)[1]
        log_k1 = log_bessel_ik(abs(eig.k + 1), t)[1]
        scale = eig.log_a + eig.log_abs_c
        u[outside] = eig.c_sign * np.exp(scale + log_k0)
        w[outside] = -eig.c_sign * s * np.exp(scale + log_k1)
    return u, w


def radial_components(eig: RadialEigenfunction, r):
    """(u_k(r), v_k(r)) with v_k = -i w purely imaginary; vectorized in r."""
    scalar = np.ndim(r) == 0
    u, w = _real_components(eig, r)
    v = -1j * w
    if scalar:
        return complex(u[0]), complex(v[0])
    return u.astype(complex), v


def _traces(eig: RadialEigenfunction) -> Tuple[float, float, float, float]:
    """(u, w) at R- and R+, divided by a I_k(t_k)."""
    c_scaled, log_i, log_k, s = _scaled_matching(eig.config, eig.k, eig.z)
    rho1 = math.exp(log_i[1] - log_i[0])
    kap1 = math.exp(log_k[1] - log_k[0])
    return 1.0, s * rho1, c_scaled, -c_scaled * s * kap1


def boundary_residual(eig: RadialEigenfunction) -> Tuple[float, float]:
    """Both transmission conditions at r = R, relative to the largest trace."""
    u_in, w_in, u_out, w_out = _traces(eig)
    eta, tau = eig.config.eta, eig.config.tau
    # -i [v] = (eta + tau) <u>  and  -i [u] = (eta - tau) <v>, with [f] = f(R-) - f(R+)
    res_v = abs(-(w_in - w_out) - (eta + tau) * 0.5 * (u_in + u_out))
    res_u = abs((u_in - u_out) - (eta - tau) * 0.5 * (w_in + w_out))
    scale = max(abs(u_in), abs(w_in), abs(u_out), abs(w_out))
    return res_v / scale, res_u / scale


def default_grid(eig: RadialEigenfunction, n: Optional[int] = None) -> RadialGrid:
    return quadrature.radial_grid(eig.config.radius, eig.decay_rate, n=n)


def _moments(eig: RadialEigenfunction, grid: RadialGrid) -> Dict[str, float]:
    r, weights = grid.nodes, grid.weights
    u, w = _real_components(eig, r)
    v = -1j * w
    return {
        "norm": float(np.sum(weights * (u * u + w * w) * r)),
        "sigma3": float(np.sum(weights * (u * u - w * w) * r)),
        "v_theta": float(-2.0 * np.sum(weights * u * w)),
        "v_r": float(np.sum(weights * 2.0 * np.real(np.conj(u) * v) * r)),
    }


def norm_quadrature(eig: RadialEigenfunction, grid: Optional[RadialGrid] = None) -> float:
    """Integral of (|u|^2 + |v|^2) r dr; equals one for a normalized state."""
    return _moments(eig, grid or default_grid(eig))["norm"]


def observables(
    eig: RadialEigenfunction,
    grid: Optional[RadialGrid] = None,
    tol: float = 1e-8,
) -> CircleObservables:
    """<sigma_3>, <v_theta> and <v_r> by quadrature.

    The error estimate compares the grid against the same panels at half the nodes.
    """
    n = settings.QUAD_NODES_PER_PANEL
    fine = _moments(eig, grid or default_grid(eig, n))
    coarse = _moments(eig, default_grid(eig, max(2, n // 2)))
    estimate = max(abs(fine[key] - coarse[key]) for key in ("norm", "sigma3", "v_theta"))
    if estimate > tol:
        raise QuadratureError(
            f"k={eig.k}: observable quadrature estimate {estimate:.3e} exceeds {tol:.1e}",
            estimate=estimate,
        )
    logger.debug("k=%d: <v_r> by quadrature = %.3e", eig.k, fine["v_r"])
    return CircleObservables(
        norm=fine["norm"],
        sigma3=fine["sigma3"],
        v_theta=fine["v_theta"],
        v_r=0.0,
        v_r_quadrature=fine["v_r"],
        error_estimate=estimate,
    )


def density_grid(eig: RadialEigenfunction, r_points, theta_points) -> np.ndarray:
    """|psi_k(r, theta)|^2 on the tensor grid, rows indexed by r."""
    r = np.asarray(r_points, dtype=float)
    theta = np.asarray(theta_points, dtype=float)
    u, w = _real_components(eig, r)
    norm = 1.0 / math.sqrt(2.0 * math.pi)
    upper = norm * u[:, None] * np.exp(1j * eig.k * theta)[None, :]
    lower = norm * (-1j * w)[:, None] * np.exp(1j * (eig.k + 1) * theta)[None, :]
    return np.abs(upper) ** 2 + np.abs(lower) ** 2


def concentration(eig: RadialEigenfunction, grid: Optional[RadialGrid] = None) -> Concentration:
    """Where |psi_k|^2 peaks and its weighted mean distance from the circle."""
    grid = grid or default_grid(eig)
    r, weights = grid.nodes, grid.weights
    u, w = _real_components(eig, r)
    density = (u * u + w * w) / (2.0 * math.pi)
    peak = int(np.argmax(density))
    mean_distance = float(np.sum(weights * 2.0 * math.pi * density * r * np.abs(r - grid.radius)))
    return Concentration(
        peak_radius=float(r[peak]),
        peak_side="interior" if r[peak] < grid.radius else "exterior",
        peak_density=float(density[peak]),
        mean_distance=mean_distance,
    )


def _derivative(f, r: np.ndarray, h: np.ndarray) -> np.ndarray:
    return (f(r - 2 * h) - 8.0 * f(r - h) + 8.0 * f(r + h) - f(r + 2 * h)) / (12.0 * h)


def radial_dirac_residual(eig: RadialEigenfunction, r, h: Optional[float] = None) -> np.ndarray:
    """Relative residual of the radial Dirac expression applied by finite differences.

    Returns |(H - z)(u, w)| / (m |(u, w)|) at every r, with derivatives from a
    fourth-order central stencil that stays on one side of R.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    radius = eig.config.radius
    room = np.minimum(r, np.abs(r - radius))
    if h is None:
        step = 2e-4 * room
    else:
        step = np.full_like(r, h)
        if np.any(2.0 * step >= room):
            raise DomainError("finite-difference stencil would cross r = 0 or r = R")

    m, z, k = eig.config.mass, eig.z, eig.k
    u, w = _real_components(eig, r)
    du = _derivative(lambda x: _real_components(eig, x)[0], r, step)
    dw = _derivative(lambda x: _real_components(eig, x)[1], r, step)
    # H(u, w) = (m u - w' - (k+1) w / r,  -m w + u' - k u / r)
    upper = m * u - dw - (k + 1) * w / r - z * u
    lower = -m * w + du - k * u / r - z * w
    return np.hypot(upper, lower) / (m * np.hypot(u, w))


def large_k_asymptotics(config: CircleConfig, k: int) -> LargeOrderLaw:
    """Leading large-|k| laws for c_k and a_k (upper signs for k > 0)."""
    if k == 0:
        raise DomainError("large-order laws need k != 0")
    m, radius = config.mass, config.radius
    eta, tau = config.eta, config.tau
    n = abs(k)
    sign = 1 if k > 0 else -1
    log_base = math.log(math.e * m * radius / (abs(eta) * n))
    log_abs_c = -sign - math.log(math.pi) + (2 * n + sign) * log_base

    p = tau / eta
    bracket = math.exp(-p) + (eta + tau) / (eta - tau) * math.exp(p)
    log_l = 0.5 * math.log(2.0) - math.log(radius) - 0.5 * math.log(bracket)
    log_a = 0.5 * math.log(2.0 * math.pi) + log_l + math.log(n) - n * log_base
    if k < 0:
        log_a += math.log(m * radius / (abs(eta) * n))
    return LargeOrderLaw(k=k, log_abs_c=log_abs_c, c_sign=-1 if eta > 0 else 1, log_a=log_a)
