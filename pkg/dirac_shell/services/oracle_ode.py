"""
Bessel-free eigenvalue oracle for the circle model.

The fiber-k system, with v = -i w,

    u' = (k/r) u + (m + z) w
    w' = -((k + 1)/r) w + (m - z) u

is integrated in s = ln r with DOP853: outward from a small-radius series start to R-,
inward from a decaying large-radius start to R+. The solution is renormalized at the end
of every panel and the discarded magnitude accumulated in log_scale. Eigenvalues are the
zeros of the 2x2 transmission determinant built from the two traces.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize
from scipy.integrate import solve_ivp

from dirac_shell.core.config import settings
from dirac_shell.core.errors import DomainError, NoRootError, NonConvergenceError, StiffnessFailure
from dirac_shell.models.circle import CircleConfig, EigenvalueRecord, MatchResult, ShootingState, SolveMethod
from dirac_shell.services.circle_spectrum import accumulation_point, asymptotic_eigenvalue

logger = logging.getLogger(__name__)


def _kinematics(config: CircleConfig, z: float) -> Tuple[float, float]:
    m = config.mass
    if abs(z) >= m:
        raise DomainError(f"z = {z} is outside the gap (-{m}, {m})")
    return math.sqrt((m - z) * (m + z)), math.sqrt((m - z) / (m + z))


def _rhs(k: int, m: float, z: float):
    def fun(s, y):
        r = math.exp(s)
        return [k * y[0] + (m + z) * r * y[1], -(k + 1) * y[1] + (m - z) * r * y[0]]

    return fun


def _integrate(
    config: CircleConfig,
    k: int,
    z: float,
    s_from: float,
    s_to: float,
    y0: Tuple[float, float],
    log_scale: float,
    panels: Optional[int],
    rtol: float,
) -> ShootingState:
    span = abs(s_to - s_from)
    if panels is None:
        panels = max(settings.ORACLE_PANELS, math.ceil(abs(k) * span / 50.0))
    edges = np.linspace(s_from, s_to, panels + 1)
    fun = _rhs(k, config.mass, z)
    y = np.asarray(y0, dtype=float)
    floor = 1e-12 * span / panels

    for a, b in zip(edges[:-1], edges[1:]):
        sol = solve_ivp(fun, (a, b), y, method="DOP853", rtol=rtol, atol=1e-30 * np.max(np.abs(y)))
        if sol.status != 0:
            raise StiffnessFailure(f"k={k}, z={z:.17g}: integrator stopped on [{a:.6g}, {b:.6g}]: {sol.message}")
        if sol.t.size > 2:
            steps = np.abs(np.diff(sol.t[:-1]))
            if np.min(steps) < floor:
                raise StiffnessFailure(f"k={k}, z={z:.17g}: step collapsed to {np.min(steps):.3e}")
        y = sol.y[:, -1]
        norm = float(np.hypot(y[0], y[1]))
        if not norm > 0.0 or not math.isfinite(norm):
            raise StiffnessFailure(f"k={k}, z={z:.17g}: solution norm became {norm}")
        log_scale += math.log(norm)
        y = y / norm

    return ShootingState(r=math.exp(s_to), u=float(y[0]), v_imag=float(y[1]), log_scale=log_scale)


def shoot_interior(
    config: CircleConfig,
    k: int,
    z: float,
    r_start: Optional[float] = None,
    panels: Optional[int] = None,
    rtol: Optional[float] = None,
) -> ShootingState:
    """Regular solution traced from r_start = delta R out to R-."""
    kappa, s = _kinematics(config, z)
    radius = config.radius
    r_start = r_start or settings.INTERIOR_START * radius
    if not 0.0 < r_start < radius:
        raise DomainError(f"interior start {r_start} must lie in (0, R)")

    # leading small-argument terms of (I_k, s I_{k+1})
    half_t = 0.5 * kappa * r_start
    n_u, n_w = abs(k), abs(k + 1)
    log_u = n_u * math.log(half_t) - math.lgamma(n_u + 1)
    log_w = math.log(s) + n_w * math.log(half_t) - math.lgamma(n_w + 1)
    top = max(log_u, log_w)
    y0 = (math.exp(log_u - top), math.exp(log_w - top))

    return _integrate(
        config, k, z, math.log(r_start), math.log(radius), y0, top, panels, rtol or settings.ODE_RTOL
    )


def shoot_exterior(
    config: CircleConfig,
    k: int,
    z: float,
    r_max: Optional[float] = None,
    panels: Optional[int] = None,
    rtol: Optional[float] = None,
) -> ShootingState:
    """Decaying solution traced from r_max inward to R+."""
    kappa, s = _kinematics(config, z)
    radius = config.radius
    r_max = r_max or radius + 40.0 / kappa
    if r_max <= radius:
        raise DomainError(f"exterior start {r_max} must exceed R = {radius}")

    # K_{k+1}/K_k ~ 1 + (2k+1)/(2t) for large t
    t = kappa * r_max
    y0 = (1.0, -s * (1.0 + (2 * k + 1) / (2.0 * t)))
    norm = math.hypot(*y0)
    log_scale = -t - 0.5 * math.log(t) + 0.5 * math.log(0.5 * math.pi) + math.log(norm)
    y0 = (y0[0] / norm, y0[1] / norm)

    return _integrate(
        config, k, z, math.log(r_max), math.log(radius), y0, log_scale, panels, rtol or settings.ODE_RTOL
    )



def matching_determinant(
    config: CircleConfig,
    k: int,
    z: float,
    panels: Optional[int] = None,
    rtol: Optional[float] = None,
) -> MatchResult:
    """Determinant of the transmission conditions on the two unit traces.

    Rows: -[w] = (eta + tau)<u> and [u] = (eta - tau)<w>, with [f] = f(R-) - f(R+).
    """
    u_in, w_in = shoot_interior(config, k, z, panels=panels, rtol=rtol).direction
    u_out, w_out = shoot_exterior(config, k, z, panels=panels, rtol=rtol).direction
    plus, minus = 0.5 * (config.eta + config.tau), 0.5 * (config.eta - config.tau)
    a11 = -w_in - plus * u_in
    a12 = w_out - plus * u_out
    a21 = u_in - minus * w_in
    a22 = -u_out - minus * w_out
    return MatchResult(
        k=k,
        z=z,
        determinant=a11 * a22 - a12 * a21,
        interior_trace=(u_in, w_in),
        exterior_trace=(u_out, w_out),
    )


def _oracle_nodes(config: CircleConfig, k: int) -> List[np.ndarray]:
    m = config.mass
    edge = m * (1.0 - settings.GAP_GUARD)
    z_star = accumulation_point(config).z_star
    guard = settings.Z_STAR_GUARD * m
    n = settings.ORACLE_GRID_SIZE
    nodes = -edge * np.cos(np.pi * np.arange(n) / (n - 1))
    if abs(k) >= settings.ASYMPTOTIC_REGIME_K:
        half_width = 10.0 * m / (config.eta**2 * abs(k))
        nodes = np.concatenate([nodes, np.linspace(z_star - half_width, z_star + half_width, n)])
    nodes = np.concatenate([nodes, [z_star - guard, z_star + guard]])
    nodes = np.unique(nodes[np.abs(nodes) <= edge])
    return [nodes[nodes <= z_star - guard], nodes[nodes >= z_star + guard]]


def oracle_brackets(config: CircleConfig, k: int, panels: Optional[int] = None) -> List[Tuple[float, float]]:
    brackets = []
    for segment in _oracle_nodes(config, k):
        if segment.size < 2:
            continue
        values = np.array([matching_determinant(config, k, float(z), panels).determinant for z in segment])
        for i in np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0.0):
            brackets.append((float(segment[i]), float(segment[i + 1])))
    return sorted(brackets)


def oracle_eigenvalue(
    config: CircleConfig,
    k: int,
    tol: float = 1e-12,
    panels: Optional[int] = None,
) -> EigenvalueRecord:
    """Sign scan and bisection of the matching determinant, independent of any Bessel routine."""
    m = config.mass
    z_star = accumulation_point(config).z_star

    def det(z: float) -> float:
        return matching_determinant(config, k, z, panels).determinant

    brackets = oracle_brackets(config, k, panels)
    if not brackets:
        raise NoRootError(f"k={k}: matching determinant has no sign change in the gap")
    if len(brackets) > 1:
        logger.warning("Oracle found %d sign changes for k=%d: %s", len(brackets), k, brackets)

    records = []
    for lo, hi in brackets:
        try:
            z, info = optimize.bisect(
                det, lo, hi, xtol=tol * m, maxiter=settings.BRENT_MAX_ITER, full_output=True
            )
        except RuntimeError as exc:
            raise NonConvergenceError(f"k={k}: oracle bisection on [{lo}, {hi}] failed: {exc}") from exc
        records.append(
            EigenvalueRecord(
                k=k,
                z=z,
                residual=abs(det(z)),
                bracket=(lo, hi),
                method=SolveMethod.ORACLE,
                z_star=z_star,
                root_count=len(brackets),
                iterations=info.iterations,
                verified=config.coupling.is_critical,
            )
        )
    if len(records) == 1:
        return records[0]
    seed = asymptotic_eigenvalue(config, k, 2) if k != 0 else z_star
    return min(records, key=lambda r: abs(r.z - seed))
