"""
In-gap eigenvalues of the critical circle Hamiltonian, one angular momentum fiber at a time.

For fixed k the eigenvalues are the zeros of

    (eta - tau)(m - z) f_k(t) / ((eta + tau)(m + z)) - 1,   t = sqrt(m^2 - z^2) R,

located by a sign scan over a Chebyshev grid of the open gap and refined by Brent's method.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import optimize

from dirac_shell.core.config import settings
from dirac_shell.core.errors import DiracShellError, DomainError, NoRootError, NonConvergenceError
from dirac_shell.models.circle import CircleConfig, EigenvalueRecord, GapPoint, SolveMethod
from dirac_shell.services.special_functions import ratio_f

logger = logging.getLogger(__name__)

Bracket = Tuple[float, float]


class SweepFailure(BaseModel):
    """A fiber, or one bracket of it, whose solve raised instead of returning a record."""

    model_config = ConfigDict(frozen=True)

    k: int
    error: str
    message: str
    bracket: Optional[Tuple[float, float]] = None


class SpectrumSweep(BaseModel):
    model_config = ConfigDict(frozen=True)

    config: CircleConfig
    z_star: float
    records: List[EigenvalueRecord]
    failures: List[SweepFailure]

    @property
    def ok(self) -> bool:
        return not self.failures


def accumulation_point(config: CircleConfig) -> GapPoint:
    p = -config.coupling.ratio
    return GapPoint(z_star=p * config.mass, p=p)


def n0_threshold(config: CircleConfig) -> Optional[int]:
    """Index beyond which the fiber equation has exactly one root.

    None when tau = 0, where the bound degenerates.
    """
    p = abs(config.coupling.ratio)
    if p == 0.0:
        return None
    return max(0, math.ceil((1.0 / p - 1.0) / 2.0))


def eigenvalue_residual(config: CircleConfig, k: int, z):
    """Left-hand side of the fiber eigenvalue equation minus one; vectorized in z."""
    m, radius = config.mass, config.radius
    eta, tau = config.eta, config.tau
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) >= m):
        raise DomainError(f"z must lie in the open gap (-{m}, {m})")
    t = radius * np.sqrt((m - z) * (m + z))
    prefactor = (eta - tau) * (m - z) / ((eta + tau) * (m + z))
    out = prefactor * ratio_f(k, t) - 1.0
    return float(out) if scalar else out


def asymptotic_eigenvalue(config: CircleConfig, k: int, order: int = 3) -> float:
    """Large-|k| expansion of z_k in powers of 1/k, truncated at `order`."""
    if k == 0:
        raise DomainError("asymptotic expansion needs k != 0")
    if order not in (0, 1, 2, 3):
        raise DomainError(f"order must be in 0..3, got {order}")
    m, radius = config.mass, config.radius
    eta, tau = config.eta, config.tau
    coefficients = (
        -tau / eta,
        -2.0 / eta**2,
        (eta + tau) / eta**3,
        ((4.0 * m * radius) ** 2 - (eta + tau) ** 2) / (2.0 * eta**4),
    )
    return m * sum(c / float(k) ** j for j, c in enumerate(coefficients[: order + 1]))


def _scan_nodes(config: CircleConfig, k: int, grid_size: int) -> Tuple[np.ndarray, np.ndarray]:
    """Ascending scan nodes left and right of z*, guard interval removed."""
    m = config.mass
    edge = m * (1.0 - settings.GAP_GUARD)
    z_star = accumulation_point(config).z_star
    guard = settings.Z_STAR_GUARD * m

    j = np.arange(grid_size)
    nodes = -edge * np.cos(np.pi * j / (grid_size - 1))

    if abs(k) >= settings.ASYMPTOTIC_REGIME_K:
        half_width = 10.0 * m / (config.eta**2 * abs(k))
        n_window = max(64, math.ceil(4.0 * grid_size * 2.0 * half_width / (math.pi * m)))
        window = np.linspace(z_star - half_width, z_star + half_width, n_window)
        nodes = np.concatenate([nodes, window[np.abs(window) < edge]])

    nodes = np.concatenate([nodes, [z_star - guard, z_star + guard]])
    nodes = np.unique(nodes[np.abs(nodes) <= edge])
    left = nodes[nodes <= z_star - guard]
    right = nodes[nodes >= z_star + guard]
    return left, right


def bracket_roots(config: CircleConfig, k: int, grid_size: Optional[int] = None) -> List[Bracket]:
    """Every sign-change interval of the residual on the scan grid.

    Nodes are never paired across the guard interval around z*.
    """
    grid_size = grid_size or settings.GRID_SIZE
    if grid_size < 64:
        raise DomainError(f"grid_size must be at least 64, got {grid_size}")

    brackets: List[Bracket] = []
    for segment in _scan_nodes(config, k, grid_size):
        if segment.size < 2:
            continue
        values = eigenvalue_residual(config, k, segment)
        signs = np.sign(values)
        for i in np.flatnonzero(signs == 0.0):
            brackets.append((float(segment[i]), float(segment[i])))
        for i in np.flatnonzero(signs[:-1] * signs[1:] < 0.0):
            brackets.append((float(segment[i]), float(segment[i + 1])))

    brackets.sort()
    if not brackets:
        logger.warning("No sign change for k=%d on %d-node grid", k, grid_size)
    return brackets


def _refine(config: CircleConfig, k: int, bracket: Bracket, tol: float, method: SolveMethod):
    m = config.mass
    lo, hi = bracket
    if lo == hi:
        return lo, bracket, 0

    def residual(z: float) -> float:
        return eigenvalue_residual(config, k, z)

    xtol = tol * m
    try:
        if method == SolveMethod.BISECTION:
            z, info = optimize.bisect(
                residual, lo, hi, xtol=xtol, maxiter=settings.BRENT_MAX_ITER, full_output=True
            )
        else:
            z, info = optimize.brentq(
                residual, lo, hi, xtol=xtol, maxiter=settings.BRENT_MAX_ITER, full_output=True
            )
    except RuntimeError as exc:
        raise NonConvergenceError(
            f"k={k}: refinement of [{lo:.17g}, {hi:.17g}] failed after "
            f"{settings.BRENT_MAX_ITER} iterations: {exc}"
        ) from exc

    # shrink the reported bracket to a verified sign change around z
    delta = max(xtol, 4.0 * np.finfo(float).eps * abs(z))
    a, b = max(lo, z - delta), min(hi, z + delta)
    if a < b and residual(a) * residual(b) <= 0.0:
        bracket = (a, b)
    return z, bracket, info.iterations


def _refine_brackets(
    config: CircleConfig,
    k: int,
    tol: Optional[float],
    method: SolveMethod,
    grid_size: Optional[int],
) -> Tuple[List[EigenvalueRecord], List[Tuple[Bracket, DiracShellError]]]:
    """Refine every sign change of fiber k; a failing bracket does not discard the others."""
    tol = settings.DEFAULT_TOL if tol is None else tol
    if tol < 1e-14:
        raise DomainError(f"tol must be at least 1e-14, got {tol}")

    brackets = bracket_roots(config, k, grid_size)
    if not brackets:
        raise NoRootError(f"k={k}: no sign change of the residual in the gap")

    z_star = accumulation_point(config).z_star
    verified = config.coupling.is_critical
    records: List[EigenvalueRecord] = []
    errors: List[Tuple[Bracket, DiracShellError]] = []
    for bracket in brackets:
        try:
            z, final_bracket, iterations = _refine(config, k, bracket, tol, method)
            residual = abs(eigenvalue_residual(config, k, z))
            if residual > settings.RESIDUAL_TOL:
                raise NonConvergenceError(
                    f"k={k}: |residual| = {residual:.3e} at z = {z:.17g} exceeds {settings.RESIDUAL_TOL:g}"
                )
        except DiracShellError as exc:
            logger.warning("k=%d: bracket [%.17g, %.17g] failed: %s", k, bracket[0], bracket[1], exc)
            errors.append((bracket, exc))
            continue
        records.append(
            EigenvalueRecord(
                k=k,
                z=z,
                residual=residual,
                bracket=final_bracket,
                method=method,
                z_star=z_star,
                root_count=len(brackets),
                iterations=iterations,
                verified=verified,
            )
        )

    if len(brackets) > 1:
        logger.warning(
            "Multiplicity anomaly at k=%d: %d sign changes, refined %s",
            k, len(brackets), [f"{r.z:.12g}" for r in records],
        )
    if not verified:
        logger.warning("Non-critical coupling eta=%g tau=%g: k=%d unverified", config.eta, config.tau, k)
    return records, errors


def solve_all_roots(
    config: CircleConfig,
    k: int,
    tol: Optional[float] = None,
    method: SolveMethod = SolveMethod.BRENT,
    grid_size: Optional[int] = None,
) -> List[EigenvalueRecord]:
    """Every converged root of fiber k in ascending order.

    Raises the first bracket's error only when no root converged.
    """
    records, errors = _refine_brackets(config, k, tol, method, grid_size)
    if not records:
        raise errors[0][1]
    return records


def solve_eigenvalue(
    config: CircleConfig,
    k: int,
    tol: Optional[float] = None,
    method: SolveMethod = SolveMethod.BRENT,
    grid_size: Optional[int] = None,
) -> EigenvalueRecord:
    """The eigenvalue of fiber k.

    When the scan finds several roots, all are refined and the one closest to the
    asymptotic prediction is returned with ``root_count`` recording the anomaly;
    `sweep` reports all of them.
    """
    records = solve_all_roots(config, k, tol=tol, method=method, grid_size=grid_size)
    if len(records) == 1:
        return records[0]
    seed = asymptotic_eigenvalue(config, k, 2) if k != 0 else accumulation_point(config).z_star
    return min(records, key=lambda r: abs(r.z - seed))


def _failure(k: int, exc: DiracShellError, bracket: Optional[Bracket] = None) -> SweepFailure:
    return SweepFailure(k=k, error=type(exc).__name__, message=str(exc), bracket=bracket)


def _solve_fiber(config: CircleConfig, k: int, tol: float) -> List[Union[EigenvalueRecord, SweepFailure]]:
    try:
        records, errors = _refine_brackets(config, k, tol, SolveMethod.BRENT, None)
    except DiracShellError as exc:
        logger.warning("Fiber k=%d failed: %s", k, exc)
        return [_failure(k, exc)]
    return [*records, *(_failure(k, exc, bracket) for bracket, exc in errors)]


def worker_count(threads: Optional[int], jobs: int) -> int:
    """Requested threads, capped by DIRAC_SHELL_THREADS and by the number of jobs."""
    cap = max(1, settings.THREADS)
    requested = cap if threads is None else min(threads, cap)
    return max(1, min(requested, jobs))


def sweep(
    config: CircleConfig,
    k_min: int,
    k_max: int,
    tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> SpectrumSweep:
    """Solve every fiber in [k_min, k_max], collecting failures instead of aborting.

    A fiber with several roots contributes one record per converged root.
    """
    tol = settings.DEFAULT_TOL if tol is None else tol
    ks = list(range(k_min, k_max + 1))
    workers = worker_count(threads, len(ks))

    if workers == 1:
        outcomes = [_solve_fiber(config, k, tol) for k in ks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda k: _solve_fiber(config, k, tol), ks))

    flat = [item for fiber in outcomes for item in fiber]
    records = [o for o in flat if isinstance(o, EigenvalueRecord)]
    failures = [o for o in flat if isinstance(o, SweepFailure)]
    logger.info(
        "Solved %d roots in [%d, %d] with %d worker(s), %d failure(s)",
        len(records), k_min, k_max, workers, len(failures),
    )
    return SpectrumSweep(
        config=config,
        z_star=accumulation_point(config).z_star,
        records=sorted(records, key=lambda r: (r.k, r.z)),
        failures=sorted(failures, key=lambda f: f.k),
    )


def spectrum(
    config: CircleConfig,
    k_min: int,
    k_max: int,
    tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> List[EigenvalueRecord]:
    """Eigenvalues for k_min..k_max sorted by k; failed fibers are logged and skipped."""
    return sweep(config, k_min, k_max, tol=tol, threads=threads).records
