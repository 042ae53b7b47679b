"""
Property and oracle checks run by `dirac-shell verify`.

Each suite returns CheckResults carrying the measured value and the bound it was held
to. The Bessel suite compares against mpmath at 40 digits; the circle suite compares
the Bessel solver against the Bessel-free shooting oracle.
"""
import logging
import math
from typing import Callable, Dict, Iterable, List, Optional

import mpmath
import numpy as np

from dirac_shell.core.errors import DiracShellError, DomainError
from dirac_shell.models.circle import CircleConfig, CouplingPair
from dirac_shell.models.line import LineConfig, LineFormFactor
from dirac_shell.models.report import CheckResult, VerifyReport
from dirac_shell.services import circle_eigenfunctions as eigen
from dirac_shell.services import line_model
from dirac_shell.services.circle_spectrum import (
    accumulation_point,
    asymptotic_eigenvalue,
    eigenvalue_residual,
    sweep,
)
from dirac_shell.services.oracle_ode import matching_determinant, oracle_eigenvalue
from dirac_shell.services.special_functions import bessel_i_scaled, bessel_k_scaled, log_bessel_ik

logger = logging.getLogger(__name__)

EV_TAUS = (-5.0, 0.0, 5.0)


def ev_configs(mass: float = 1.0, radius: float = 1.0) -> List[CircleConfig]:
    """m = R = 1 with eta = +sqrt(4 + tau^2) for tau = -5, 0, 5."""
    return [CircleConfig(mass=mass, radius=radius, coupling=CouplingPair.from_tau(tau)) for tau in EV_TAUS]


def _check(
    name: str,
    value: float,
    bound: float,
    at_least: bool = False,
    passed: Optional[bool] = None,
    detail: Optional[str] = None,
) -> CheckResult:
    """value <= bound passes, or value >= bound with at_least."""
    if passed is None:
        passed = bool(np.isfinite(value)) and (value >= bound if at_least else value <= bound)
    result = CheckResult(name=name, passed=passed, value=float(value), bound=float(bound), detail=detail)
    log = logger.info if passed else logger.warning
    log("%s: %s (value %.3e, bound %.3e)", name, "pass" if passed else "FAIL", value, bound)
    return result


def _guarded(name: str, bound: float, fn: Callable[[], CheckResult]) -> CheckResult:
    try:
        return fn()
    except DiracShellError as exc:
        return CheckResult(name=name, passed=False, value=math.nan, bound=bound, detail=f"{type(exc).__name__}: {exc}")


# Bessel substrate

def wronskian_defect(k_max: int = 60, points: int = 40) -> float:
    """max |t (I_k K_{k+1} + I_{k+1} K_k) - 1| on a log grid of t in [1e-4, 600]."""
    t = np.logspace(-4.0, math.log10(600.0), points)
    worst = 0.0
    for k in range(k_max + 1):
        log_i0, log_k0 = log_bessel_ik(k, t)
        log_i1, log_k1 = log_bessel_ik(k + 1, t)
        log_t = np.log(t)
        w = np.exp(log_t + log_i0 + log_k1) + np.exp(log_t + log_i1 + log_k0)
        worst = max(worst, float(np.max(np.abs(w - 1.0))))
    return worst


def mpmath_scaled_ik(k: int, t: float, dps: int = 40):
    """e^{-t} I_k(t) and e^{t} K_k(t) in extended precision."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(t)
        return float(mpmath.besseli(k, x) * mpmath.exp(-x)), float(mpmath.besselk(k, x) * mpmath.exp(x))


def mpmath_defect(samples: int = 10_000, k_max: int = 50, t_max: float = 300.0, seed: int = 2024) -> float:
    """Worst relative error of the scaled I_k, K_k against mpmath on random (k, t).

    k is uniform on [0, k_max], t log-uniform on [1e-4, t_max].
    """
    rng = np.random.default_rng(seed)
    ks = rng.integers(0, k_max + 1, size=samples)
    ts = 10.0 ** rng.uniform(-4.0, math.log10(t_max), size=samples)
    worst = 0.0
    for k, t in zip(ks, ts):
        ours = bessel_i_scaled(int(k), float(t)), bessel_k_scaled(int(k), float(t))
        reference = mpmath_scaled_ik(int(k), float(t))
        for a, b in zip(ours, reference):
            worst = max(worst, abs(a / b - 1.0))
    return worst


def bessel_suite(samples: int = 10_000) -> List[CheckResult]:
    return [
        _check("bessel.wronskian", wronskian_defect(), 1e-12),
        _check("bessel.mpmath_agreement", mpmath_defect(samples), 1e-12),
    ]


# Circle model

def circle_suite(oracle_ks: Iterable[int] = range(-20, 21)) -> List[CheckResult]:
    checks = []
    for config in ev_configs():
        tag = f"tau={config.tau:g}"
        result = sweep(config, -20, 20)
        checks.append(_check(f"circle.{tag}.failures", len(result.failures), 0))
        if result.records:
            checks.append(_check(f"circle.{tag}.max_residual", max(r.residual for r in result.records), 1e-11))
        roots: Dict[int, List[float]] = {}
        for record in result.records:
            roots.setdefault(record.k, []).append(record.z)

        def agreement() -> CheckResult:
            # distance from each oracle root to the nearest Bessel root of the same fiber
            gaps = [
                min(abs(oracle_eigenvalue(config, k).z - z) for z in roots[k]) for k in oracle_ks if k in roots
            ]
            return _check(f"circle.{tag}.oracle_agreement", max(gaps), 1e-8 * config.mass)

        checks.append(_guarded(f"circle.{tag}.oracle_agreement", 1e-8, agreement))
        checks.extend(exclusion_checks(config, tag))

    config = ev_configs()[1]
    checks.extend(eigenfunction_checks(config, range(-30, 31)))
    return checks


def exclusion_checks(config: CircleConfig, tag: str, k_max: int = 50) -> List[CheckResult]:
    """Residual and determinant stay away from zero at z* and next to the gap edges."""
    m = config.mass
    z_star = accumulation_point(config).z_star
    points = [z_star, -m * (1.0 - 1e-6), m * (1.0 - 1e-6)]
    smallest = min(
        abs(eigenvalue_residual(config, k, z)) for k in range(-k_max, k_max + 1) for z in points
    )

    def determinant() -> CheckResult:
        value = min(
            abs(matching_determinant(config, k, z).determinant)
            for k in range(-k_max, k_max + 1)
            for z in points
        )
        return _check(f"circle.{tag}.determinant_excluded", value, 1e-4, at_least=True)

    return [
        _check(f"circle.{tag}.residual_excluded", smallest, 1e-4, at_least=True),
        _guarded(f"circle.{tag}.determinant_excluded", 1e-4, determinant),
    ]


def eigenfunction_checks(config: CircleConfig, ks: Iterable[int]) -> List[CheckResult]:
    boundary, norm, dirac = 0.0, 0.0, 0.0
    radius = config.radius
    sample_r = radius * np.array([0.5, 0.8, 1.3, 2.0])
    for k in ks:
        eig = eigen.eigenfunction(config, k)
        boundary = max(boundary, *eigen.boundary_residual(eig))
        norm = max(norm, abs(eigen.norm_quadrature(eig) - 1.0))
        dirac = max(dirac, float(np.max(eigen.radial_dirac_residual(eig, sample_r))))
    return [
        _check("eigenfunction.boundary_residual", boundary, 1e-10),
        _check("eigenfunction.norm", norm, 1e-8),
        _check("eigenfunction.radial_dirac", dirac, 1e-6),
    ]


# Symmetry

def symmetry_defect(config: CircleConfig, k_max: int = 30) -> float:
    """max |z_k + z_{-k-1}| over 0 <= k <= k_max; zero when tau = 0."""
    result = sweep(config, -k_max - 1, k_max)
    if result.failures:
        raise DiracShellError(f"symmetry sweep had failures at k = {[f.k for f in result.failures]}")
    z = {r.k: r.z for r in result.records}
    return max(abs(z[k] + z[-k - 1]) for k in range(k_max + 1))


def symmetry_suite() -> List[CheckResult]:
    checks = []
    for sign in (1, -1):
        config = CircleConfig(mass=1.0, radius=1.0, coupling=CouplingPair(eta=2.0 * sign, tau=0.0))
        name = f"symmetry.eta={2 * sign:+d}"
        checks.append(_guarded(name, 1e-10, lambda: _check(name, symmetry_defect(config), 1e-10 * config.mass)))
    return checks


# Asymptotics

def scaled_remainders(config: CircleConfig, ks: Iterable[int]) -> np.ndarray:
    """(z_k - third-order expansion) k^4 for each k."""
    ks = list(ks)
    result = sweep(config, min(ks), max(ks))
    z = {r.k: r.z for r in result.records}
    return np.array([(z[k] - asymptotic_eigenvalue(config, k, 3)) * float(k) ** 4 for k in ks])


def median_spread(values: np.ndarray) -> float:
    """Largest factor by which |values| departs from their median."""
    magnitude = np.abs(values)
    median = float(np.median(magnitude))
    return float(max(np.max(magnitude) / median, median / np.min(magnitude)))


def log_slope(xs, ys) -> float:
    slope, _ = np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), 1)
    return float(slope)


def large_order_slopes(config: CircleConfig, ks: Iterable[int]) -> Dict[str, float]:
    """Ratio of measured to predicted k-slopes of log|c_k| and log a_k."""
    ks = list(ks)
    measured_c, measured_a, law_c, law_a = [], [], [], []
    for k in ks:
        eig = eigen.eigenfunction(config, k)
        law = eigen.large_k_asymptotics(config, k)
        measured_c.append(eig.log_abs_c)
        measured_a.append(eig.log_a)
        law_c.append(law.log_abs_c)
        law_a.append(law.log_a)
    return {
        "c": log_slope(ks, measured_c) / log_slope(ks, law_c),
        "a": log_slope(ks, measured_a) / log_slope(ks, law_a),
    }


def sigma3_decay_exponent(config: CircleConfig, k: int, radii=(10.0, 20.0, 40.0)) -> float:
    """Power p in <sigma_3> + tau/eta ~ R^p."""
    deviations = []
    for radius in radii:
        scaled = config.model_copy(update={"radius": radius})
        eig = eigen.eigenfunction(scaled, k)
        deviations.append(abs(eigen.observables(eig).sigma3 + config.tau / config.eta))
    return log_slope(np.log(radii), np.log(deviations))


def v_theta_decay_rate(config: CircleConfig, k: int, radii=(3.0, 4.0, 5.0, 6.0)) -> float:
    """Slope of log(|<v_theta>| R) against R; the law predicts -4m/|eta|."""
    values = []
    for radius in radii:
        scaled = config.model_copy(update={"radius": radius})
        v_theta = eigen.observables(eigen.eigenfunction(scaled, k)).v_theta
        if v_theta >= 0.0:
            raise DiracShellError(f"<v_theta> = {v_theta:.3e} is not negative at R = {radius}")
        values.append(math.log(-v_theta * radius))
    return log_slope(radii, values)


def asymptotics_suite() -> List[CheckResult]:
    base = CircleConfig(mass=1.0, radius=1.0, coupling=CouplingPair(eta=2.0, tau=0.0))
    checks = []
    for radius, ks in ((1.0, range(8, 61)), (2.0, range(20, 61))):
        config = base.model_copy(update={"radius": radius})
        spread = median_spread(scaled_remainders(config, ks))
        checks.append(_check(f"asymptotics.remainder_k4.R={radius:g}", spread, 2.0))

    slopes = large_order_slopes(base, range(20, 61, 5))
    checks.append(_check("asymptotics.matching_constant_slope", abs(slopes["c"] - 1.0), 0.05))
    checks.append(_check("asymptotics.normalization_slope", abs(slopes["a"] - 1.0), 0.05))
    negative = large_order_slopes(base, range(-60, -19, 5))
    checks.append(_check("asymptotics.matching_constant_slope.negative_k", abs(negative["c"] - 1.0), 0.05))

    exponent = sigma3_decay_exponent(base, 1)
    checks.append(_check("asymptotics.sigma3_inverse_square", abs(exponent + 2.0) / 2.0, 0.2))

    def v_theta() -> CheckResult:
        rate = v_theta_decay_rate(base, 0)
        predicted = -4.0 * base.mass / abs(base.eta)
        return _check("asymptotics.v_theta_rate", abs(rate / predicted - 1.0), 0.1)

    checks.append(_guarded("asymptotics.v_theta_rate", 0.1, v_theta))

    states = {k: eigen.eigenfunction(base, k) for k in range(10, 41, 5)}
    distances = [eigen.concentration(states[k]).mean_distance for k in range(10, 41, 10)]
    checks.append(
        _check(
            "asymptotics.concentration",
            float(np.max(np.diff(distances))),
            0.0,
            passed=bool(np.all(np.diff(distances) < 0.0)),
        )
    )
    off_circle = np.array(
        [[float(eigen.density_grid(states[k], [r], [0.0])[0, 0]) for k in range(20, 41, 5)] for r in (0.5, 2.0)]
    )
    steps = np.diff(off_circle, axis=1)
    checks.append(
        _check("asymptotics.off_circle_decay", float(np.max(steps)), 0.0, passed=bool(np.all(steps < 0.0)))
    )
    return checks


# Line model

def random_hermite_form_factor(rng: np.random.Generator, degree: int = 3) -> LineFormFactor:
    """Unit-norm form factor with complex normal Hermite coefficients up to `degree`."""
    c = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
    return LineFormFactor.hermite(c / np.linalg.norm(c))


def random_norm_identities(config: LineConfig, rng: np.random.Generator, count: int = 10):
    return [line_model.norm_identity(config, random_hermite_form_factor(rng)) for _ in range(count)]


def line_suite(seed: int = 7) -> List[CheckResult]:
    rng = np.random.default_rng(seed)
    taus = rng.uniform(-10.0, 10.0, size=100)
    signs = rng.choice([-1, 1], size=100)
    square, quotient = 0.0, 0.0
    for tau, sign in zip(taus, signs):
        coupling = CouplingPair.from_tau(float(tau), int(sign))
        entries = line_model.lambda_matrix(coupling).entries
        square = max(square, line_model.lambda_matrix(coupling).square_defect())
        general = line_model.general_lambda_matrix(coupling.eta, coupling.tau)
        quotient = max(quotient, float(np.max(np.abs(general - entries))) / max(1.0, float(np.max(np.abs(entries)))))
    checks = [
        _check("line.lambda_square", square, 1e-14),
        _check("line.lambda_general_form", quotient, 1e-14),
    ]

    b0 = line_model.hermite_form_factor(0)
    tilted = line_model.tilted_gaussian_form_factor()
    cases = [
        ("eta=2,tau=0", LineConfig(mass=1.0, coupling=CouplingPair(eta=2.0, tau=0.0)), b0),
        ("eta=sqrt13,tau=-3", LineConfig(mass=1.0, coupling=CouplingPair(eta=math.sqrt(13.0), tau=-3.0)), tilted),
    ]
    for tag, config, xi in cases:
        ys = np.linspace(-5.0, 5.0, 50)
        minus = line_model.evaluate_psi(config, xi, 0.0, ys, side="minus")
        plus = line_model.evaluate_psi(config, xi, 0.0, ys, side="plus")
        mapped = minus @ line_model.lambda_matrix(config.coupling).entries.T
        jump = float(np.max(np.linalg.norm(plus - mapped, axis=-1) / np.linalg.norm(plus, axis=-1)))
        checks.append(_check(f"line.{tag}.transmission", jump, 1e-8))

        lhs, rhs = line_model.norm_identity(config, xi)
        checks.append(_check(f"line.{tag}.norm_identity", abs(lhs - rhs), 1e-6))
        worst = max(abs(lhs - rhs) for lhs, rhs in random_norm_identities(config, rng))
        checks.append(_check(f"line.{tag}.norm_identity_random", worst, 1e-6))

        closed = line_model.line_observables(config, xi)
        direct = line_model.line_observables_quadrature(config, xi)
        worst = max(
            abs(a - b)
            for name in ("sigma3", "x", "y", "vx", "vy")
            for a, b in zip(getattr(closed, name).as_tuple(), getattr(direct, name).as_tuple())
        )
        checks.append(_check(f"line.{tag}.observables", worst, 1e-5))

        rate = line_model.fit_tail_exponent(config, xi)
        checks.append(_check(f"line.{tag}.tail_exponent", abs(rate / config.decay_floor - 1.0), 0.02))
    return checks


SUITES: Dict[str, Callable[[], List[CheckResult]]] = {
    "bessel": bessel_suite,
    "circle": circle_suite,
    "line": line_suite,
    "symmetry": symmetry_suite,
    "asymptotics": asymptotics_suite,
}


def run_suite(name: str) -> VerifyReport:
    if name == "all":
        checks = [check for suite in SUITES.values() for check in suite()]
    elif name in SUITES:
        checks = SUITES[name]()
    else:
        raise DomainError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    report = VerifyReport(suite=name, checks=checks)
    logger.info("Suite %s: %d checks, %d failed", name, len(checks), len(report.failures()))
    return report
