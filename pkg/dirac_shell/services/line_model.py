r"""
Bound states of the critical straight-line interaction.

Every eigenfunction for the eigenvalue z* = -(tau/eta) m is a superposition

.. math::
    \psi_\Xi(x, y) = \frac{1}{2\sqrt\pi}\,[\theta(x)\Lambda + \theta(-x)]
        \int dk\, P(k)\, \Xi(k)\, e^{iky - \lambda(k)|x|},
    \qquad \lambda(k) = \sqrt{k^2 + 4m^2/\eta^2},

over a square-integrable form factor Xi. The momentum integral is done in units of
1/m, where the profile P no longer depends on the mass:
P_m(k) = sqrt(m) P_1(k/m), lambda_m(k) = m lambda_1(k/m).
"""
import logging
import math
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from scipy.interpolate import CubicSpline

from dirac_shell.core.config import settings
from dirac_shell.core.errors import CriticalityError, DomainError, QuadratureError
from dirac_shell.models.circle import CouplingPair
from dirac_shell.models.line import (
    MAX_HERMITE_ORDER,
    FormFactorKind,
    KQuadrature,
    LambdaMatrix,
    LineConfig,
    LineFormFactor,
    LineObservables,
    Moment,
    PlaneQuadrature,
)
from dirac_shell.services.quadrature import composite_rule, geometric_breakpoints

logger = logging.getLogger(__name__)

SIDES = ("minus", "plus")
_CHUNK = 2048


# Transmission matrix

def general_lambda_matrix(eta: float, tau: float) -> np.ndarray:
    """[i s1 - (eta s0 + tau s3)/2]^-1 [i s1 + (eta s0 + tau s3)/2] for any eta^2 - tau^2 != -4."""
    plus, minus = 0.5 * (eta + tau), 0.5 * (eta - tau)
    # det(i s1 - shell) = plus * minus + 1
    det = plus * minus + 1.0
    if abs(det) < 1e-14:
        raise DomainError(f"transmission matrix is singular for eta={eta}, tau={tau}")
    inverse = np.array([[-minus, -1j], [-1j, -plus]], dtype=complex) / det
    right = np.array([[plus, 1j], [1j, minus]], dtype=complex)
    return inverse @ right


def lambda_matrix(coupling: CouplingPair) -> LambdaMatrix:
    eta, tau = coupling.eta, coupling.tau
    if not coupling.is_critical:
        logger.warning("Non-critical coupling eta=%g tau=%g: using the general quotient form", eta, tau)
        return LambdaMatrix(entries=general_lambda_matrix(eta, tau))
    plus, minus = eta + tau, eta - tau
    # on eta^2 - tau^2 = 4 the smaller factor is 4 over the larger, without cancellation
    if abs(plus) >= abs(minus):
        minus = 4.0 / plus
    else:
        plus = 4.0 / minus
    entries = np.array([[0.0, -0.5j * minus], [-0.5j * plus, 0.0]], dtype=complex)
    return LambdaMatrix(entries=entries)


# Momentum profile

def _require_critical(coupling: CouplingPair) -> float:
    p = coupling.ratio
    if abs(p) >= 1.0:
        raise CriticalityError(f"|tau/eta| = {abs(p)} >= 1 leaves no line bound state")
    return p


def _unit_profile(k: np.ndarray, eta: float, p: float) -> Tuple[np.ndarray, np.ndarray]:
    """P_1(k) with lambda(k) -/+ k formed without cancellation."""
    gap2 = 4.0 / eta**2
    lam = np.sqrt(k * k + gap2)
    plus = np.where(k >= 0.0, lam + k, gap2 / (lam - k))
    minus = np.where(k <= 0.0, lam - k, gap2 / (lam + k))
    return np.sqrt((1.0 - p) * plus) + 0j, -1j * np.sqrt((1.0 + p) * minus)


def momentum_profile(config: LineConfig, k) -> np.ndarray:
    """The spinor P(k); shape (2,) for scalar k, (2, n) for arrays."""
    p = _require_critical(config.coupling)
    m = config.mass
    k = np.asarray(k, dtype=float)
    upper, lower = _unit_profile(k / m, config.eta, p)
    return math.sqrt(m) * np.stack([upper, lower])


# Form factors

def _hermite_table(n_max: int, k: np.ndarray) -> np.ndarray:
    """b_0 .. b_n_max at k, by the normalized three-term recurrence."""
    # one order of headroom for derivatives of the top coefficient
    if n_max > MAX_HERMITE_ORDER + 1:
        raise DomainError(f"Hermite order {n_max} exceeds {MAX_HERMITE_ORDER}")
    x = math.sqrt(2.0) * k
    table = np.empty((n_max + 1,) + k.shape)
    table[0] = (2.0 / math.pi) ** 0.25 * np.exp(-k * k)
    if n_max >= 1:
        table[1] = math.sqrt(2.0) * x * table[0]
    for n in range(1, n_max):
        table[n + 1] = math.sqrt(2.0 / (n + 1)) * x * table[n] - math.sqrt(n / (n + 1)) * table[n - 1]
    return table


def _hermite_derivative(c: np.ndarray) -> np.ndarray:
    """Coefficients of d/dk sum c_n b_n: (Dc)_n = sqrt(n+1) c_{n+1} - sqrt(n) c_{n-1}."""
    n = c.size
    out = np.zeros(n + 1, dtype=complex)
    j = np.arange(n)
    out[j[1:] - 1] += np.sqrt(j[1:]) * c[1:]
    out[j + 1] -= np.sqrt(j + 1) * c
    return out


def _hermite_times_k(c: np.ndarray) -> np.ndarray:
    """Coefficients of k sum c_n b_n: k b_n = (sqrt(n) b_{n-1} + sqrt(n+1) b_{n+1}) / 2."""
    n = c.size
    out = np.zeros(n + 1, dtype=complex)
    j = np.arange(n)
    out[j[1:] - 1] += 0.5 * np.sqrt(j[1:]) * c[1:]
    out[j + 1] += 0.5 * np.sqrt(j + 1) * c
    return out


def hermite_form_factor(n: int, shift_y0: float = 0.0) -> LineFormFactor:
    """The oscillator eigenfunction b_n as a form factor."""
    if n < 0:
        raise DomainError(f"Hermite index must be non-negative, got {n}")
    if n > MAX_HERMITE_ORDER:
        raise DomainError(f"Hermite order {n} exceeds {MAX_HERMITE_ORDER}")
    coefficients = np.zeros(n + 1, dtype=complex)
    coefficients[n] = 1.0
    return LineFormFactor.hermite(coefficients, shift_y0)


def tilted_gaussian_form_factor() -> LineFormFactor:
    """(2/sqrt5) (2/pi)^(1/4) (k+1) exp(-k^2) = (2 b_0 + b_1)/sqrt5."""
    return LineFormFactor.hermite(np.array([2.0, 1.0]) / math.sqrt(5.0))


def form_factor_from_csv(path: Union[str, Path], shift_y0: float = 0.0) -> LineFormFactor:
    """Sampled form factor from a CSV with columns k, re[, im]; '#' lines are comments."""
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape[1] not in (2, 3):
        raise DomainError(f"{path}: expected 2 or 3 columns (k, re[, im]), got {data.shape[1]}")
    values = data[:, 1] + (1j * data[:, 2] if data.shape[1] == 3 else 0.0)
    return LineFormFactor.sampled(data[:, 0], values, shift_y0)


class _SampledSpline:
    def __init__(self, xi: LineFormFactor):
        self.real = CubicSpline(xi.k_grid, xi.values.real, extrapolate=False)
        self.imag = CubicSpline(xi.k_grid, xi.values.imag, extrapolate=False)

    def __call__(self, k: np.ndarray, nu: int = 0) -> np.ndarray:
        out = self.real(k, nu) + 1j * self.imag(k, nu)
        return np.where(np.isnan(out), 0.0, out)


def evaluate_form_factor(xi: LineFormFactor, k) -> np.ndarray:
    """Xi(k) exp(i k y0)."""
    k = np.asarray(k, dtype=float)
    if xi.kind == FormFactorKind.HERMITE:
        table = _hermite_table(xi.coefficients.size - 1, k)
        base = np.tensordot(xi.coefficients, table, axes=1)
    else:
        base = _SampledSpline(xi)(k)
    return base * np.exp(1j * k * xi.shift_y0)


def form_factor_derivative(xi: LineFormFactor, k) -> np.ndarray:
    """d/dk of Xi(k) exp(i k y0)."""
    k = np.asarray(k, dtype=float)
    if xi.kind == FormFactorKind.HERMITE:
        d = _hermite_derivative(xi.coefficients)
        base_d = np.tensordot(d, _hermite_table(d.size - 1, k), axes=1)
        base = np.tensordot(xi.coefficients, _hermite_table(xi.coefficients.size - 1, k), axes=1)
    else:
        spline = _SampledSpline(xi)
        base_d, base = spline(k, 1), spline(k)
    return (base_d + 1j * xi.shift_y0 * base) * np.exp(1j * k * xi.shift_y0)


def _momentum_center_spread(xi: LineFormFactor) -> Tuple[float, float]:
    if xi.kind == FormFactorKind.HERMITE:
        c = xi.coefficients
        norm2 = float(np.vdot(c, c).real)
        kc = _hermite_times_k(c)
        mean = float(np.vdot(np.append(c, 0.0), kc).real) / norm2
        second = float(np.vdot(kc, kc).real) / norm2
    else:
        k, w = _sampled_rule(xi, 512)
        density = np.abs(_SampledSpline(xi)(k)) ** 2
        norm2 = float(np.sum(w * density))
        mean = float(np.sum(w * k * density)) / norm2
        second = float(np.sum(w * k * k * density)) / norm2
    return mean, math.sqrt(max(second - mean * mean, 0.0))


def _sampled_rule(xi: LineFormFactor, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    panels = max(1, min(xi.k_grid.size - 1, nodes // 8))
    edges = np.linspace(xi.k_grid[0], xi.k_grid[-1], panels + 1)
    return composite_rule(edges, max(2, nodes // panels))


def momentum_rule(xi: LineFormFactor, quad: Optional[KQuadrature] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Physical-k nodes and weights covering the support of Xi."""
    quad = quad or KQuadrature(nodes=settings.LINE_K_NODES)
    if xi.kind == FormFactorKind.SAMPLED:
        return _sampled_rule(xi, quad.nodes)
    mean, spread = _momentum_center_spread(xi)
    cutoff = quad.cutoff or max(settings.LINE_K_CUTOFF, 8.0 * spread)
    return composite_rule([mean - cutoff, mean + cutoff], quad.nodes)


def form_factor_norm(xi: LineFormFactor, quad: Optional[KQuadrature] = None) -> float:
    """||Xi|| in L^2(dk) by quadrature."""
    k, w = momentum_rule(xi, quad)
    return math.sqrt(float(np.sum(w * np.abs(evaluate_form_factor(xi, k)) ** 2)))


# Eigenfunctions

def _integrand(config: LineConfig, xi: LineFormFactor, k: np.ndarray, w: np.ndarray):
    """Weighted integrand sqrt(m) P_1(k/m) Xi(k), the scaled momenta k/m and lambda_1(k/m)."""
    p = _require_critical(config.coupling)
    m = config.mass
    k_hat = k / m
    upper, lower = _unit_profile(k_hat, config.eta, p)
    # P_m(k) = sqrt(m) P_1(k/m); the weights already integrate in physical k
    amplitude = w * math.sqrt(m) * evaluate_form_factor(xi, k)
    lam = np.sqrt(k_hat * k_hat + 4.0 / config.eta**2)
    return np.stack([upper * amplitude, lower * amplitude]), k_hat, lam


def _psi_points(config, xi, x, y, k, w, side):
    spinor, k_hat, lam = _integrand(config, xi, k, w)
    m = config.mass
    out = np.empty((x.size, 2), dtype=complex)
    for start in range(0, x.size, _CHUNK):
        stop = start + _CHUNK
        phase = np.exp(
            1j * np.outer(m * y[start:stop], k_hat) - np.outer(m * np.abs(x[start:stop]), lam)
        )
        out[start:stop] = phase @ spinor.T
    out /= 2.0 * math.sqrt(math.pi)
    right = (x > 0.0) | ((x == 0.0) & (side == "plus"))
    if np.any(right):
        out[right] = out[right] @ lambda_matrix(config.coupling).entries.T
    return out


def evaluate_psi_with_error(
    config: LineConfig,
    xi: LineFormFactor,
    x,
    y,
    quad: Optional[KQuadrature] = None,
    side: str = "minus",
) -> Tuple[np.ndarray, float]:
    """psi_Xi at (x, y) and the change against a half-node rule.

    Points with x = 0 take the one-sided value selected by `side`.
    """
    if side not in SIDES:
        raise DomainError(f"side must be one of {SIDES}, got {side!r}")
    quad = quad or KQuadrature(nodes=settings.LINE_K_NODES)
    x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x_arr.shape
    xf, yf = x_arr.ravel(), y_arr.ravel()

    k, w = momentum_rule(xi, quad)
    value = _psi_points(config, xi, xf, yf, k, w, side)
    k2, w2 = momentum_rule(xi, quad.model_copy(update={"nodes": quad.nodes // 2}))
    coarse = _psi_points(config, xi, xf, yf, k2, w2, side)
    scale = max(float(np.max(np.abs(value))), np.finfo(float).tiny)
    estimate = float(np.max(np.abs(value - coarse)))
    if quad.tol is not None and estimate > quad.tol * scale:
        raise QuadratureError(
            f"momentum quadrature estimate {estimate:.3e} exceeds {quad.tol:.1e} (relative)",
            estimate=estimate,
        )
    return value.reshape(shape + (2,)), estimate


def evaluate_psi(
    config: LineConfig,
    xi: LineFormFactor,
    x,
    y,
    quad: Optional[KQuadrature] = None,
    side: str = "minus",
) -> np.ndarray:
    return evaluate_psi_with_error(config, xi, x, y, quad, side)[0]


def psi_on_grid(
    config: LineConfig,
    xi: LineFormFactor,
    xs,
    ys,
    quad: Optional[KQuadrature] = None,
) -> np.ndarray:
    """psi on the tensor grid xs by ys, shape (len(xs), len(ys), 2); xs must avoid 0."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if np.any(xs == 0.0):
        raise DomainError("x = 0 is a jump; use evaluate_psi with an explicit side")
    k, w = momentum_rule(xi, quad)
    spinor, k_hat, lam = _integrand(config, xi, k, w)
    m = config.mass
    # exp(i k y - lambda |x|) factorizes over the tensor grid
    decay = np.exp(-np.outer(m * np.abs(xs), lam))
    wave = np.exp(1j * np.outer(k_hat, m * ys))
    psi = np.stack([decay @ (spinor[j][:, None] * wave) for j in range(2)], axis=-1)
    psi /= 2.0 * math.sqrt(math.pi)
    right = xs > 0.0
    psi[right] = psi[right] @ lambda_matrix(config.coupling).entries.T
    return psi


def _plane_rules(config: LineConfig, xi: LineFormFactor, plane: PlaneQuadrature):
    x_max = plane.x_max or 20.0 / config.decay_floor
    n = plane.nodes_per_panel
    x_neg, wx_neg = composite_rule(geometric_breakpoints(-x_max, 0.0, plane.x_panels, "b"), n)
    x_pos, wx_pos = composite_rule(geometric_breakpoints(0.0, x_max, plane.x_panels, "a"), n)
    # |psi|^2 decays like exp(-2 decay_floor |y|) along the line
    half_width = plane.y_half_width or 30.0 / config.decay_floor
    y_panels = plane.y_panels or max(12, math.ceil(half_width))
    center = -xi.shift_y0
    y_edges = np.linspace(center - half_width, center + half_width, y_panels + 1)
    ys, wy = composite_rule(y_edges, n)
    return np.concatenate([x_neg, x_pos]), np.concatenate([wx_neg, wx_pos]), ys, wy


def norm_identity(
    config: LineConfig,
    xi: LineFormFactor,
    plane: Optional[PlaneQuadrature] = None,
    quad: Optional[KQuadrature] = None,
) -> Tuple[float, float]:
    """(||psi_Xi|| by plane quadrature, ||Xi|| by momentum quadrature)."""
    plane = plane or PlaneQuadrature()
    xs, wx, ys, wy = _plane_rules(config, xi, plane)
    psi = psi_on_grid(config, xi, xs, ys, quad)
    density = np.sum(np.abs(psi) ** 2, axis=-1)
    lhs = math.sqrt(float(wx @ density @ wy))
    return lhs, form_factor_norm(xi, quad)


# Observables

def _check_y_admissible(xi: LineFormFactor) -> None:
    if xi.kind != FormFactorKind.SAMPLED:
        return
    edge = max(abs(xi.values[0]), abs(xi.values[-1]))
    if edge > 1e-8 * float(np.max(np.abs(xi.values))):
        raise DomainError(
            "sampled form factor does not vanish at the ends of its grid; "
            "its derivative is not square-integrable and <y> is undefined"
        )


def line_observables(
    config: LineConfig,
    xi: LineFormFactor,
    quad: Optional[KQuadrature] = None,
    include_y: bool = True,
) -> LineObservables:
    """Closed-form means and variances for a unit-norm form factor."""
    eta, tau, m = config.eta, config.tau, config.mass
    _require_critical(config.coupling)
    k, w = momentum_rule(xi, quad)
    values = evaluate_form_factor(xi, k)
    density = np.abs(values) ** 2
    norm2 = float(np.sum(w * density))
    if abs(norm2 - 1.0) > 1e-6:
        raise DomainError(f"observables need ||Xi|| = 1, got ||Xi||^2 = {norm2:.12g}")

    lam2 = k * k + 4.0 * m * m / eta**2
    tilt = float(np.sum(w * density * k / lam2))
    inverse = float(np.sum(w * density / lam2))
    x_mean = tau / (2.0 * eta) * tilt
    x_var = 0.5 * inverse - (tau**2 / (4.0 * eta**2)) * tilt**2

    y_moment = None
    if include_y:
        _check_y_admissible(xi)
        if xi.kind == FormFactorKind.HERMITE:
            c = np.append(xi.coefficients, 0.0)
            d = _hermite_derivative(xi.coefficients) + 1j * xi.shift_y0 * c
            y_mean = float((1j * np.vdot(c, d)).real)
            grad2 = float(np.vdot(d, d).real)
        else:
            derivative = form_factor_derivative(xi, k)
            y_mean = float(np.sum(w * (np.conj(values) * 1j * derivative)).real)
            grad2 = float(np.sum(w * np.abs(derivative) ** 2))
        y_moment = Moment(mean=y_mean, var=grad2 + 0.25 * inverse - y_mean**2)

    return LineObservables(
        sigma3=Moment(mean=-tau / eta, var=4.0 / eta**2),
        x=Moment(mean=x_mean, var=x_var),
        y=y_moment,
        vx=Moment(mean=0.0, var=1.0),
        vy=Moment(mean=0.0, var=1.0),
    )


def line_observables_quadrature(
    config: LineConfig,
    xi: LineFormFactor,
    plane: Optional[PlaneQuadrature] = None,
    quad: Optional[KQuadrature] = None,
) -> LineObservables:
    """The same statistics from |psi_Xi|^2-weighted integrals over the plane."""
    plane = plane or PlaneQuadrature()
    xs, wx, ys, wy = _plane_rules(config, xi, plane)
    psi = psi_on_grid(config, xi, xs, ys, quad)
    a, b = psi[..., 0], psi[..., 1]
    weight = np.outer(wx, wy)

    def expect(values: np.ndarray) -> float:
        return float(np.sum(weight * values).real)

    density = np.abs(a) ** 2 + np.abs(b) ** 2
    norm2 = expect(density)
    if abs(norm2 - 1.0) > 1e-6:
        logger.warning("Plane quadrature norm %.9f differs from one", norm2)

    def moment(values: np.ndarray, squares: np.ndarray) -> Moment:
        mean = expect(values) / norm2
        return Moment(mean=mean, var=expect(squares) / norm2 - mean * mean)

    s3 = np.abs(a) ** 2 - np.abs(b) ** 2
    sx = 2.0 * np.real(np.conj(a) * b)
    sy = 2.0 * np.imag(np.conj(a) * b)
    x_grid = xs[:, None] * np.ones_like(ys)[None, :]
    y_grid = np.ones_like(xs)[:, None] * ys[None, :]
    return LineObservables(
        sigma3=moment(s3, density),
        x=moment(x_grid * density, x_grid**2 * density),
        y=moment(y_grid * density, y_grid**2 * density),
        vx=moment(sx, density),
        vy=moment(sy, density),
    )


# Checks and asymptotics

def laplace_tail(config: LineConfig, xi: LineFormFactor, x: float) -> np.ndarray:
    """Leading large-|x| form of psi_Xi(x, y) (any fixed y), from the k = 0 saddle."""
    if x == 0.0:
        raise DomainError("the tail law holds for large |x| only")
    p = _require_critical(config.coupling)
    a = config.decay_floor
    direction = np.array([math.sqrt(1.0 - p), -1j * math.sqrt(1.0 + p)])
    if x > 0.0:
        direction = lambda_matrix(config.coupling).entries @ direction
    xi0 = complex(evaluate_form_factor(xi, np.array([0.0]))[0])
    return direction * (math.sqrt(2.0) * config.mass / abs(config.eta)) * xi0 * math.exp(-a * abs(x)) / math.sqrt(abs(x))


def fit_tail_exponent(
    config: LineConfig,
    xi: LineFormFactor,
    xs=None,
    y: float = 0.0,
    quad: Optional[KQuadrature] = None,
) -> float:
    """Decay rate a from a least-squares fit of log(|psi| sqrt|x|) = A - a|x| + B/|x|."""
    xs = np.linspace(5.0, 20.0, 16) if xs is None else np.asarray(xs, dtype=float)
    psi = evaluate_psi(config, xi, xs, np.full_like(xs, y), quad)
    target = np.log(np.linalg.norm(psi, axis=-1) * np.sqrt(np.abs(xs)))
    design = np.column_stack([np.ones_like(xs), -np.abs(xs), 1.0 / np.abs(xs)])
    solution, *_ = np.linalg.lstsq(design, target, rcond=None)
    return float(solution[1])


def apply_free_dirac(
    config: LineConfig,
    xi: LineFormFactor,
    x,
    y,
    h: float = 1e-3,
    quad: Optional[KQuadrature] = None,
) -> np.ndarray:
    """Relative residual |(D_0 - z*) psi| / (m |psi|) with fourth-order differences.

    D_0 = -i s1 d/dx - i s2 d/dy + m s3; points must keep 2h away from x = 0.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(np.abs(x) <= 2.0 * h):
        raise DomainError("finite-difference stencil would cross the line x = 0")
    m = config.mass
    z_star = -config.coupling.ratio * m

    def psi(dx: float, dy: float) -> np.ndarray:
        return evaluate_psi(config, xi, x + dx, y + dy, quad)

    def derivative(axis: int) -> np.ndarray:
        step = [(h, 0.0), (0.0, h)][axis]
        shifted = [psi(s * step[0], s * step[1]) for s in (-2, -1, 1, 2)]
        return (shifted[0] - 8.0 * shifted[1] + 8.0 * shifted[2] - shifted[3]) / (12.0 * h)

    center = psi(0.0, 0.0)
    dx, dy = derivative(0), derivative(1)
    a, b = center[..., 0], center[..., 1]
    # -i s1 d_x + (-i) s2 d_y = [[0, -i dx - dy], [-i dx + dy, 0]]
    upper = -1j * dx[..., 1] - dy[..., 1] + m * a - z_star * a
    lower = -1j * dx[..., 0] + dy[..., 0] - m * b - z_star * b
    return np.hypot(np.abs(upper), np.abs(lower)) / (m * np.linalg.norm(center, axis=-1))
