r"""Overflow-safe integer-order modified Bessel functions.

Everything is computed either in exponentially scaled form

.. math::
    \tilde I_k(t) = e^{-t} I_k(t), \qquad \tilde K_k(t) = e^{t} K_k(t)

or as natural logarithms of the unscaled values, so that products such as
:math:`I_k(t) K_k(t)` stay accurate for orders where the factors themselves leave the
double range.

The first kind comes from Miller's backward recurrence, run on the ratios
:math:`r_j = I_{j+1}/I_j` and normalized with
:math:`e^{-t}\,(I_0 + 2\sum_{j\ge1} I_j) = 1`. The second kind starts from
:math:`\tilde K_0, \tilde K_1` (scipy's Chebyshev kernels) and runs the stable upward
recurrence :math:`K_{j+1} = K_{j-1} + (2j/t) K_j` on the ratios
:math:`q_j = K_{j+1}/K_j`. For large order with :math:`k > 3t` the uniform Debye
expansion replaces both recurrences.

All functions accept scalars or numpy arrays for ``t``.
"""
import logging
import math
from typing import Tuple, Union

import numpy as np
from scipy import special

from dirac_shell.core.config import settings
from dirac_shell.core.errors import DomainError
from dirac_shell.models.bessel import BesselProductRatio, ScaledBesselPair

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def _as_argument(t: ArrayLike, t_max: float | None = None) -> np.ndarray:
    t_max = settings.T_MAX if t_max is None else t_max
    arr = np.asarray(t, dtype=float)
    if arr.size == 0:
        return arr
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError(f"Bessel argument must be positive, got min {np.min(arr)!r}")
    if np.any(arr > t_max):
        raise DomainError(f"Bessel argument {np.max(arr)!r} exceeds T_max = {t_max}")
    return arr


def _check_order(k: int) -> int:
    if int(k) != k:
        raise DomainError(f"only integer orders are supported, got {k!r}")
    if k < 0:
        raise DomainError(f"order must be non-negative, got {k}; fold I_-k = I_k, K_-k = K_k first")
    return int(k)


def _unwrap(value: np.ndarray, scalar: bool):
    return float(value) if scalar else value


def miller_start(k: int, t: ArrayLike) -> int:
    """Start index of the backward recurrence.

    The sqrt(t) term keeps the normalization sum and the ratio convergence
    complete for large arguments, where I_j decays like exp(-j^2 / 2t).
    """
    t_ref = max(float(np.max(t)), 1.0)
    return k + math.ceil(10.0 + 2.0 * math.sqrt(k * t_ref) + 9.0 * math.sqrt(t_ref))


def _miller_ratios(n_start: int, t: np.ndarray) -> np.ndarray:
    """r[j] = I_{j+1}(t) / I_j(t) for j = 0 .. n_start - 1."""
    ratios = np.empty((n_start,) + t.shape)
    r_next = np.zeros_like(t)
    for j in range(n_start - 1, -1, -1):
        r_next = 1.0 / (2.0 * (j + 1) / t + r_next)
        ratios[j] = r_next
    return ratios


def _log_i_scaled_recurrence(k: int, t: np.ndarray) -> np.ndarray:
    ratios = _miller_ratios(miller_start(k, t), t)
    # terms I_j / I_0 stay below one, so the running product can only underflow
    partial = np.cumprod(ratios, axis=0)
    log_i0_scaled = -np.log1p(2.0 * np.sum(partial, axis=0))
    if k == 0:
        return log_i0_scaled
    return log_i0_scaled + np.sum(np.log(ratios[:k]), axis=0)


def _k_ratios(k: int, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(log e^t K_0(t), q[j] = K_{j+1}/K_j for j = 0 .. k)."""
    k0 = special.kve(0, t)
    k1 = special.kve(1, t)
    ratios = np.empty((k + 1,) + t.shape)
    q = k1 / k0
    ratios[0] = q
    for j in range(1, k + 1):
        q = 1.0 / q + 2.0 * j / t
        ratios[j] = q
    return np.log(k0), ratios


def _log_k_scaled_recurrence(k: int, t: np.ndarray) -> np.ndarray:
    log_k0, ratios = _k_ratios(k, t)
    if k == 0:
        return log_k0
    return log_k0 + np.sum(np.log(ratios[:k]), axis=0)


# Debye polynomials U_1 .. U_4 (DLMF 10.41.10)
def _debye_u(p: np.ndarray) -> Tuple[np.ndarray, ...]:
    p2 = p * p
    u1 = (3.0 * p - 5.0 * p * p2) / 24.0
    u2 = p2 * (81.0 - 462.0 * p2 + 385.0 * p2 * p2) / 1152.0
    u3 = (30375.0 * p**3 - 369603.0 * p**5 + 765765.0 * p**7 - 425425.0 * p**9) / 414720.0
    u4 = p**4 * (
        4465125.0 - 94121676.0 * p2 + 349922430.0 * p2**2 - 446185740.0 * p2**3 + 185910725.0 * p2**4
    ) / 39813120.0
    return u1, u2, u3, u4


def _debye_series(nu: float, t: np.ndarray):
    z = t / nu
    root = np.sqrt(1.0 + z * z)
    p = 1.0 / root
    u1, u2, u3, u4 = _debye_u(p)
    inv = 1.0 / nu
    sum_i = 1.0 + inv * (u1 + inv * (u2 + inv * (u3 + inv * u4)))
    sum_k = 1.0 + inv * (-u1 + inv * (u2 + inv * (-u3 + inv * u4)))
    eta = root + np.log(z / (1.0 + root))
    return eta, root, sum_i, sum_k


def debye_log_ik(k: int, t: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """Uniform large-order expansion: (log I_k(t), log K_k(t))."""
    k = _check_order(k)
    if k == 0:
        raise DomainError("the uniform expansion needs k >= 1")
    scalar = np.ndim(t) == 0
    arr = _as_argument(t)
    eta, root, sum_i, sum_k = _debye_series(float(k), arr)
    log_i = k * eta - 0.5 * np.log(2.0 * math.pi * k * root) + np.log(sum_i)
    log_k = -k * eta + 0.5 * np.log(math.pi / (2.0 * k * root)) + np.log(sum_k)
    return _unwrap(log_i, scalar), _unwrap(log_k, scalar)


def _debye_product(nu: float, t: np.ndarray) -> np.ndarray:
    # exponents cancel analytically in I_nu K_nu
    _, root, sum_i, sum_k = _debye_series(nu, t)
    return sum_i * sum_k / (2.0 * nu * root)


def _uniform_mask(k: int, t: np.ndarray) -> np.ndarray:
    if k < settings.LARGE_ORDER_THRESHOLD:
        return np.zeros(t.shape, dtype=bool)
    return k > 3.0 * t


def log_bessel_ik(k: int, t: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """Natural logs of the unscaled I_k(t) and K_k(t), k >= 0."""
    k = _check_order(k)
    scalar = np.ndim(t) == 0
    arr = np.atleast_1d(_as_argument(t))
    log_i = np.empty_like(arr)
    log_k = np.empty_like(arr)
    uniform = _uniform_mask(k, arr)
    if np.any(uniform):
        log_i[uniform], log_k[uniform] = debye_log_ik(k, arr[uniform])
    rest = ~uniform
    if np.any(rest):
        tr = arr[rest]
        log_i[rest] = _log_i_scaled_recurrence(k, tr) + tr
        log_k[rest] = _log_k_scaled_recurrence(k, tr) - tr
    if scalar:
        return float(log_i[0]), float(log_k[0])
    return log_i.reshape(np.shape(t)), log_k.reshape(np.shape(t))


def bessel_i_scaled(k: int, t: ArrayLike) -> ArrayLike:
    """e^{-t} I_k(t) by Miller's algorithm (uniform expansion for large k)."""
    k = _check_order(k)
    scalar = np.ndim(t) == 0
    arr = np.atleast_1d(_as_argument(t))
    out = np.empty_like(arr)
    uniform = _uniform_mask(k, arr)
    if np.any(uniform):
        log_i, _ = debye_log_ik(k, arr[uniform])
        out[uniform] = np.exp(log_i - arr[uniform])
    if np.any(~uniform):
        out[~uniform] = np.exp(_log_i_scaled_recurrence(k, arr[~uniform]))
    return float(out[0]) if scalar else out.reshape(np.shape(t))


def bessel_i_scaled_sequence(k_max: int, t: float) -> np.ndarray:
    """[e^{-t} I_j(t) for j = 0 .. k_max] from one Miller sweep."""
    k_max = _check_order(k_max)
    arr = np.atleast_1d(_as_argument(t))
    ratios = _miller_ratios(miller_start(k_max, arr), arr)
    partial = np.cumprod(ratios, axis=0)
    i0 = 1.0 / (1.0 + 2.0 * np.sum(partial, axis=0))
    return np.concatenate([i0, i0 * partial[:k_max, 0]])


def bessel_k_scaled(k: int, t: ArrayLike) -> ArrayLike:
    """e^{t} K_k(t) by upward recurrence from K_0, K_1."""
    k = _check_order(k)
    scalar = np.ndim(t) == 0
    arr = np.atleast_1d(_as_argument(t))
    out = np.empty_like(arr)
    uniform = _uniform_mask(k, arr)
    if np.any(uniform):
        _, log_k = debye_log_ik(k, arr[uniform])
        out[uniform] = np.exp(log_k + arr[uniform])
    if np.any(~uniform):
        out[~uniform] = np.exp(_log_k_scaled_recurrence(k, arr[~uniform]))
    return float(out[0]) if scalar else out.reshape(np.shape(t))


def scaled_pair(k: int, t: float) -> ScaledBesselPair:
    log_i, log_k = log_bessel_ik(k, t)
    return ScaledBesselPair(order=k, argument=t, log_i=log_i, log_k=log_k)


def _product_nonnegative(n: int, t: np.ndarray) -> np.ndarray:
    """I_n K_n for n >= 0 through the Wronskian, I_n K_n = 1 / (t (q_n + r_n))."""
    out = np.empty_like(t)
    uniform = _uniform_mask(n, t) if n > 0 else np.zeros(t.shape, dtype=bool)
    if np.any(uniform):
        out[uniform] = _debye_product(float(n), t[uniform])
    rest = ~uniform
    if np.any(rest):
        tr = t[rest]
        r_n = _miller_ratios(miller_start(n, tr), tr)[n]
        q_n = _k_ratios(n, tr)[1][n]
        out[rest] = 1.0 / (tr * (q_n + r_n))
    return out


def product_ik(k: int, t: ArrayLike) -> ArrayLike:
    """I_k(t) K_k(t) for any integer k; no intermediate overflow."""
    scalar = np.ndim(t) == 0
    arr = np.atleast_1d(_as_argument(t))
    out = _product_nonnegative(abs(int(k)), arr)
    return float(out[0]) if scalar else out.reshape(np.shape(t))


def _ratio_nonnegative(n: int, t: np.ndarray) -> np.ndarray:
    out = np.empty_like(t)
    uniform = _uniform_mask(n, t) if n > 0 else np.zeros(t.shape, dtype=bool)
    if np.any(uniform):
        tu = t[uniform]
        out[uniform] = _debye_product(n + 1.0, tu) / _debye_product(float(n), tu)
    rest = ~uniform
    if np.any(rest):
        tr = t[rest]
        # f_n = (I_{n+1}/I_n) (K_{n+1}/K_n)
        r_n = _miller_ratios(miller_start(n + 1, tr), tr)[n]
        q_n = _k_ratios(n, tr)[1][n]
        out[rest] = r_n * q_n
    return out


def ratio_f(k: int, t: ArrayLike) -> ArrayLike:
    """f_k(t) = I_{k+1}(t) K_{k+1}(t) / (I_k(t) K_k(t)) for any integer k."""
    k = int(k)
    scalar = np.ndim(t) == 0
    arr = np.atleast_1d(_as_argument(t))
    if k >= 0:
        out = _ratio_nonnegative(k, arr)
    else:
        out = 1.0 / _ratio_nonnegative(-k - 1, arr)
    return float(out[0]) if scalar else out.reshape(np.shape(t))


def product_ratio(k: int, t: float) -> BesselProductRatio:
    return BesselProductRatio(order=k, argument=t, product_k=product_ik(k, t), ratio_f=ratio_f(k, t))


def large_order_ratio_expansion(k: int, t: float, order: int = 3) -> float:
    """Truncated large-|k| expansion 1 - 1/k + 1/k^2 - (1 - t^2)/k^3 of f_k(t).

    The cubic coefficient follows from I_k K_k = (1 + O(k^-4)) / (2 sqrt(k^2 + t^2)).
    """
    if k == 0 or abs(k) < 1:
        raise DomainError("the large-order expansion needs |k| >= 1")
    if order not in (0, 1, 2, 3):
        raise DomainError(f"order must be in 0..3, got {order}")
    inv = 1.0 / k
    terms = (1.0, -inv, inv * inv, -(1.0 - t * t) * inv**3)
    return float(sum(terms[: order + 1]))


def small_argument_i(k: int, t: ArrayLike) -> ArrayLike:
    """Leading small-argument law I_k(t) ~ (t/2)^k / k!."""
    k = abs(int(k))
    return np.power(np.asarray(t, dtype=float) / 2.0, k) / math.factorial(k)


def large_argument_ik(t: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """Leading large-argument laws: e^{-t} I(t) ~ 1/sqrt(2 pi t), e^{t} K(t) ~ sqrt(pi / 2t)."""
    t = np.asarray(t, dtype=float)
    return 1.0 / np.sqrt(2.0 * math.pi * t), np.sqrt(math.pi / (2.0 * t))
