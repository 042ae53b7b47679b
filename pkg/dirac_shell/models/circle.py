"""
Domain types of the circle model.
"""
import math
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from dirac_shell.core.errors import CriticalityError

CRITICAL_TOL = 1e-12


class CouplingPair(BaseModel):
    """Electrostatic (eta) and Lorentz-scalar (tau) strengths of the shell."""

    model_config = ConfigDict(frozen=True)

    eta: float
    tau: float
    allow_noncritical: bool = False

    @model_validator(mode="after")
    def check_critical(self) -> "CouplingPair":
        if self.eta == 0.0 or self.eta + self.tau == 0.0:
            raise CriticalityError(f"degenerate coupling eta={self.eta}, tau={self.tau}")
        if not self.allow_noncritical and not self.is_critical:
            raise CriticalityError(
                f"eta^2 - tau^2 = {self.eta**2 - self.tau**2:.15g} != 4 "
                f"(eta={self.eta}, tau={self.tau}); pass allow_noncritical for diagnostics"
            )
        return self

    @classmethod
    def from_tau(cls, tau: float, sign: int = 1) -> "CouplingPair":
        if sign not in (1, -1):
            raise CriticalityError(f"eta sign must be +1 or -1, got {sign}")
        return cls(eta=sign * math.sqrt(4.0 + tau * tau), tau=tau)

    @property
    def is_critical(self) -> bool:
        return abs(self.eta**2 - self.tau**2 - 4.0) <= CRITICAL_TOL * max(1.0, self.eta**2)

    @property
    def ratio(self) -> float:
        """tau / eta"""
        return self.tau / self.eta


class CircleConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    mass: float = Field(gt=0)
    radius: float = Field(gt=0)
    coupling: CouplingPair

    @property
    def eta(self) -> float:
        return self.coupling.eta

    @property
    def tau(self) -> float:
        return self.coupling.tau


class GapPoint(BaseModel):
    """Accumulation point z* = -(tau/eta) m inside the mass gap."""

    model_config = ConfigDict(frozen=True)

    z_star: float
    p: float


class SolveMethod(str, Enum):
    BISECTION = "bisection"
    BRENT = "brent"
    ORACLE = "oracle"


class EigenvalueRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int
    z: float
    residual: float
    bracket: Tuple[float, float]
    method: SolveMethod
    z_star: float
    root_count: int = 1
    iterations: int = 0
    verified: bool = True

    @computed_field
    @property
    def gap(self) -> float:
        return abs(self.z - self.z_star)

    @computed_field
    @property
    def anomaly(self) -> bool:
        # zero or several roots in one fiber
        return self.root_count != 1


class RadialEigenfunction(BaseModel):
    """Normalized bound state in the angular momentum fiber k.

    The matching constant and the normalization are stored as logarithms since both
    leave the double range for |k| beyond a few hundred.
    """

    model_config = ConfigDict(frozen=True)

    config: CircleConfig
    k: int
    z: float
    log_abs_c: float
    c_sign: int
    log_a: float
    record: Optional[EigenvalueRecord] = None

    @property
    def c_match(self) -> float:
        return self.c_sign * math.exp(self.log_abs_c)

    @property
    def a_norm(self) -> float:
        return math.exp(self.log_a)

    @property
    def j3(self) -> Fraction:
        return Fraction(2 * self.k + 1, 2)

    @property
    def decay_rate(self) -> float:
        """sqrt(m^2 - z^2)"""
        m = self.config.mass
        return math.sqrt((m - self.z) * (m + self.z))


class RadialGrid(BaseModel):
    """Composite Gauss-Legendre rule on (0, R) and (R, r_max); R itself is never a node."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    radius: float
    r_max: float
    interior_nodes: np.ndarray
    interior_weights: np.ndarray
    exterior_nodes: np.ndarray
    exterior_weights: np.ndarray

    @property
    def nodes(self) -> np.ndarray:
        return np.concatenate([self.interior_nodes, self.exterior_nodes])

    @property
    def weights(self) -> np.ndarray:
        return np.concatenate([self.interior_weights, self.exterior_weights])


class CircleObservables(BaseModel):
    """Expectation values in a normalized bound state, with quadrature error estimates."""

    model_config = ConfigDict(frozen=True)

    norm: float
    sigma3: float
    v_theta: float
    v_r: float = 0.0
    v_r_quadrature: float
    error_estimate: float


class Concentration(BaseModel):
    model_config = ConfigDict(frozen=True)

    peak_radius: float
    peak_side: str
    peak_density: float
    mean_distance: float


class LargeOrderLaw(BaseModel):
    """Leading large-|k| behavior of the matching constant and the normalization."""

    model_config = ConfigDict(frozen=True)

    k: int
    log_abs_c: float
    c_sign: int
    log_a: float


class ShootingState(BaseModel):
    """Radial state (u, w) with v = -i w, stored as scale exp(log_scale) times the vector."""

    model_config = ConfigDict(frozen=True)

    r: float
    u: float
    v_imag: float
    log_scale: float

    @model_validator(mode="after")
    def check_state(self) -> "ShootingState":
        if self.u == 0.0 and self.v_imag == 0.0:
            raise ValueError("shooting state vanished")
        if not math.isfinite(self.log_scale):
            raise ValueError(f"log_scale must be finite, got {self.log_scale}")
        return self

    @property
    def direction(self) -> Tuple[float, float]:
        n = math.hypot(self.u, self.v_imag)
        return self.u / n, self.v_imag / n


class MatchResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int
    z: float
    determinant: float
    interior_trace: Tuple[float, float]
    exterior_trace: Tuple[float, float]
