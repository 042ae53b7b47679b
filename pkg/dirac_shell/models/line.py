"""
Domain types of the straight-line model.
"""
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from dirac_shell.core.errors import DomainError
from dirac_shell.models.circle import CouplingPair

MAX_HERMITE_ORDER = 200


class LineConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    mass: float = Field(gt=0)
    coupling: CouplingPair

    @property
    def eta(self) -> float:
        return self.coupling.eta

    @property
    def tau(self) -> float:
        return self.coupling.tau

    @property
    def decay_floor(self) -> float:
        """2m/|eta|, the slowest transverse decay rate."""
        return 2.0 * self.mass / abs(self.eta)


class FormFactorKind(str, Enum):
    HERMITE = "hermite"
    SAMPLED = "sampled"


class LineFormFactor(BaseModel):
    """Momentum profile Xi(k) of a line bound state, times the phase exp(i k y0)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: FormFactorKind
    coefficients: Optional[np.ndarray] = None
    k_grid: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    shift_y0: float = 0.0

    @model_validator(mode="after")
    def check_representation(self) -> "LineFormFactor":
        if self.kind == FormFactorKind.HERMITE:
            if self.coefficients is None or self.coefficients.ndim != 1 or self.coefficients.size == 0:
                raise DomainError("Hermite form factor needs a non-empty coefficient vector")
            if self.coefficients.size > MAX_HERMITE_ORDER + 1:
                raise DomainError(f"Hermite orders above {MAX_HERMITE_ORDER} are not supported")
        else:
            if self.k_grid is None or self.values is None:
                raise DomainError("sampled form factor needs k_grid and values")
            if self.k_grid.shape != self.values.shape or self.k_grid.ndim != 1 or self.k_grid.size < 4:
                raise DomainError("k_grid and values must be 1-D arrays of equal length >= 4")
            if np.any(np.diff(self.k_grid) <= 0.0):
                raise DomainError("k_grid must be strictly increasing")
        return self

    @classmethod
    def hermite(cls, coefficients, shift_y0: float = 0.0) -> "LineFormFactor":
        return cls(
            kind=FormFactorKind.HERMITE,
            coefficients=np.asarray(coefficients, dtype=complex),
            shift_y0=shift_y0,
        )

    @classmethod
    def sampled(cls, k_grid, values, shift_y0: float = 0.0) -> "LineFormFactor":
        return cls(
            kind=FormFactorKind.SAMPLED,
            k_grid=np.asarray(k_grid, dtype=float),
            values=np.asarray(values, dtype=complex),
            shift_y0=shift_y0,
        )

    def scaled(self, factor: complex) -> "LineFormFactor":
        if self.kind == FormFactorKind.HERMITE:
            return LineFormFactor.hermite(factor * self.coefficients, self.shift_y0)
        return LineFormFactor.sampled(self.k_grid, factor * self.values, self.shift_y0)


class LambdaMatrix(BaseModel):
    """Transmission matrix: psi(0+, y) = Lambda psi(0-, y)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray

    def square_defect(self) -> float:
        """max |(Lambda^2 + 1)_ij|"""
        return float(np.max(np.abs(self.entries @ self.entries + np.eye(2))))


class KQuadrature(BaseModel):
    """Gauss-Legendre rule for the momentum integral; cutoff None means automatic."""

    model_config = ConfigDict(frozen=True)

    nodes: int = Field(default=400, ge=8)
    cutoff: Optional[float] = Field(default=None, gt=0)
    tol: Optional[float] = None


class PlaneQuadrature(BaseModel):
    """Tensor Gauss-Legendre rule on the half-planes x < 0 and x > 0.

    Unset extents scale with 1 / decay_floor; unset y panels are about two units wide.
    """

    model_config = ConfigDict(frozen=True)

    x_max: Optional[float] = None
    y_half_width: Optional[float] = None
    x_panels: int = 10
    y_panels: Optional[int] = None
    nodes_per_panel: int = 24


class Moment(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: float
    var: float

    def as_tuple(self) -> Tuple[float, float]:
        return self.mean, self.var


class LineObservables(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigma3: Moment
    x: Moment
    y: Optional[Moment] = None
    vx: Moment
    vy: Moment
