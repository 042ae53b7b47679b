"""
Options shared by the circle commands.
"""
from pathlib import Path
from typing import Annotated, Any, Literal, Optional

from pydantic import AliasChoices, BaseModel, BeforeValidator, Field, field_validator

from dirac_shell.models.circle import CircleConfig, CouplingPair
from dirac_shell.utils.expressions import parse_real


def _coerce_real(value: Any) -> Any:
    return parse_real(value) if isinstance(value, str) else value


RealExpr = Annotated[float, BeforeValidator(_coerce_real)]


def coupling_from_flags(
    tau: float, eta: Optional[float], eta_sign: int, allow_noncritical: bool
) -> CouplingPair:
    """eta given directly (checked for criticality) or as sign * sqrt(4 + tau^2)."""
    if eta is None:
        return CouplingPair.from_tau(tau, eta_sign)
    return CouplingPair(eta=eta, tau=tau, allow_noncritical=allow_noncritical)


class OutputOptions(BaseModel):
    format: Literal["csv", "json"] = Field("csv", description="output format")
    out: Optional[Path] = Field(None, description="output file; stdout when omitted")


class CircleOptions(OutputOptions):
    mass: RealExpr = Field(1.0, gt=0, validation_alias=AliasChoices("mass", "m"), description="mass m")
    radius: RealExpr = Field(1.0, gt=0, validation_alias=AliasChoices("radius", "R"), description="circle radius R")
    tau: RealExpr = Field(0.0, description="Lorentz-scalar strength")
    eta: Optional[RealExpr] = Field(None, description="electrostatic strength; default sign * sqrt(4 + tau^2)")
    eta_sign: int = Field(1, description="sign of eta when it is derived from tau (+1 or -1)")
    allow_noncritical: bool = Field(False, description="accept eta^2 - tau^2 != 4 (results unverified)")

    @field_validator("eta_sign")
    @classmethod
    def check_sign(cls, value: int) -> int:
        if value not in (1, -1):
            raise ValueError(f"eta sign must be +1 or -1, got {value}")
        return value

    def circle_config(self) -> CircleConfig:
        coupling = coupling_from_flags(self.tau, self.eta, self.eta_sign, self.allow_noncritical)
        return CircleConfig(mass=self.mass, radius=self.radius, coupling=coupling)

    def circle_parameters(self) -> dict:
        config = self.circle_config()
        return {"m": config.mass, "R": config.radius, "eta": config.eta, "tau": config.tau}
