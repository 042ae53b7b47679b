import math

from pydantic import BaseModel, ConfigDict, Field, computed_field


class ScaledBesselPair(BaseModel):
    """e^{-t} I_k(t) and e^{t} K_k(t) together with the logs of the unscaled values."""

    model_config = ConfigDict(frozen=True)

    order: int = Field(ge=0)
    argument: float = Field(gt=0)
    log_i: float
    log_k: float

    @computed_field
    @property
    def i_scaled(self) -> float:
        return math.exp(self.log_i - self.argument)

    @computed_field
    @property
    def k_scaled(self) -> float:
        return math.exp(self.log_k + self.argument)


class BesselProductRatio(BaseModel):
    model_config = ConfigDict(frozen=True)

    order: int
    argument: float = Field(gt=0)
    product_k: float
    ratio_f: float
