"""
Named parameter sets for regenerating figure data.
"""
import math
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict


class FigurePreset(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    caption: str
    mass: float = 1.0
    radius: float = 1.0
    couplings: Tuple[Tuple[float, float], ...]
    ks: Optional[Tuple[int, ...]] = None
    form_factor: Optional[str] = None


def _ev() -> FigurePreset:
    taus = (-5.0, 0.0, 5.0)
    return FigurePreset(
        name="ev",
        caption="eigenvalues z_k for eta = +sqrt(4 + tau^2) and tau = -5, 0, 5; m = R = 1",
        couplings=tuple((math.sqrt(4.0 + tau * tau), tau) for tau in taus),
    )


PRESETS: Dict[str, FigurePreset] = {
    "ev": _ev(),
    "modu": FigurePreset(
        name="modu",
        caption="|psi_k|^2 for k = 5, 10, 20 with eta = 2, tau = 0; m = R = 1",
        couplings=((2.0, 0.0),),
        ks=(5, 10, 20),
    ),
    "l2t": FigurePreset(
        name="l2t",
        caption="|psi_k|^2 for eta = 2 sqrt2, tau = -2; m = R = 1",
        couplings=((2.0 * math.sqrt(2.0), -2.0),),
    ),
    "modplots1": FigurePreset(
        name="modplots1",
        caption="|psi_Xi(x, y)|^2 for eta = 2, tau = 0 and Xi(k) = b_0(k) = (2/pi)^(1/4) exp(-k^2); m = 1",
        couplings=((2.0, 0.0),),
        form_factor="b0",
    ),
    "modplots2": FigurePreset(
        name="modplots2",
        caption=(
            "|psi_Xi(x, y)|^2 for eta = sqrt13, tau = -3 and "
            "Xi(k) = (2/sqrt5) (2/pi)^(1/4) (k + 1) exp(-k^2); m = 1"
        ),
        couplings=((math.sqrt(13.0), -3.0),),
        form_factor="tilted",
    ),
}
