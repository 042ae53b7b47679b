"""
`dirac-shell eigenfunction`: radial profiles and densities of normalized bound states.
"""
import logging
import math
from typing import List, Literal, Optional

import numpy as np
from pydantic import Field, model_validator

from dirac_shell.cli.common import CircleOptions
from dirac_shell.cli.presets import PRESETS
from dirac_shell.models.circle import CircleConfig, CouplingPair, RadialEigenfunction
from dirac_shell.models.report import RunManifest
from dirac_shell.services import circle_eigenfunctions as eigen
from dirac_shell.utils.output import render_csv, render_json, write_output

logger = logging.getLogger(__name__)

PROFILE_COLUMNS = ("k", "r", "u_re", "u_im", "v_re", "v_im", "density")
DENSITY_COLUMNS = ("k", "r", "theta", "density")


class EigenfunctionCommand(CircleOptions):
    """Tabulate u_k, v_k and |psi_k|^2 on a radial grid (R itself is skipped)."""

    k: List[int] = Field([0], description="angular momenta")
    r_min: float = Field(0.01, gt=0, description="first radius, in units of R")
    r_max: float = Field(3.0, gt=0, description="last radius, in units of R")
    r_points: int = Field(300, ge=2, description="number of radii")
    density: bool = Field(False, description="long-format (r, theta, |psi|^2) output")
    theta_points: int = Field(64, ge=1, description="angles per radius with --density")
    tol: Optional[float] = Field(None, ge=1e-14, description="root tolerance relative to m")
    figure: Optional[Literal["modu", "l2t"]] = Field(None, description="named figure parameter set")

    @model_validator(mode="after")
    def check_grid(self) -> "EigenfunctionCommand":
        if self.r_min >= self.r_max:
            raise ValueError(f"r-min {self.r_min} must be below r-max {self.r_max}")
        return self

    def config(self) -> CircleConfig:
        if self.figure is None:
            return self.circle_config()
        preset = PRESETS[self.figure]
        eta, tau = preset.couplings[0]
        return CircleConfig(mass=preset.mass, radius=preset.radius, coupling=CouplingPair(eta=eta, tau=tau))

    def ks(self) -> List[int]:
        if self.figure is not None and PRESETS[self.figure].ks is not None:
            return list(PRESETS[self.figure].ks)
        return list(self.k)

    def radii(self, radius: float) -> np.ndarray:
        r = radius * np.linspace(self.r_min, self.r_max, self.r_points)
        return r[np.abs(r - radius) > 1e-12 * radius]

    def cli_cmd(self) -> None:
        config = self.config()
        states = [eigen.eigenfunction(config, k, tol=self.tol) for k in self.ks()]
        r = self.radii(config.radius)
        manifest = RunManifest(
            command="eigenfunction",
            parameters={
                "m": config.mass,
                "R": config.radius,
                "eta": config.eta,
                "tau": config.tau,
                "k": self.ks(),
                "r": [self.r_min, self.r_max, self.r_points],
                "theta_points": self.theta_points if self.density else None,
            },
            figure=self.figure,
            caption=PRESETS[self.figure].caption if self.figure else None,
            results={str(eig.k): state_summary(eig) for eig in states},
        )
        if self.density:
            columns, rows = DENSITY_COLUMNS, [row for eig in states for row in density_rows(eig, r, self.theta_points)]
        else:
            columns, rows = PROFILE_COLUMNS, [row for eig in states for row in profile_rows(eig, r)]
        if self.format == "json":
            text = render_json(manifest, {"columns": list(columns), "rows": [list(row) for row in rows]})
        else:
            text = render_csv(manifest, columns, rows)
        write_output(text, self.out)


def state_summary(eig: RadialEigenfunction) -> dict:
    res_v, res_u = eigen.boundary_residual(eig)
    norm = eigen.norm_quadrature(eig)
    if abs(norm - 1.0) > 1e-8:
        logger.warning("k=%d: quadrature norm %.12f is off by more than 1e-8", eig.k, norm)
    return {
        "z_k": eig.z,
        "c_k": eig.c_match,
        "log_abs_c_k": eig.log_abs_c,
        "a_k": eig.a_norm,
        "log_a_k": eig.log_a,
        "j3": str(eig.j3),
        "boundary_residual_v": res_v,
        "boundary_residual_u": res_u,
        "norm": norm,
    }


def profile_rows(eig: RadialEigenfunction, r: np.ndarray):
    u, v = eigen.radial_components(eig, r)
    density = (np.abs(u) ** 2 + np.abs(v) ** 2) / (2.0 * math.pi)
    return [
        (eig.k, float(r[i]), u[i].real, u[i].imag, v[i].real, v[i].imag, float(density[i]))
        for i in range(r.size)
    ]


def density_rows(eig: RadialEigenfunction, r: np.ndarray, theta_points: int):
    theta = 2.0 * math.pi * np.arange(theta_points) / theta_points
    grid = eigen.density_grid(eig, r, theta)
    return [
        (eig.k, float(r[i]), float(theta[j]), float(grid[i, j]))
        for i in range(r.size)
        for j in range(theta.size)
    ]
