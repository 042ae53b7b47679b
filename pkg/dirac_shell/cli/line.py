"""
`dirac-shell line`: densities and statistics of the straight-line bound states.
"""
import logging
import re
from typing import Literal, Optional

import numpy as np
from pydantic import AliasChoices, Field, model_validator

from dirac_shell.cli.common import OutputOptions, RealExpr, coupling_from_flags
from dirac_shell.cli.presets import PRESETS
from dirac_shell.core.errors import DomainError
from dirac_shell.models.circle import CouplingPair
from dirac_shell.models.line import KQuadrature, LineConfig, LineFormFactor
from dirac_shell.models.report import RunManifest
from dirac_shell.services import line_model
from dirac_shell.utils.expressions import parse_coefficients
from dirac_shell.utils.output import render_csv, render_json, write_output

logger = logging.getLogger(__name__)

GRID_COLUMNS = ("x", "y", "density")
OBSERVABLE_COLUMNS = ("observable", "closed_mean", "closed_var", "quadrature_mean", "quadrature_var")
STATISTICS = ("sigma3", "x", "y", "vx", "vy")


def parse_form_factor(spec: str) -> LineFormFactor:
    """b<n>, tilted, hermite:c0,c1,... or file:path.csv"""
    spec = spec.strip()
    if spec == "tilted":
        return line_model.tilted_gaussian_form_factor()
    match = re.fullmatch(r"b(\d+)", spec)
    if match:
        return line_model.hermite_form_factor(int(match.group(1)))
    if spec.startswith("hermite:"):
        return LineFormFactor.hermite(parse_coefficients(spec[len("hermite:"):]))
    if spec.startswith("file:"):
        return line_model.form_factor_from_csv(spec[len("file:"):])
    raise DomainError(f"unknown form factor {spec!r}; use b<n>, tilted, hermite:c0,c1,... or file:path")


class LineCommand(OutputOptions):
    """Tabulate |psi_Xi(x, y)|^2, or with --observables the statistics table."""

    mass: RealExpr = Field(1.0, gt=0, validation_alias=AliasChoices("mass", "m"), description="mass m")
    eta: RealExpr = Field(2.0, description="electrostatic strength")
    tau: RealExpr = Field(0.0, description="Lorentz-scalar strength")
    allow_noncritical: bool = Field(False, description="accept eta^2 - tau^2 != 4")
    xi: str = Field("b0", description="form factor: b<n>, tilted, hermite:c0,c1,... or file:path.csv")
    shift_y0: float = Field(0.0, description="translation y0 applied as exp(i k y0)")
    x_min: float = -3.0
    x_max: float = 3.0
    x_points: int = Field(121, ge=1)
    y_min: float = -3.0
    y_max: float = 3.0
    y_points: int = Field(121, ge=1)
    side: Literal["minus", "plus"] = Field("minus", description="one-sided value used at x = 0")
    k_nodes: int = Field(400, ge=8, description="momentum quadrature nodes")
    observables: bool = Field(False, description="emit closed-form and quadrature statistics instead of the grid")
    figure: Optional[Literal["modplots1", "modplots2"]] = Field(None, description="named figure parameter set")

    @model_validator(mode="after")
    def check_grid(self) -> "LineCommand":
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError("grid bounds must satisfy min <= max")
        return self

    def setup(self):
        if self.figure is not None:
            preset = PRESETS[self.figure]
            eta, tau = preset.couplings[0]
            config = LineConfig(mass=preset.mass, coupling=CouplingPair(eta=eta, tau=tau))
            return config, parse_form_factor(preset.form_factor)
        coupling = coupling_from_flags(self.tau, self.eta, 1, self.allow_noncritical)
        xi = parse_form_factor(self.xi)
        if self.shift_y0:
            xi = xi.model_copy(update={"shift_y0": self.shift_y0})
        return LineConfig(mass=self.mass, coupling=coupling), xi

    def cli_cmd(self) -> None:
        config, xi = self.setup()
        quad = KQuadrature(nodes=self.k_nodes)
        norm = line_model.form_factor_norm(xi, quad)
        parameters = {
            "m": config.mass,
            "eta": config.eta,
            "tau": config.tau,
            "xi": PRESETS[self.figure].form_factor if self.figure else self.xi,
            "shift_y0": xi.shift_y0,
            "k_nodes": self.k_nodes,
        }
        if self.observables:
            if abs(norm - 1.0) > 1e-6:
                logger.warning("Normalizing form factor with ||Xi|| = %.12g", norm)
                xi = xi.scaled(1.0 / norm)
            columns, rows = OBSERVABLE_COLUMNS, observable_rows(config, xi, quad)
        else:
            parameters.update(
                x=[self.x_min, self.x_max, self.x_points],
                y=[self.y_min, self.y_max, self.y_points],
                side=self.side,
            )
            columns, rows = GRID_COLUMNS, self.grid_rows(config, xi, quad)

        manifest = RunManifest(
            command="line",
            parameters=parameters,
            figure=self.figure,
            caption=PRESETS[self.figure].caption if self.figure else None,
            results={"xi_norm": norm, "z_star": -config.coupling.ratio * config.mass},
        )
        if self.format == "json":
            text = render_json(manifest, {"columns": list(columns), "rows": [list(row) for row in rows]})
        else:
            text = render_csv(manifest, columns, rows)
        write_output(text, self.out)

    def grid_rows(self, config: LineConfig, xi: LineFormFactor, quad: KQuadrature):
        xs = np.linspace(self.x_min, self.x_max, self.x_points)
        ys = np.linspace(self.y_min, self.y_max, self.y_points)
        density = np.empty((xs.size, ys.size))
        off_line = xs != 0.0
        if np.any(off_line):
            psi = line_model.psi_on_grid(config, xi, xs[off_line], ys, quad)
            density[off_line] = np.sum(np.abs(psi) ** 2, axis=-1)
        for i in np.flatnonzero(~off_line):
            psi = line_model.evaluate_psi(config, xi, 0.0, ys, quad, side=self.side)
            density[i] = np.sum(np.abs(psi) ** 2, axis=-1)
        return [(float(x), float(y), float(density[i, j])) for i, x in enumerate(xs) for j, y in enumerate(ys)]


def observable_rows(config: LineConfig, xi: LineFormFactor, quad: KQuadrature):
    try:
        closed = line_model.line_observables(config, xi, quad)
    except DomainError as exc:
        logger.warning("Position statistics along the line are undefined: %s", exc)
        closed = line_model.line_observables(config, xi, quad, include_y=False)
    direct = line_model.line_observables_quadrature(config, xi, quad=quad)
    rows = []
    for name in STATISTICS:
        exact = getattr(closed, name)
        measured = getattr(direct, name)
        rows.append(
            (
                name,
                exact.mean if exact else None,
                exact.var if exact else None,
                measured.mean,
                measured.var,
            )
        )
    return rows
