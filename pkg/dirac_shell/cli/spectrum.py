"""
`dirac-shell spectrum`: eigenvalues z_k over a range of angular momenta.
"""
import logging
import math
from typing import List, Literal, Optional

from pydantic import Field, model_validator

from dirac_shell.cli.common import CircleOptions
from dirac_shell.cli.presets import PRESETS
from dirac_shell.core.config import settings
from dirac_shell.core.errors import SweepIncomplete
from dirac_shell.models.circle import CircleConfig, CouplingPair
from dirac_shell.models.report import RunManifest
from dirac_shell.services.circle_spectrum import SpectrumSweep, asymptotic_eigenvalue, n0_threshold, sweep
from dirac_shell.utils.output import render_csv, render_json, write_output

logger = logging.getLogger(__name__)

COLUMNS = ("eta", "tau", "k", "z_k", "residual", "gap", "asymptotic3", "deviation", "root_count", "status")


class SpectrumCommand(CircleOptions):
    """Solve the fiber eigenvalue equation for every k in [k-min, k-max]."""

    k_min: int = Field(-10, description="smallest angular momentum")
    k_max: int = Field(10, description="largest angular momentum")
    tol: float = Field(settings.DEFAULT_TOL, ge=1e-14, description="root tolerance relative to m")
    threads: Optional[int] = Field(None, ge=1, description="worker threads, capped by DIRAC_SHELL_THREADS")
    figure: Optional[Literal["ev"]] = Field(None, description="named figure parameter set")

    @model_validator(mode="after")
    def check_range(self) -> "SpectrumCommand":
        if self.k_min > self.k_max:
            raise ValueError(f"empty k range: k-min {self.k_min} > k-max {self.k_max}")
        return self

    def configs(self) -> List[CircleConfig]:
        if self.figure is None:
            return [self.circle_config()]
        preset = PRESETS[self.figure]
        return [
            CircleConfig(mass=preset.mass, radius=preset.radius, coupling=CouplingPair(eta=eta, tau=tau))
            for eta, tau in preset.couplings
        ]

    def cli_cmd(self) -> None:
        sweeps = [sweep(config, self.k_min, self.k_max, tol=self.tol, threads=self.threads) for config in self.configs()]
        manifest = self.manifest(sweeps)
        if self.format == "json":
            text = render_json(manifest, {"series": [series_payload(s) for s in sweeps]})
        else:
            text = render_csv(manifest, COLUMNS, [row for s in sweeps for row in table_rows(s)])
        write_output(text, self.out)

        failed = [f.k for s in sweeps for f in s.failures]
        if failed:
            raise SweepIncomplete(f"{len(failed)} fiber(s) failed: k = {failed}")

    def manifest(self, sweeps: List[SpectrumSweep]) -> RunManifest:
        first = sweeps[0].config
        parameters = {
            "m": first.mass,
            "R": first.radius,
            "couplings": [[s.config.eta, s.config.tau] for s in sweeps],
            "k_min": self.k_min,
            "k_max": self.k_max,
            "tol": self.tol,
            "grid_size": settings.GRID_SIZE,
        }
        preset = PRESETS.get(self.figure) if self.figure else None
        return RunManifest(
            command="spectrum",
            parameters=parameters,
            figure=self.figure,
            caption=preset.caption if preset else None,
            results={
                "z_star": [s.z_star for s in sweeps],
                "n0": [n0_threshold(s.config) for s in sweeps],
            },
        )


def _asymptotic(config: CircleConfig, k: int) -> float:
    return asymptotic_eigenvalue(config, k, 3) if k != 0 else math.nan


def table_rows(result: SpectrumSweep):
    config = result.config
    rows = []
    for record in result.records:
        prediction = _asymptotic(config, record.k)
        rows.append(
            (
                config.eta,
                config.tau,
                record.k,
                record.z,
                record.residual,
                record.gap,
                prediction,
                record.z - prediction,
                record.root_count,
                "anomaly" if record.anomaly else "ok",
            )
        )
    for failure in result.failures:
        rows.append((config.eta, config.tau, failure.k, None, None, None, None, None, 0, failure.error))
    return sorted(rows, key=lambda row: row[2])


def series_payload(result: SpectrumSweep) -> dict:
    config = result.config
    return {
        "eta": config.eta,
        "tau": config.tau,
        "z_star": result.z_star,
        "records": [
            {
                "k": r.k,
                "z_k": r.z,
                "residual": r.residual,
                "gap": r.gap,
                "asymptotic3": _asymptotic(config, r.k),
                "root_count": r.root_count,
                "bracket": list(r.bracket),
            }
            for r in result.records
        ],
        "failures": [f.model_dump() for f in result.failures],
    }
