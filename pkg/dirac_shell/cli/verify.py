"""
`dirac-shell verify`: oracle and property suites with a JSON report.
"""
import json
import logging
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field

from dirac_shell.core.errors import VerificationFailure
from dirac_shell.services.verification import run_suite
from dirac_shell.utils.output import write_output

logger = logging.getLogger(__name__)


class VerifyCommand(BaseModel):
    """Run a verification suite; exits 1 when any check fails."""

    suite: Literal["bessel", "circle", "line", "symmetry", "asymptotics", "all"] = Field(
        "all", description="which checks to run"
    )
    out: Optional[Path] = Field(None, description="report file; stdout when omitted")

    def cli_cmd(self) -> None:
        report = run_suite(self.suite)
        document = {
            "suite": report.suite,
            "checks": [check.model_dump(by_alias=True, exclude_none=True) for check in report.checks],
        }
        write_output(json.dumps(document, indent=2, sort_keys=True) + "\n", self.out)
        failures = report.failures()
        if failures:
            raise VerificationFailure(
                f"{len(failures)} of {len(report.checks)} checks failed: {[c.name for c in failures]}"
            )
