"""
Run manifests and verification reports.
"""
import hashlib
import json
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field

from dirac_shell import __version__


class RunManifest(BaseModel):
    """Everything needed to reproduce an output file byte for byte."""

    model_config = ConfigDict(frozen=True)

    command: str
    parameters: Dict[str, Any]
    version: str = __version__
    figure: Optional[str] = None
    caption: Optional[str] = None
    results: Optional[Dict[str, Any]] = None
    checksum: Optional[str] = None

    def with_checksum(self, body: str) -> "RunManifest":
        digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
        return self.model_copy(update={"checksum": digest})

    def header_lines(self) -> List[str]:
        lines = [f"command={self.command}", f"version={self.version}"]
        if self.figure is not None:
            lines.append(f"figure={self.figure}")
        if self.caption is not None:
            lines.append(f"caption={self.caption}")
        lines.append("parameters=" + json.dumps(self.parameters, sort_keys=True, default=str))
        if self.results is not None:
            lines.append("results=" + json.dumps(self.results, sort_keys=True, default=str))
        if self.checksum is not None:
            lines.append(f"sha256={self.checksum}")
        return lines


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    name: str
    passed: bool = Field(alias="pass")
    value: float
    bound: float
    detail: Optional[str] = None


class VerifyReport(BaseModel):
    suite: str
    checks: List[CheckResult] = Field(default_factory=list)

    @computed_field
    @property
    def ok(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]
