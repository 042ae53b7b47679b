"""
Deterministic CSV and JSON writers.

Every file carries its RunManifest: as '#'-prefixed lines ahead of a CSV body, or as
the "manifest" member of a JSON document. The checksum covers the body only, so equal
manifests and equal data give byte-identical files.
"""
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

import numpy as np

from dirac_shell.models.report import RunManifest

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def _canonical(value: Any) -> Any:
    """Plain JSON types; non-finite floats become strings."""
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else format_value(float(value))
    if isinstance(value, dict):
        return {key: _canonical(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(item) for item in value]
    return value


def render_csv(manifest: RunManifest, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(value) for value in row])
    body = buffer.getvalue()
    stamped = manifest.with_checksum(body)
    header = "".join(f"# {line}\n" for line in stamped.header_lines())
    return header + body


def render_json(manifest: RunManifest, payload: Any) -> str:
    body = json.dumps(_canonical(payload), sort_keys=True, indent=2)
    stamped = manifest.with_checksum(body)
    document = {"manifest": stamped.model_dump(exclude_none=True), "data": _canonical(payload)}
    return json.dumps(document, sort_keys=True, indent=2, default=str) + "\n"


def write_output(text: str, out: Optional[Union[str, Path]] = None) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("Wrote %d bytes to %s", len(text), path)
