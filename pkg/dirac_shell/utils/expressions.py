import math
import re
from typing import List

from dirac_shell.core.errors import DomainError

_NUMBER = r"[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?"
_EXPRESSION = re.compile(rf"^\s*([-+])?\s*({_NUMBER})?\s*\*?\s*(sqrt\s*\(?\s*({_NUMBER})\s*\)?)?\s*$")


def parse_real(text: str) -> float:
    """
    Parse a real flag value: plain numbers, "sqrt13", "2sqrt2", "-sqrt(29)".
    """
    match = _EXPRESSION.match(text.lower())
    if match is None or (match.group(2) is None and match.group(3) is None):
        raise DomainError(f"cannot parse {text!r} as a number or a*sqrt(b)")
    sign = -1.0 if match.group(1) == "-" else 1.0
    factor = float(match.group(2)) if match.group(2) is not None else 1.0
    root = math.sqrt(float(match.group(4))) if match.group(3) is not None else 1.0
    return sign * factor * root


def parse_coefficients(text: str) -> List[complex]:
    """
    Comma-separated Hermite coefficients; each entry is a real expression or a
    Python complex literal such as 0.5+0.5j.
    """
    values = []
    for item in re.split(r"\s*,\s*", text.strip()):
        if not item:
            continue
        try:
            values.append(complex(parse_real(item)))
        except DomainError:
            try:
                values.append(complex(item.replace(" ", "")))
            except ValueError as exc:
                raise DomainError(f"cannot parse Hermite coefficient {item!r}") from exc
    if not values:
        raise DomainError("empty Hermite coefficient list")
    return values
