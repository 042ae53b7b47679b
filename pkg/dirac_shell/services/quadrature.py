"""
Composite Gauss-Legendre rules.
"""
import logging
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from dirac_shell.core.config import settings
from dirac_shell.core.errors import DomainError
from dirac_shell.models.circle import RadialGrid

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def _legendre_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_rule(breakpoints: Sequence[float], n: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of an n-point rule on every panel between consecutive breakpoints."""
    n = n or settings.QUAD_NODES_PER_PANEL
    edges = np.asarray(breakpoints, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0.0):
        raise DomainError("breakpoints must be a strictly increasing sequence of at least two values")
    x, w = _legendre_rule(n)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def geometric_breakpoints(a: float, b: float, panels: int, toward: str) -> np.ndarray:
    """Breakpoints on [a, b] halving panel width toward one end ("a" or "b")."""
    if toward not in ("a", "b"):
        raise DomainError(f"toward must be 'a' or 'b', got {toward!r}")
    fractions = 1.0 - 0.5 ** np.arange(panels + 1)
    fractions = np.append(fractions, 1.0)
    if toward == "b":
        return a + (b - a) * fractions
    return (b - (b - a) * fractions)[::-1]


def radial_grid(
    radius: float,
    decay_rate: float,
    n: Optional[int] = None,
    panels: Optional[int] = None,
) -> RadialGrid:
    """Quadrature grid for radial integrals that kink at r = R.

    The exterior is truncated at R + 40 / decay_rate, beyond which the bound state
    carries less than exp(-80) of its mass.
    """
    if radius <= 0.0 or decay_rate <= 0.0:
        raise DomainError(f"radius and decay rate must be positive, got {radius}, {decay_rate}")
    panels = panels or settings.GEOMETRIC_PANELS
    r_max = radius + 40.0 / decay_rate
    inner_nodes, inner_weights = composite_rule(geometric_breakpoints(0.0, radius, panels, "b"), n)
    outer_nodes, outer_weights = composite_rule(geometric_breakpoints(radius, r_max, panels, "a"), n)
    logger.debug("Radial grid R=%g r_max=%g with %d nodes", radius, r_max, inner_nodes.size + outer_nodes.size)
    return RadialGrid(
        radius=radius,
        r_max=r_max,
        interior_nodes=inner_nodes,
        interior_weights=inner_weights,
        exterior_nodes=outer_nodes,
        exterior_weights=outer_weights,
    )
