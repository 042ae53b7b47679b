import math

import numpy as np
import pytest

from dirac_shell.core.errors import DomainError
from dirac_shell.services import quadrature


def test_composite_rule_is_exact_for_polynomials():
    nodes, weights = quadrature.composite_rule([0.0, 0.5, 2.0], 8)
    assert nodes.size == 16
    assert np.sum(weights * nodes**7) == pytest.approx(2.0**8 / 8.0, rel=1e-14)


def test_composite_rule_rejects_unsorted_breakpoints():
    with pytest.raises(DomainError):
        quadrature.composite_rule([0.0, 1.0, 1.0])
    with pytest.raises(DomainError):
        quadrature.composite_rule([1.0])


def test_geometric_breakpoints_refine_toward_the_requested_end():
    toward_b = quadrature.geometric_breakpoints(0.0, 1.0, 6, "b")
    assert toward_b[0] == 0.0 and toward_b[-1] == 1.0
    widths = np.diff(toward_b)
    assert widths[0] > widths[-2]

    toward_a = quadrature.geometric_breakpoints(1.0, 5.0, 6, "a")
    assert toward_a[0] == pytest.approx(1.0) and toward_a[-1] == 5.0
    assert np.diff(toward_a)[0] < np.diff(toward_a)[-1]

    with pytest.raises(DomainError):
        quadrature.geometric_breakpoints(0.0, 1.0, 4, "c")


def test_radial_grid_never_samples_the_circle():
    grid = quadrature.radial_grid(2.0, 0.5)
    assert grid.r_max == pytest.approx(2.0 + 80.0)
    assert np.all(grid.interior_nodes < 2.0) and np.all(grid.interior_nodes > 0.0)
    assert np.all(grid.exterior_nodes > 2.0) and np.all(grid.exterior_nodes < grid.r_max)
    # a kink at R is integrated to round-off
    total = np.sum(grid.weights * np.exp(-np.abs(grid.nodes - 2.0)))
    assert total == pytest.approx(2.0 - math.exp(-2.0), rel=1e-13)
