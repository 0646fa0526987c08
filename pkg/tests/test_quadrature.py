import math

import numpy as np
import pytest

from speclab.eigenbasis import DomainSpec, ball_mode, disk_mode, evaluate_mode, torus_mode
from speclab.errors import DomainError, UnderResolvedGridError
from speclab.quadrature import (
    build_grid,
    composite_gauss_legendre,
    gauss_legendre,
    integrate,
    layer_width,
    sample,
    sample_function,
)


def test_gauss_legendre_is_exact_for_polynomials():
    x, w = gauss_legendre(0.0, 2.0, 5)
    assert np.dot(w, x ** 9) == pytest.approx(2 ** 10 / 10, rel=1e-13)
    with pytest.raises(DomainError):
        gauss_legendre(0.0, 1.0, 0)


def test_composite_rule():
    x, w = composite_gauss_legendre(0.0, 10.0, panel_width=2.5, order=12)
    assert len(x) == 48
    assert np.dot(w, np.sin(x)) == pytest.approx(1 - math.cos(10.0), abs=1e-12)


@pytest.mark.parametrize("domain, volume", [
    (DomainSpec.torus(2), 4 * math.pi ** 2),
    (DomainSpec.torus(3), 8 * math.pi ** 3),
    (DomainSpec.rectangle(2.0, 3.0), 6.0),
    (DomainSpec.disk(), math.pi),
    (DomainSpec.ball(), 4 * math.pi / 3),
])
def test_total_weight_is_volume(domain, volume):
    grid = build_grid(domain, 5.0, p_max=2.0)
    assert grid.total_weight == pytest.approx(volume, rel=1e-12)


def test_boundary_layer_panel(disk):
    plain = build_grid(disk, 50.0, p_max=2.0)
    layered = build_grid(disk, 50.0, p_max=2.0, boundary_layer=True)
    assert layered.total_weight == pytest.approx(math.pi, rel=1e-12)
    assert layered.shape[0] > plain.shape[0]
    assert np.count_nonzero(layered.axes[0] > 1 - layer_width(50.0)) >= 32


def test_layer_width():
    assert layer_width(1.0) == 0.5
    assert layer_width(1000.0) == pytest.approx(0.06)


def test_torus_fourth_moment(torus):
    mode = torus_mode((2, 1))
    grid = build_grid(torus, mode.lam, p_max=4.0)
    assert integrate(grid, sample(mode, grid) ** 4) == pytest.approx(3 / (8 * math.pi ** 2), rel=1e-12)


def test_fixed_torus_nodes_limit_resolution(torus):
    grid = build_grid(torus, 20.0, p_max=6.0, nodes=64)
    assert grid.shape == (64, 64)
    assert grid.lam_max == pytest.approx(64 / 12)
    assert grid.spacing == pytest.approx(2 * math.pi / 64)


def test_under_resolved_grid_rejected(disk):
    grid = build_grid(disk, 5.0)
    with pytest.raises(UnderResolvedGridError):
        sample(disk_mode(0, 4), grid)
    with pytest.raises(DomainError):
        sample(torus_mode((1, 0)), grid)


def test_grid_remembers_its_power(disk):
    grid = build_grid(disk, 5.0, p_max=2.0)
    assert grid.p_max == 2.0
    grid.require_resolves(disk_mode(0, 1), 2.0)
    with pytest.raises(UnderResolvedGridError, match="p = 6"):
        grid.require_resolves(disk_mode(0, 1), 6.0)


def test_bad_grid_requests(disk, torus):
    with pytest.raises(DomainError):
        build_grid(disk, math.inf)
    with pytest.raises(DomainError):
        build_grid(disk, 5.0, p_max=0.5)
    with pytest.raises(DomainError):
        build_grid(DomainSpec.torus(3), 5.0, nodes=400)


def test_integrate_checks_shape(disk):
    grid = build_grid(disk, 5.0)
    with pytest.raises(DomainError):
        integrate(grid, np.zeros(3))


@pytest.mark.parametrize("mode", [disk_mode(3, 2, parity="sin"), ball_mode(3), torus_mode((1, 2), "sin")])
def test_separable_sampling_matches_pointwise(mode):
    grid = build_grid(mode.domain, mode.lam, p_max=2.0)
    np.testing.assert_allclose(sample(mode, grid),
                               sample_function(lambda pts: evaluate_mode(mode, pts), grid), atol=1e-12)


def test_sample_function_checks_shape(disk):
    grid = build_grid(disk, 5.0)
    with pytest.raises(DomainError):
        sample_function(lambda pts: np.zeros(4), grid)


def test_points_lie_inside(disk, square):
    for domain in (disk, square):
        grid = build_grid(domain, 8.0)
        assert np.all(domain.contains(grid.points()))
