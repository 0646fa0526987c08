import math

import numpy as np
import pytest

from speclab.boundary_layer import (
    LAYER_HEADER,
    NEUMANN_FACTOR,
    comparison_dirichlet,
    comparison_neumann,
    layer_profile_monotone,
    layer_sweep,
    max_principle_check,
    strip_operator_residual,
    strip_sign_threshold,
)
from speclab.eigenbasis import BoundaryCondition, disk_mode, torus_mode
from speclab.errors import DomainError


def test_dirichlet_comparison_function():
    lam = 40.0
    assert comparison_dirichlet(lam, 1 / lam) == pytest.approx(1.0)
    x = np.linspace(0.0, 1 / lam, 101)
    assert np.all(comparison_dirichlet(lam, x) > 0.07)


def test_neumann_comparison_function():
    lam = 40.0
    assert comparison_neumann(lam, 0.0) == 1.0
    x = np.linspace(0.0, 1 / lam, 101)
    assert np.all(1 / comparison_neumann(lam, x) < NEUMANN_FACTOR)


def test_comparison_outside_strip():
    with pytest.raises(DomainError):
        comparison_dirichlet(10.0, 0.2)
    with pytest.raises(DomainError):
        comparison_neumann(10.0, -0.01)
    with pytest.raises(DomainError):
        comparison_neumann(0.0, 0.0)


def test_dirichlet_residual_is_negative_for_every_lambda():
    for lam in (1.5, 3.0, 10.0, 80.0):
        x = np.linspace(0.0, 1 / lam, 201)
        assert np.max(strip_operator_residual(BoundaryCondition.DIRICHLET, lam, x)) < 0.0


def test_neumann_residual_sign_changes():
    assert strip_operator_residual(BoundaryCondition.NEUMANN, 10.0, 0.1) > 0.0
    x = np.linspace(0.0, 1 / 40.0, 201)
    assert np.max(strip_operator_residual(BoundaryCondition.NEUMANN, 40.0, x)) < 0.0


def test_residual_guards():
    with pytest.raises(DomainError):
        strip_operator_residual(BoundaryCondition.DIRICHLET, 0.5, 0.0)
    with pytest.raises(DomainError):
        strip_operator_residual(BoundaryCondition.NONE, 10.0, 0.0)


def test_sign_thresholds():
    lams = np.arange(2.0, 101.0)
    assert strip_sign_threshold(BoundaryCondition.DIRICHLET, lams) == 2.0
    neumann = strip_sign_threshold(BoundaryCondition.NEUMANN, lams)
    assert 15.0 <= neumann <= 20.0


def test_sign_threshold_nan_when_largest_fails():
    assert math.isnan(strip_sign_threshold(BoundaryCondition.NEUMANN, [5.0, 8.0]))


@pytest.mark.parametrize("bc", [BoundaryCondition.DIRICHLET, BoundaryCondition.NEUMANN])
@pytest.mark.parametrize("m, k", [(0, 8), (5, 4), (30, 1)])
def test_max_principle_holds(bc, m, k):
    check = max_principle_check(disk_mode(m, k, bc))
    assert check.holds
    assert check.width == pytest.approx(1 / check.lam)
    assert check.max_inner > 0.0
    assert check.empirical_factor <= check.factor + 1e-9


def test_dirichlet_layer_maximum_is_inner_edge():
    check = max_principle_check(disk_mode(0, 10))
    assert check.empirical_factor == pytest.approx(1.0, abs=1e-9)
    assert check.as_row()[:3] == ("dirichlet", 0, 10)
    assert len(check.as_row()) == len(LAYER_HEADER)


def test_max_principle_guards():
    with pytest.raises(DomainError):
        max_principle_check(disk_mode(0, 1))
    with pytest.raises(DomainError):
        max_principle_check(torus_mode((10, 3)))


def test_radial_dirichlet_profile_decreases_across_layer():
    assert layer_profile_monotone(disk_mode(0, 12))
    assert not layer_profile_monotone(disk_mode(0, 12, BoundaryCondition.NEUMANN))


def test_layer_sweep():
    checks = layer_sweep(BoundaryCondition.NEUMANN, 20.0, 30.0, threads=2)
    assert checks
    assert all(20.0 <= check.lam <= 30.0 for check in checks)
    assert all(check.mode.parity != "sin" for check in checks)
    assert all(check.holds for check in checks)
    with pytest.raises(DomainError):
        layer_sweep(BoundaryCondition.DIRICHLET, 5.0, 30.0)
