import math

import numpy as np
import pytest
from scipy import special

from speclab.eigenbasis import (
    MODE_CSV_HEADER,
    BoundaryCondition,
    DomainKind,
    DomainSpec,
    ModeFamily,
    ball_mode,
    degenerate_clusters,
    disk_mode,
    eigenvalue_list,
    enumerate_modes,
    evaluate_mode,
    make_family,
    modes_to_rows,
    rectangle_mode,
    torus_exponential_mode,
    torus_mode,
    weyl_constant,
)
from speclab.errors import DomainError, ResourceLimitError
from speclab.quadrature import build_grid, integrate, sample
from speclab.special_functions import bessel_zero


def test_domain_geometry():
    assert DomainSpec.torus(2).volume == pytest.approx(4 * math.pi ** 2)
    assert DomainSpec.disk().volume == pytest.approx(math.pi)
    assert DomainSpec.ball().volume == pytest.approx(4 * math.pi / 3)
    assert DomainSpec.rectangle(2.0, 1.0).inradius == 0.5
    assert not DomainSpec.torus(3).has_boundary
    assert DomainSpec.disk().boundary_distance([0.6, 0.0]) == pytest.approx(0.4)


def test_domain_rejects_bad_shapes():
    with pytest.raises(DomainError):
        DomainSpec.torus(4)
    with pytest.raises(DomainError):
        DomainSpec.rectangle(-1.0, 1.0)


def test_bc_checks(torus, disk):
    with pytest.raises(DomainError):
        torus.check_bc(BoundaryCondition.DIRICHLET)
    with pytest.raises(DomainError):
        disk.check_bc(BoundaryCondition.NONE)
    assert disk.check_bc("neumann") is BoundaryCondition.NEUMANN


@pytest.mark.parametrize("mode", [
    disk_mode(0, 3),
    disk_mode(2, 2, parity="sin"),
    disk_mode(4, 1, BoundaryCondition.NEUMANN),
    disk_mode(0, 2, BoundaryCondition.NEUMANN),
    torus_mode((2, 1)),
    torus_mode((1, -3), "sin"),
    rectangle_mode(2, 3),
    rectangle_mode(0, 2, BoundaryCondition.NEUMANN),
    ball_mode(2),
    ball_mode(2, BoundaryCondition.NEUMANN),
])
def test_modes_are_normalized(mode):
    grid = build_grid(mode.domain, mode.lam, p_max=2.0)
    assert integrate(grid, sample(mode, grid) ** 2) == pytest.approx(1.0, abs=1e-6)


def test_exponential_mode_is_normalized():
    mode = torus_exponential_mode((1, 2))
    grid = build_grid(mode.domain, mode.lam, p_max=2.0)
    values = sample(mode, grid)
    assert integrate(grid, np.abs(values) ** 2) == pytest.approx(1.0, abs=1e-10)


def test_disk_dirichlet_vanishes_on_boundary():
    mode = disk_mode(3, 2)
    theta = np.linspace(0, 2 * math.pi, 17)
    points = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    assert np.abs(evaluate_mode(mode, points)).max() < 1e-10


def test_disk_neumann_normal_derivative_vanishes():
    mode = disk_mode(2, 3, BoundaryCondition.NEUMANN)
    h = 1e-6
    inside = evaluate_mode(mode, [1 - h, 0.0])
    edge = evaluate_mode(mode, [1.0, 0.0])
    assert abs(edge - inside) / h < 1e-3 * mode.lam * abs(mode.norm)


def test_helmholtz_residual_by_finite_differences():
    mode = disk_mode(2, 3)
    x0 = np.array([0.3, 0.2])
    h = 1e-3
    center = evaluate_mode(mode, x0)
    laplacian = sum(evaluate_mode(mode, x0 + h * e) + evaluate_mode(mode, x0 - h * e) - 2 * center
                    for e in np.eye(2)) / h ** 2
    assert abs(laplacian + mode.lam ** 2 * center) < 1e-3 * mode.lam ** 2 * abs(mode.norm)


def test_points_outside_rejected(disk):
    with pytest.raises(DomainError):
        evaluate_mode(disk_mode(0, 1), [0.9, 0.9])
    with pytest.raises(DomainError):
        evaluate_mode(rectangle_mode(1, 1), [4.0, 1.0])


def test_torus_modes_are_periodic():
    mode = torus_mode((3, -2), "sin")
    x = np.array([0.4, 1.1])
    assert evaluate_mode(mode, x) == pytest.approx(evaluate_mode(mode, x + [2 * math.pi, 0.0]), abs=1e-12)


def test_random_pairs_are_orthogonal(rng):
    modes = enumerate_modes(DomainSpec.disk(), BoundaryCondition.DIRICHLET, 15.0)
    grid = build_grid(DomainSpec.disk(), 15.0, p_max=2.0)
    for _ in range(8):
        i, j = rng.choice(len(modes), size=2, replace=False)
        product = integrate(grid, sample(modes[i], grid) * sample(modes[j], grid))
        assert abs(product) < 1e-6


def test_disk_spectrum_is_bessel_zeros():
    modes = enumerate_modes(DomainSpec.disk(), BoundaryCondition.DIRICHLET, 12.0)
    for mode in modes:
        m, k = mode.quantum
        assert mode.lam == pytest.approx(bessel_zero(m, k).location, abs=1e-12)
        assert mode.lam <= 12.0
    assert [mode.parity for mode in modes[:3]] == ["const", "cos", "sin"]


def test_enumeration_is_sorted_and_complete(torus):
    modes = enumerate_modes(torus, BoundaryCondition.NONE, 2.0)
    lams = [mode.lam for mode in modes]
    assert lams == sorted(lams)
    # 0, |a|=1 (4 vectors), |a|=√2 (4 vectors), |a|=2 (4 vectors)
    assert len(modes) == 13


def test_ball_spectrum():
    dirichlet = enumerate_modes(DomainSpec.ball(), BoundaryCondition.DIRICHLET, 10.0)
    assert [mode.lam for mode in dirichlet] == pytest.approx([math.pi, 2 * math.pi, 3 * math.pi])
    neumann = enumerate_modes(DomainSpec.ball(), BoundaryCondition.NEUMANN, 8.0)
    assert neumann[0].lam == 0.0
    assert neumann[1].lam == pytest.approx(4.493409457909064, abs=1e-10)
    assert math.tan(neumann[1].lam) == pytest.approx(neumann[1].lam, rel=1e-8)


def test_enumeration_limits(torus):
    with pytest.raises(ResourceLimitError):
        enumerate_modes(torus, BoundaryCondition.NONE, 600.0)
    with pytest.raises(DomainError):
        enumerate_modes(torus, BoundaryCondition.NONE, -1.0)


def test_count_monotone_in_lambda(disk):
    counts = [len(eigenvalue_list(disk, BoundaryCondition.NEUMANN, lam)) for lam in range(0, 30, 3)]
    assert counts == sorted(counts)
    assert counts[0] == 1


@pytest.mark.parametrize("domain, bc", [
    (DomainSpec.torus(2), BoundaryCondition.NONE),
    (DomainSpec.rectangle(), BoundaryCondition.DIRICHLET),
    (DomainSpec.disk(), BoundaryCondition.NEUMANN),
    (DomainSpec.ball(), BoundaryCondition.DIRICHLET),
])
def test_eigenvalue_list_matches_modes(domain, bc):
    modes = enumerate_modes(domain, bc, 9.0)
    np.testing.assert_allclose(eigenvalue_list(domain, bc, 9.0), [mode.lam for mode in modes], atol=1e-12)


def test_weyl_constant():
    assert weyl_constant(DomainSpec.torus(2)) == pytest.approx(math.pi)
    assert weyl_constant(DomainSpec.disk()) == pytest.approx(0.25)


def test_degenerate_clusters():
    assert degenerate_clusters([1.0, 1.0, 2.0, 2.0 + 1e-12, 3.0]) == [(1.0, 2), (2.0, 2), (3.0, 1)]


@pytest.mark.parametrize("label", ["disk_radial", "disk_whispering", "torus_standard",
                                   "rectangle_standard", "disk_neumann_radial"])
def test_families_increase(label):
    family = make_family(label, 12)
    assert len(family) == 12
    assert np.all(np.diff(family.lams) > 0)


def test_family_offsets():
    family = make_family("disk_radial", 3, first=5)
    assert [mode.quantum for mode in family.modes] == [(0, 5), (0, 6), (0, 7)]
    whispering = make_family("disk_whispering", 2, first=10)
    assert whispering.modes[0].quantum == (10, 1)


def test_family_rejects_unknown_or_mixed():
    with pytest.raises(DomainError):
        make_family("sphere", 3)
    with pytest.raises(DomainError):
        ModeFamily("mixed", (disk_mode(0, 1), torus_mode((1, 0))))
    with pytest.raises(DomainError):
        ModeFamily("unsorted", (disk_mode(0, 2), disk_mode(0, 1)))


def test_disk_normalization_constants():
    mode = disk_mode(1, 2)
    expected = math.sqrt(2) / abs(special.jv(2, mode.lam)) / math.sqrt(math.pi)
    assert mode.norm == pytest.approx(expected, rel=1e-14)
    assert disk_mode(0, 0, BoundaryCondition.NEUMANN).norm == pytest.approx(1 / math.sqrt(math.pi))


def test_mode_rows():
    rows = modes_to_rows([disk_mode(2, 1, parity="sin"), rectangle_mode(1, 2)])
    assert len(MODE_CSV_HEADER) == len(rows[0])
    assert rows[0][:4] == ("disk", "dirichlet", 2, "1:sin")
    assert rows[1][:4] == ("rectangle", "dirichlet", 1, "2")


def test_kind_labels():
    assert DomainSpec.torus(3).label == "torus3"
    assert DomainSpec.disk().kind is DomainKind.DISK
