import math

import numpy as np
import pytest
from scipy import special

from speclab.eigenbasis import (
    BoundaryCondition,
    DomainSpec,
    ModeFamily,
    ball_mode,
    disk_mode,
    evaluate_mode,
    make_family,
    rectangle_mode,
    torus_mode,
)
from speclab.errors import DegenerateFitError, DomainError, UnderResolvedGridError
from speclab.norms import (
    FAMILY_TABLE_HEADER,
    boundary_strip_mass,
    family_norm_table,
    fit_power_law,
    function_lp_norm,
    growth_exponent_fit,
    lp_norm,
    mode_norm,
    multistart_sup,
    profile_max,
    sup_norm,
    whispering_bessel_bounds,
)
from speclab.quadrature import build_grid
from speclab.special_functions import whispering_profile


@pytest.mark.parametrize("mode", [disk_mode(0, 4), disk_mode(5, 2), torus_mode((3, 1), "sin"),
                                  rectangle_mode(2, 2), ball_mode(3)])
def test_l2_norm_is_one(mode):
    assert lp_norm(mode, 2.0) == pytest.approx(1.0, abs=1e-8)


def test_lp_norm_rejects_infinite_p():
    with pytest.raises(DomainError):
        lp_norm(disk_mode(0, 1), math.inf)
    with pytest.raises(DomainError):
        lp_norm(disk_mode(0, 1), 0.5)


def test_lp_norm_refuses_a_grid_built_for_lower_powers():
    mode = disk_mode(0, 3)
    l2_grid = build_grid(mode.domain, mode.lam, p_max=2.0)
    assert lp_norm(mode, 2.0, l2_grid) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(UnderResolvedGridError):
        lp_norm(mode, 6.0, l2_grid)
    with pytest.raises(UnderResolvedGridError):
        function_lp_norm(lambda pts: evaluate_mode(mode, pts), 4.0, l2_grid)
    assert lp_norm(mode, 6.0) == pytest.approx(lp_norm(mode, 6.0, build_grid(mode.domain, mode.lam)), rel=1e-10)


def test_torus_sup_and_argmax():
    mode = torus_mode((2, 1), "sin")
    sup = sup_norm(mode)
    assert sup.value == pytest.approx(math.sqrt(2) / (2 * math.pi), rel=1e-12)
    assert abs(evaluate_mode(mode, sup.argmax)) == pytest.approx(sup.value, rel=1e-10)


def test_rectangle_sup():
    sup = sup_norm(rectangle_mode(1, 1))
    assert sup.value == pytest.approx(2 / math.pi, rel=1e-12)
    np.testing.assert_allclose(sup.argmax, [math.pi / 2, math.pi / 2], atol=1e-6)


def test_radial_sup_is_at_origin():
    mode = disk_mode(0, 6)
    sup = sup_norm(mode)
    assert sup.argmax == (0.0, 0.0)
    assert sup.value == pytest.approx(mode.norm)
    assert sup_norm(ball_mode(1)).value == pytest.approx(math.pi / math.sqrt(2 * math.pi))


def test_disk_sup_beats_dense_sampling():
    mode = disk_mode(3, 4, parity="sin")
    r = np.linspace(0.0, 1.0, 20001)
    dense = np.abs(mode.norm * special.jv(3, mode.lam * r)).max()
    sup = sup_norm(mode)
    assert dense - 1e-12 <= sup.value <= dense * (1 + 1e-5)
    assert abs(evaluate_mode(mode, sup.argmax)) == pytest.approx(sup.value, rel=1e-10)


def test_profile_max_refines_between_samples():
    x, value = profile_max(lambda s: np.sin(s), 0.0, 3.0, 100.0, min_samples=4)
    assert x == pytest.approx(math.pi / 2, abs=1e-6)
    assert value == pytest.approx(1.0, abs=1e-12)


def test_multistart_sup_on_torus(torus):
    mode = torus_mode((2, 1))
    grid = build_grid(torus, mode.lam, nodes=16)
    sup = multistart_sup(lambda pts: evaluate_mode(mode, pts), torus, grid)
    assert sup.value == pytest.approx(mode.norm, rel=1e-8)


def test_mode_norm_selectors():
    mode = disk_mode(2, 2)
    assert mode_norm(mode, "sup_ratio") == pytest.approx(sup_norm(mode).value, rel=1e-6)
    assert mode_norm(mode, "lp", p=4.0) == pytest.approx(lp_norm(mode, 4.0), rel=1e-10)
    with pytest.raises(DomainError):
        mode_norm(mode, "l_inf")


def test_fit_power_law_recovers_exponent():
    lams = np.linspace(10.0, 100.0, 12)
    fit = fit_power_law(lams, 3.0 * lams ** 0.5)
    assert fit.exponent == pytest.approx(0.5, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-12)
    assert fit.residual < 1e-12
    assert fit.to_dict()["lambda_max"] == 100.0


def test_fit_power_law_degenerate():
    with pytest.raises(DegenerateFitError):
        fit_power_law([2.0], [1.0])
    with pytest.raises(DegenerateFitError):
        fit_power_law([2.0, 2.0], [1.0, 2.0])
    with pytest.raises(DegenerateFitError):
        fit_power_law([2.0, 3.0], [1.0, 0.0])


def test_growth_fit_needs_enough_modes():
    with pytest.raises(DegenerateFitError):
        growth_exponent_fit(make_family("disk_radial", 5))
    narrow = ModeFamily("narrow", tuple(disk_mode(0, k) for k in range(30, 42)))
    with pytest.raises(DegenerateFitError):
        growth_exponent_fit(narrow)


def test_torus_family_is_flat():
    fit = growth_exponent_fit(make_family("torus_standard", 40), threads=2)
    assert abs(fit.exponent) < 1e-6


def test_disk_radial_family_grows_like_square_root():
    fit = growth_exponent_fit(make_family("disk_radial", 24), threads=2)
    assert fit.exponent == pytest.approx(0.5, abs=0.03)
    assert fit.residual < 0.1


def test_family_table_rows():
    rows = family_norm_table(make_family("disk_whispering", 3, first=4))
    assert len(rows) == 3
    for row in rows:
        assert len(row) == len(FAMILY_TABLE_HEADER)
        lam, sup, l2, l6, ratio, argmax_r = row
        assert l2 == pytest.approx(1.0, abs=1e-8)
        assert ratio == pytest.approx(sup / l2)
        assert l6 <= sup * math.pi ** (1 / 6) * (1 + 1e-8)
        assert 0.0 < argmax_r < 1.0


def test_strip_mass_bounds():
    with pytest.raises(DomainError):
        boundary_strip_mass(torus_mode((1, 0)), 0.1)
    with pytest.raises(DomainError):
        boundary_strip_mass(disk_mode(0, 1), 1.5)
    assert boundary_strip_mass(disk_mode(0, 3), 1.0) == pytest.approx(1.0)
    assert boundary_strip_mass(rectangle_mode(2, 1), math.pi / 2) == pytest.approx(1.0)


def test_whispering_modes_hug_the_boundary():
    width = 0.2
    whispering = boundary_strip_mass(disk_mode(40, 1), width)
    radial = boundary_strip_mass(disk_mode(0, 13), width)
    assert 0.0 <= radial < whispering <= 1.0
    assert whispering > 0.5


def test_neumann_strip_mass_is_a_fraction():
    mass = boundary_strip_mass(disk_mode(3, 2, BoundaryCondition.NEUMANN), 0.3)
    assert 0.0 < mass < 1.0


def test_whispering_bounds():
    with pytest.raises(DomainError):
        whispering_bessel_bounds(20)
    bounds = whispering_bessel_bounds(100, a=1.8557571)
    assert bounds.lower_ok
    assert 0.0 < bounds.kappa < 1.0
    assert not bounds.unit_constant_ok
    assert bounds.C > 0.0 and bounds.c > 1e-12


def test_whispering_envelope_decays_only_in_the_shadow():
    a = 1.8557571
    bounds = whispering_bessel_bounds(100, a=a)
    t = np.linspace(-5.0, 2.0 * a, 400)
    envelope = bounds.C * np.exp(-bounds.c * np.maximum(-t, 0.0) ** 1.5)
    assert np.all(np.abs(whispering_profile(100, t)) <= envelope * (1 + 1e-6))
    assert np.all(envelope[t >= 0] == bounds.C)
    assert envelope[0] < 1e-2 * bounds.C


def test_square_rectangle_sup_norm_is_domain_independent(square):
    assert sup_norm(rectangle_mode(3, 5, domain=square)).value == pytest.approx(2 / math.pi, rel=1e-10)
    assert DomainSpec.rectangle().sides == square.sides
