"""L^p and sup norms of eigenmodes, growth-exponent fits along mode families and
the concentration diagnostics of whispering-gallery modes."""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import optimize

from speclab.eigenbasis import (
    DomainKind,
    DomainSpec,
    Eigenmode,
    ModeFamily,
    angular_argmax,
    radial_part,
)
from speclab.errors import DegenerateFitError, DomainError
from speclab.quadrature import (
    QuadratureGrid,
    build_grid,
    gauss_legendre,
    integrate,
    sample,
    sample_function,
)
from speclab.special_functions import whispering_constant_estimate, whispering_profile
from utils.parallel import parallel_map

logger = logging.getLogger(__name__)

SAMPLES_PER_WAVELENGTH = 30
FIT_TAIL = 0.8
MIN_FIT_MODES = 10
MIN_FIT_SPREAD = 4.0
WHISPERING_ORDERS = (100, 200, 400)

NORM_SELECTORS = ("sup", "l2", "lp", "sup_ratio", "lp_ratio")
FAMILY_TABLE_HEADER = ("lambda", "sup", "l2", "l6", "ratio", "argmax_r")


class SupNorm(NamedTuple):
    value: float
    argmax: tuple[float, ...]


class WhisperingBounds(NamedTuple):
    lower_ok: bool
    C: float
    c: float
    kappa: float
    unit_constant_ok: bool


@dataclass(frozen=True)
class GrowthFit:
    exponent: float
    intercept: float
    residual: float
    lambda_min: float
    lambda_max: float

    def to_dict(self) -> dict:
        return asdict(self)


def _mode_grid(mode: Eigenmode, p: float, scale: float) -> QuadratureGrid:
    whispering = mode.domain.kind is DomainKind.DISK and mode.order > 0
    return build_grid(mode.domain, mode.lam, p_max=max(p, 2.0), scale=scale,
                      boundary_layer=whispering)


def lp_norm(mode: Eigenmode, p: float, grid: QuadratureGrid | None = None,
            scale: float = 1.0) -> float:
    p = float(p)
    if not (1.0 <= p < math.inf):
        raise DomainError(f"p must lie in [1, ∞), got {p}")
    grid = grid or _mode_grid(mode, p, scale)
    grid.require_resolves(mode, p)
    values = np.abs(sample(mode, grid))
    return float(integrate(grid, values ** p)) ** (1.0 / p)


def function_lp_norm(fn: Callable[[np.ndarray], np.ndarray], p: float,
                     grid: QuadratureGrid) -> float:
    grid.require_power(p)
    values = np.abs(sample_function(fn, grid))
    return float(integrate(grid, values ** p)) ** (1.0 / p)


def profile_max(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                wavelength: float, min_samples: int = 64) -> tuple[float, float]:
    """(location, value) of the maximum of |f| on [lo, hi].

    Dense sampling at 30 points per wavelength, then bounded refinement between
    the neighbours of the best sample.
    """
    count = max(min_samples, math.ceil(SAMPLES_PER_WAVELENGTH * (hi - lo) / wavelength) + 1)
    xs = np.linspace(lo, hi, count)
    values = np.abs(f(xs))
    best = int(np.argmax(values))
    left, right = xs[max(best - 1, 0)], xs[min(best + 1, count - 1)]
    x_best, v_best = float(xs[best]), float(values[best])
    if right > left:
        res = optimize.minimize_scalar(lambda x: -abs(float(f(np.asarray(x)))),
                                       bounds=(left, right), method="bounded",
                                       options={"xatol": 1e-13})
        if -res.fun > v_best:
            x_best, v_best = float(res.x), float(-res.fun)
    return x_best, v_best


def sup_norm(mode: Eigenmode) -> SupNorm:
    """max |u| with a point where it is attained."""
    kind = mode.domain.kind
    if kind is DomainKind.TORUS:
        n = mode.domain.dimension
        if mode.parity in ("const", "exp"):
            return SupNorm(mode.norm, (0.0,) * n)
        trig = np.cos if mode.parity == "cos" else np.sin
        phi, value = profile_max(lambda s: mode.norm * trig(s), 0.0, math.pi, 2 * math.pi)
        a = np.asarray(mode.quantum, dtype=float)
        return SupNorm(value, tuple(float(c) for c in phi * a / a.dot(a)))
    if kind is DomainKind.RECTANGLE:
        trig = np.sin if mode.parity == "sin" else np.cos
        location, value = [], mode.norm
        for index, side in zip(mode.quantum, mode.domain.sides):
            if index == 0:
                location.append(0.0)
                continue
            x, v = profile_max(lambda s: trig(index * np.pi * s / side), 0.0, side, 2 * side / index)
            location.append(x)
            value *= v
        return SupNorm(value, tuple(location))
    n = mode.domain.dimension
    if mode.order == 0:
        # J_0 and sin(s)/s both peak at the origin.
        return SupNorm(abs(float(radial_part(mode, 0.0))), (0.0,) * n)
    r, value = profile_max(lambda s: radial_part(mode, s), 0.0, 1.0, 2 * math.pi / mode.lam)
    theta = angular_argmax(mode)
    return SupNorm(value, (r * math.cos(theta), r * math.sin(theta)))


def _project(domain: DomainSpec, x: np.ndarray) -> np.ndarray:
    if domain.kind is DomainKind.TORUS:
        return np.mod(x, 2 * math.pi)
    if domain.kind is DomainKind.RECTANGLE:
        return np.clip(x, 0.0, np.asarray(domain.sides))
    radius = np.linalg.norm(x)
    return x / radius if radius > 1.0 else x


def multistart_sup(fn: Callable[[np.ndarray], np.ndarray], domain: DomainSpec,
                   grid: QuadratureGrid, starts: int = 10) -> SupNorm:
    """Grid search for max |fn| followed by Nelder-Mead ascent from the best nodes.

    Ties between grid nodes go to the lowest flat index.
    """
    points = grid.points().reshape(-1, domain.dimension)
    values = np.abs(sample_function(fn, grid)).ravel()
    order = np.argsort(-values, kind="stable")[:starts]
    best_x, best_v = points[order[0]], float(values[order[0]])

    def objective(x):
        return -abs(complex(fn(_project(domain, x))))

    for index in order:
        res = optimize.minimize(objective, points[index], method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
        if -res.fun > best_v:
            best_x, best_v = _project(domain, res.x), float(-res.fun)
    return SupNorm(best_v, tuple(float(c) for c in best_x))


def mode_norm(mode: Eigenmode, selector: str, p: float = 6.0, scale: float = 1.0) -> float:
    if selector not in NORM_SELECTORS:
        raise DomainError(f"unknown norm selector {selector!r}; expected one of {', '.join(NORM_SELECTORS)}")
    if selector == "sup":
        return sup_norm(mode).value
    if selector == "l2":
        return lp_norm(mode, 2.0, scale=scale)
    if selector == "lp":
        return lp_norm(mode, p, scale=scale)
    grid = _mode_grid(mode, p, scale)
    l2 = lp_norm(mode, 2.0, grid)
    top = sup_norm(mode).value if selector == "sup_ratio" else lp_norm(mode, p, grid)
    return top / l2


def fit_power_law(lams: Sequence[float], values: Sequence[float]) -> GrowthFit:
    """Least squares of log value against log λ."""
    lams = np.asarray(lams, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(lams) < 2 or lams.min() <= 0 or np.any(values <= 0):
        raise DegenerateFitError("power-law fit needs at least two positive points")
    x, y = np.log(lams), np.log(values)
    if np.ptp(x) == 0:
        raise DegenerateFitError("power-law fit needs a spread of λ values")
    exponent, intercept = np.polyfit(x, y, 1)
    residual = float(np.abs(y - (intercept + exponent * x)).max())
    return GrowthFit(float(exponent), float(intercept), residual, float(lams.min()), float(lams.max()))


def growth_exponent_fit(family: ModeFamily, norm: str = "sup_ratio", p: float = 6.0,
                        scale: float = 1.0, threads: int = 1) -> GrowthFit:
    """Fit value ~ λ^exponent over the last 80% of the family."""
    if len(family) < MIN_FIT_MODES:
        raise DegenerateFitError(f"need at least {MIN_FIT_MODES} modes, family has {len(family)}")
    lams = family.lams
    positive = lams[lams > 0]
    if positive.size < 2 or positive.max() / positive.min() < MIN_FIT_SPREAD:
        raise DegenerateFitError(f"family must span a λ ratio of at least {MIN_FIT_SPREAD}")
    start = int(math.floor((1.0 - FIT_TAIL) * len(family)))
    modes = family.modes[start:]
    values = parallel_map(lambda mode: mode_norm(mode, norm, p, scale), modes, threads)
    fit = fit_power_law([mode.lam for mode in modes], values)
    logger.info("%s %s fit: exponent %.4f residual %.3g over λ in [%.4g, %.4g]",
                family.label, norm, fit.exponent, fit.residual, fit.lambda_min, fit.lambda_max)
    return fit


def family_norm_table(family: ModeFamily, scale: float = 1.0,
                      threads: int = 1) -> list[tuple]:
    """Rows `lambda,sup,l2,l6,ratio,argmax_r` for every mode of the family."""
    def row(mode: Eigenmode) -> tuple:
        grid = _mode_grid(mode, 6.0, scale)
        sup = sup_norm(mode)
        l2 = lp_norm(mode, 2.0, grid)
        l6 = lp_norm(mode, 6.0, grid)
        return (mode.lam, sup.value, l2, l6, sup.value / l2, float(np.linalg.norm(sup.argmax)))

    return parallel_map(row, family.modes, threads)


def _radial_mass(mode: Eigenmode, lo: float, hi: float) -> float:
    lam = max(mode.lam, 1.0)
    count = max(64, math.ceil(2.0 * lam * (hi - lo)) + 32)
    r, w = gauss_legendre(lo, hi, count)
    power = mode.domain.dimension - 1
    return math.fsum(w * radial_part(mode, r) ** 2 * r ** power)


def _axis_fraction(trig, index: int, side: float, width: float) -> float:
    count = max(64, 3 * index + 32)
    x, w = gauss_legendre(0.0, side, count)
    inner, wi = gauss_legendre(width, side - width, count)
    total = math.fsum(w * trig(index * np.pi * x / side) ** 2)
    return math.fsum(wi * trig(index * np.pi * inner / side) ** 2) / total


def boundary_strip_mass(mode: Eigenmode, width: float) -> float:
    """Fraction of ∫u² carried by {dist(x, ∂M) < width}."""
    domain = mode.domain
    if not domain.has_boundary:
        raise DomainError("the torus has no boundary strip")
    width = float(width)
    if not 0.0 < width <= domain.inradius:
        raise DomainError(f"strip width must lie in (0, {domain.inradius}], got {width}")
    if domain.kind is DomainKind.RECTANGLE:
        trig = np.sin if mode.parity == "sin" else np.cos
        inside = 1.0
        for index, side in zip(mode.quantum, domain.sides):
            inside *= _axis_fraction(trig, index, side, width)
        return min(max(1.0 - inside, 0.0), 1.0)
    strip = _radial_mass(mode, 1.0 - width, 1.0)
    core = _radial_mass(mode, 0.0, 1.0 - width) if width < 1.0 else 0.0
    return strip / (strip + core)


def whispering_bessel_bounds(m: int, a: float | None = None,
                             samples: int = 401) -> WhisperingBounds:
    """Empirical constants in κ m^{-1/3} <= J_m(m + t m^{1/3}) <= C m^{-1/3} e^{-c|t|^{3/2}}.

    κ is the minimum of the scaled profile on [-a/2, a/2]; lower_ok says the
    profile stays positive there and unit_constant_ok whether κ >= 1. (C, c) is
    the least envelope over t in [-5, 2a]. Only the shadow side t < 0 informs c:
    for t >= 0 the profile oscillates without exponential decay, so there the
    envelope is the constant C and |t| in the bound reads as max(-t, 0).
    """
    if m < 50:
        raise DomainError("whispering bounds need m >= 50")
    if a is None:
        a = whispering_constant_estimate(WHISPERING_ORDERS).a_estimate
    inner = np.linspace(-0.5 * a, 0.5 * a, samples)
    kappa = float(whispering_profile(m, inner).min())
    t = np.linspace(-5.0, 2.0 * a, 400)
    y = np.maximum(np.abs(whispering_profile(m, t)), 1e-300)
    s = np.maximum(-t, 0.0) ** 1.5
    # Variables (log C, c); minimise Σ (log C - c s_i) with the envelope above every sample.
    res = optimize.linprog(c=[float(len(t)), -float(s.sum())],
                           A_ub=np.column_stack([-np.ones_like(s), s]), b_ub=-np.log(y),
                           bounds=[(None, None), (0.0, None)], method="highs")
    if not res.success:
        raise DegenerateFitError(f"envelope fit failed: {res.message}")
    log_c, c = res.x
    logger.debug("m=%d: kappa %.4f, C %.4f, c %.4f", m, kappa, math.exp(log_c), c)
    return WhisperingBounds(lower_ok=kappa > 0.0, C=float(math.exp(log_c)), c=float(c),
                            kappa=kappa, unit_constant_ok=kappa >= 1.0)
