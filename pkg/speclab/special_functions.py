"""Bessel functions of the first kind, their zeros and the whispering-gallery
asymptotics. Everything the disk and ball eigenbases are built on."""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from scipy import special

from speclab.errors import BracketError, DomainError, ResourceLimitError

logger = logging.getLogger(__name__)

MAX_ORDER = 10_000
MAX_INDEX = 10_000

MIN_TABLE = 8
ZERO_RESIDUAL = 1e-10


@dataclass(frozen=True)
class BesselPoint:
    order: int
    argument: float
    value: float
    derivative: float


@dataclass(frozen=True)
class BesselZero:
    order: int
    index: int
    location: float


class ScaledPeak(NamedTuple):
    location: float
    value: float


class WhisperingConstant(NamedTuple):
    a_estimate: float
    spread: float


def _check_order(m, limit: int = MAX_ORDER) -> int:
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)):
        raise DomainError(f"Bessel order must be an integer, got {m!r}")
    if m < 0 or m > limit:
        raise DomainError(f"Bessel order {m} outside 0..{limit}")
    return int(m)


def _check_index(k) -> int:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise DomainError(f"zero index must be an integer, got {k!r}")
    if k < 1 or k > MAX_INDEX:
        raise DomainError(f"zero index {k} outside 1..{MAX_INDEX}")
    return int(k)


def _check_argument(x) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"Bessel argument must be finite, got {x}")
    if x < 0:
        raise DomainError(f"Bessel argument must be nonnegative, got {x}")
    return x


def jv(m: int, x) -> np.ndarray:
    """Vectorised J_m(x)."""
    return special.jv(m, np.asarray(x, dtype=float))


def jvp(m: int, x) -> np.ndarray:
    """Vectorised J_m'(x)."""
    return special.jvp(m, np.asarray(x, dtype=float))


def bessel_j(m: int, x: float) -> BesselPoint:
    m = _check_order(m)
    x = _check_argument(x)
    return BesselPoint(order=m, argument=x,
                       value=float(special.jv(m, x)),
                       derivative=float(special.jvp(m, x)))


def bessel_series(m: int, x: float) -> tuple[float, float]:
    """Ascending power series for (J_m(x), J_m'(x)).

    Accurate for x up to about 12 at small order; used as an oracle.
    """
    m = _check_order(m)
    x = _check_argument(x)
    if x == 0.0:
        return (1.0 if m == 0 else 0.0), (0.5 if m == 1 else 0.0)
    half = 0.5 * x
    term = math.exp(m * math.log(half) - math.lgamma(m + 1))
    values, slopes = [], []
    k = 0
    while True:
        values.append(term)
        slopes.append(term * (2 * k + m) / x)
        k += 1
        term *= -half * half / (k * (m + k))
        if k > half and abs(term) < 1e-18 * max(abs(v) for v in values[-3:]):
            break
        if k > 500:
            break
    return math.fsum(values), math.fsum(slopes)


def bessel_asymptotic(m: int, x: float, terms: int = 5) -> float:
    """Hankel large-argument expansion with `terms` terms in each of P and Q."""
    m = _check_order(m)
    x = _check_argument(x)
    if x == 0.0:
        raise DomainError("asymptotic expansion needs x > 0")
    mu = 4.0 * m * m
    coeffs = [1.0]
    for k in range(1, 2 * terms):
        coeffs.append(coeffs[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    p = math.fsum((-1) ** j * coeffs[2 * j] / x ** (2 * j) for j in range(terms))
    q = math.fsum((-1) ** j * coeffs[2 * j + 1] / x ** (2 * j + 1) for j in range(terms))
    chi = x - 0.5 * m * math.pi - 0.25 * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def asymptotic_amplitude_constant(m: int = 0, xs: Sequence[float] | None = None) -> float:
    """Least-squares fit of c in J_m(s) ~ c s^{-1/2} cos(s - m pi/2 - pi/4)."""
    m = _check_order(m)
    s = np.linspace(200.0, 400.0, 801) if xs is None else np.asarray(xs, dtype=float)
    scaled = jv(m, s) * np.sqrt(s)
    carrier = np.cos(s - 0.5 * m * np.pi - 0.25 * np.pi)
    return float(np.dot(scaled, carrier) / np.dot(carrier, carrier))


def poisson_integral_check(m: int, r: float, nodes: int = 64) -> float:
    """Relative discrepancy between Poisson's integral and J_m(r)."""
    m = _check_order(m, limit=10)
    r = _check_argument(r)
    if r > 20.0:
        raise DomainError(f"Poisson check supports r <= 20, got {r}")
    # Gauss-Jacobi absorbs the (1 - t^2)^(m - 1/2) weight, singular at m = 0.
    t, w = special.roots_jacobi(nodes, m - 0.5, m - 0.5)
    integral = math.fsum(w * np.cos(r * t))
    c_m = math.exp(-m * math.log(2.0) - special.gammaln(m + 0.5)) / math.sqrt(math.pi)
    quadrature = c_m * r ** m * integral
    exact = float(special.jv(m, r))
    return abs(quadrature - exact) / (abs(exact) + 1e-30)


def scaled_bessel_peak(m: int, grid: Sequence[float]) -> ScaledPeak:
    """Maximum of r -> r^{-m} J_m(r) over a radial grid."""
    m = _check_order(m)
    r = np.asarray(grid, dtype=float)
    if r.ndim != 1 or r.size == 0 or r.min() != 0.0:
        raise DomainError("radial grid must be one-dimensional and contain 0")
    if r.max() <= bessel_zero(m, 3).location:
        raise DomainError("radial grid must extend past the third zero")
    limit = math.exp(-m * math.log(2.0) - math.lgamma(m + 1))
    values = np.empty_like(r)
    at_zero = r == 0.0
    values[at_zero] = limit
    with np.errstate(over="ignore", under="ignore"):
        values[~at_zero] = jv(m, r[~at_zero]) * np.exp(-m * np.log(r[~at_zero]))
    best = int(np.argmax(values))
    return ScaledPeak(location=float(r[best]), value=float(values[best]))


def _table_size(count: int) -> int:
    return max(MIN_TABLE, 1 << (int(count) - 1).bit_length())


@lru_cache(maxsize=4096)
def _zero_table(m: int, size: int, derivative: bool) -> np.ndarray:
    """The first `size` positive zeros of J_m (or J_m'), polished by one Newton step.

    scipy leaves out the trivial zero of J_0' at 0.
    """
    if derivative:
        zeros = special.jnp_zeros(m, size)
        f, df = special.jvp(m, zeros), special.jvp(m, zeros, 2)
    else:
        zeros = special.jn_zeros(m, size)
        f, df = special.jv(m, zeros), special.jvp(m, zeros)
    zeros = zeros - f / df
    value = special.jvp(m, zeros) if derivative else special.jv(m, zeros)
    slope = special.jvp(m, zeros, 2) if derivative else special.jvp(m, zeros)
    worst = float(np.max(np.abs(value) / np.maximum(1.0, np.abs(slope))))
    if not (worst <= ZERO_RESIDUAL and np.all(np.diff(zeros) > 0) and zeros[0] > m):
        kind = "J'" if derivative else "J"
        raise BracketError(f"zeros of {kind}_{m} did not converge (residual {worst:.2e})")
    logger.debug("order %d: %d %szeros up to %.6g", m, size, "derivative " if derivative else "", zeros[-1])
    zeros.setflags(write=False)
    return zeros


def _kth_zero(m: int, k: int, derivative: bool) -> float:
    return float(_zero_table(m, _table_size(k), derivative)[k - 1])


@lru_cache(maxsize=16384)
def bessel_zero(m: int, k: int) -> BesselZero:
    m = _check_order(m)
    k = _check_index(k)
    return BesselZero(order=m, index=k, location=_kth_zero(m, k, derivative=False))


@lru_cache(maxsize=16384)
def bessel_deriv_zero(m: int, k: int) -> BesselZero:
    m = _check_order(m)
    k = _check_index(k)
    return BesselZero(order=m, index=k, location=_kth_zero(m, k, derivative=True))


@lru_cache(maxsize=8192)
def bessel_zeros_below(m: int, x_max: float, derivative: bool = False) -> tuple[float, ...]:
    """All positive zeros of J_m (or J_m') that are <= x_max, increasing."""
    m = _check_order(m)
    x_max = _check_argument(x_max)
    # no zeros of J_m or J_m' in (0, m] for m >= 1
    if x_max <= m:
        return ()
    # a zero sitting exactly at x_max is kept
    upper = x_max * (1.0 + 1e-12) + 1e-12
    size = _table_size(max(1, (x_max - m) / math.pi + 2))
    while True:
        if size > _table_size(MAX_INDEX):
            raise ResourceLimitError(f"more than {MAX_INDEX} zeros of order {m} below {x_max:.6g}")
        zeros = _zero_table(m, size, derivative)
        if zeros[-1] > upper:
            break
        size *= 2
    return tuple(float(z) for z in zeros[zeros <= upper])


def whispering_constant_estimate(orders: Sequence[int]) -> WhisperingConstant:
    """Estimate a in j_{m,1} = m + a m^{1/3} + ..., with the spread of the data."""
    orders = [_check_order(m) for m in orders]
    if not orders:
        raise DomainError("need at least one order")
    if min(orders) < 50:
        raise DomainError("whispering asymptotics need orders >= 50")
    m = np.asarray(orders, dtype=float)
    ratios = np.array([(bessel_zero(k, 1).location - k) / k ** (1.0 / 3.0) for k in orders])
    if len(set(orders)) < 2:
        return WhisperingConstant(a_estimate=float(ratios.mean()), spread=0.0)
    # The ratio carries an m^{-2/3} correction; extrapolate it away.
    x = m ** (-2.0 / 3.0)
    slope, intercept = np.polyfit(x, ratios, 1)
    residual = ratios - (intercept + slope * x)
    return WhisperingConstant(a_estimate=float(intercept), spread=float(np.abs(residual).max()))


def whispering_profile(m: int, t) -> np.ndarray:
    """m^{1/3} J_m(m + t m^{1/3}), the Airy-scale transition profile."""
    m = _check_order(m)
    scale = m ** (1.0 / 3.0)
    return scale * jv(m, m + np.asarray(t, dtype=float) * scale)
