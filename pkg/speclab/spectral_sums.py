"""Windowed spectral sums on explicit spectra.

The window is ρ(λ) = A [sin s / s]^{2K} with s = ε(λ - ½)/(2K): its Fourier
transform is a box spline supported in [-ε, ε], and A makes ρ(0) = ρ(1) = 1.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
from scipy.interpolate import BSpline

from speclab.counting import lattice_count
from speclab.eigenbasis import (
    EIGEN_RTOL,
    MAX_LAMBDA,
    BoundaryCondition,
    DomainKind,
    DomainSpec,
    enumerate_modes,
    evaluate_modes_at,
)
from speclab.errors import DomainError, ResourceLimitError
from speclab.quadrature import composite_gauss_legendre
from utils.parallel import parallel_map

logger = logging.getLogger(__name__)

TAIL_RTOL = 1e-12
CUTOFF_GROWTH = 1.25
MAX_LATTICE_RADIUS = 1500
MIN_CARLEMAN_DISTANCE = 0.2
MIN_CARLEMAN_PRODUCT = 10.0
EXPLICIT_EXTRA = 40.0

LOCALITY_HEADER = ("lambda", "smoothed", "continuum", "rel_err")
BAND_HEADER = ("lambda", "band_sup", "ratio")


def sphere_area(n: int) -> float:
    """Area ω_{n-1} of the unit sphere in R^n."""
    return 2 * math.pi if n == 2 else 4 * math.pi


def unit_ball_volume(n: int) -> float:
    return math.pi if n == 2 else 4 * math.pi / 3


@dataclass(frozen=True)
class SpectralWindow:
    eps: float
    K: int

    @property
    def order(self) -> int:
        return 2 * self.K

    @property
    def width(self) -> float:
        """Half-width b of the box whose 2K-fold convolution is the transform."""
        return self.eps / self.order

    @cached_property
    def amplitude(self) -> float:
        s0 = self.eps / (4 * self.K)
        return (math.sin(s0) / s0) ** (-self.order)

    @cached_property
    def _spline(self) -> BSpline:
        n = self.order
        return BSpline.basis_element(np.arange(n + 1) - 0.5 * n, extrapolate=False)

    def rho(self, lam) -> np.ndarray:
        s = self.width * (np.asarray(lam, dtype=float) - 0.5)
        return self.amplitude * np.sinc(s / np.pi) ** self.order

    def rho_hat(self, t) -> np.ndarray:
        """∫ ρ(λ) e^{-iλt} dλ in closed form."""
        t = np.asarray(t, dtype=float)
        spline = np.nan_to_num(self._spline(t / (2 * self.width)), nan=0.0)
        return self.amplitude * (np.pi / self.width) * np.exp(-0.5j * t) * spline

    @property
    def integral(self) -> float:
        return float(np.real(self.rho_hat(0.0)))

    def tail_bound(self, distance) -> np.ndarray:
        """Upper bound for ρ at |λ - ½| >= distance, valid beyond 2K/ε."""
        d = np.asarray(distance, dtype=float)
        return self.amplitude * (1.0 / (self.width * d)) ** self.order


def make_window(eps: float, K: int) -> SpectralWindow:
    eps = float(eps)
    if not (eps > 0 and math.isfinite(eps)):
        raise DomainError(f"ε must be positive and finite, got {eps}")
    if isinstance(K, bool) or not isinstance(K, (int, np.integer)) or K < 2:
        raise DomainError(f"K must be an integer >= 2, got {K!r}")
    if eps / (4 * K) >= 0.5 * math.pi:
        raise DomainError("ε/(4K) must stay below π/2 so that ρ >= 1 on [0, 1]")
    return SpectralWindow(eps, int(K))


class WindowFourierCheck(NamedTuple):
    outside_max: float
    inside_error: float


def window_fourier_check(window: SpectralWindow, step: float = 0.5, half_range: float = 2000.0,
                         points: int = 200) -> WindowFourierCheck:
    """Trapezoid transform of sampled ρ against the closed form.

    Returns the largest transform magnitude found outside (-ε, ε) and the
    largest deviation from the closed form inside, both relative to ρ̂(0).
    """
    count = int(round(half_range / step))
    lam = 0.5 + step * np.arange(-count, count + 1)
    rho = window.rho(lam)
    # aliases of the support repeat every 2π/step
    period = 2 * math.pi / step
    if period <= 2 * window.eps:
        raise DomainError("sampling step too coarse for the window support")
    outside = np.linspace(window.eps, period - window.eps, points)
    inside = np.linspace(-window.eps, window.eps, points)
    scale = window.integral

    def transform(t):
        return step * (np.exp(-1j * np.outer(t, lam)) @ rho)

    outside_max = float(np.abs(transform(outside)).max() / scale)
    inside_error = float(np.abs(transform(inside) - window.rho_hat(inside)).max() / scale)
    return WindowFourierCheck(outside_max, inside_error)


def _shell_bound(n: int, radius) -> np.ndarray:
    # lattice points with |a| in [r, r + 1): at most the volume of the annulus padded by √n/2
    pad = 0.5 * math.sqrt(n)
    r = np.asarray(radius, dtype=float)
    outer = (r + 1 + pad) ** n
    inner = np.maximum(r - pad, 0.0) ** n
    return unit_ball_volume(n) * (outer - inner)


def window_cutoff(window: SpectralWindow, lam: float, n: int, rtol: float = TAIL_RTOL) -> float:
    """Smallest Λ (from 4K/ε, growing by 1.25) whose certified tail is below rtol of the main term."""
    main = sphere_area(n) * max(lam, 1.0) ** (n - 1) * window.integral
    cutoff = 2 * window.order / window.eps
    steps = np.arange(0, 200_000, dtype=float)
    while True:
        d = cutoff + steps
        outward = _shell_bound(n, lam + d)
        inward = np.where(lam - d - 1 >= 0, _shell_bound(n, np.maximum(lam - d - 1, 0.0)), 0.0)
        tail = math.fsum(window.tail_bound(d - 0.5) * (outward + inward))
        if tail < rtol * main:
            logger.debug("window cutoff %.1f at λ = %.1f (tail %.2e)", cutoff, lam, tail)
            return float(cutoff)
        cutoff *= CUTOFF_GROWTH


def _squared_norm_counts(n: int, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Distinct values N = |a|² <= radius² over Z^n with their multiplicities."""
    r = int(math.floor(radius))
    if r > MAX_LATTICE_RADIUS or (n == 3 and r > 300):
        raise ResourceLimitError(f"lattice radius {r} too large for n = {n}")
    axis = np.arange(-r, r + 1, dtype=np.int64) ** 2
    limit = r * r
    if n == 2:
        sq = (axis[:, None] + axis[None, :]).ravel()
    else:
        sq = (axis[:, None, None] + axis[None, :, None] + axis[None, None, :]).ravel()
    counts = np.bincount(sq[sq <= limit])
    values = np.nonzero(counts)[0]
    return values, counts[values]


def _torus_sum(window: SpectralWindow, lam: float, n: int, symmetric: bool) -> float:
    cutoff = window_cutoff(window, lam, n)
    values, counts = _squared_norm_counts(n, lam + cutoff + 1)
    norms = np.sqrt(values.astype(float))
    keep = np.abs(lam - norms) <= cutoff
    terms = window.rho(lam - norms[keep])
    if symmetric:
        terms = terms + window.rho(lam + norms[keep])
    return math.fsum(terms * counts[keep]) / (2 * math.pi) ** n


def _explicit_sum(domain: DomainSpec, bc: BoundaryCondition, x, lam: float,
                  window: SpectralWindow, symmetric: bool, extra: float) -> float:
    top = min(lam + extra, MAX_LAMBDA)
    if top < lam + extra:
        logger.warning("mode sum truncated at λ = %s, below the window cutoff", MAX_LAMBDA)
    modes = enumerate_modes(domain, bc, top)
    lams = np.array([mode.lam for mode in modes])
    values = evaluate_modes_at(modes, np.asarray(x, dtype=float)) ** 2
    weights = window.rho(lam - lams)
    if symmetric:
        weights = weights + window.rho(lam + lams)
    return math.fsum(weights * values)


def smoothed_local_sum(domain: DomainSpec, x, lam: float, window: SpectralWindow,
                       bc: BoundaryCondition = BoundaryCondition.NONE) -> float:
    """Σ_j ρ(λ - λ_j) u_j(x)².

    On the torus this is (2π)^{-n} Σ_a ρ(λ - |a|) for every x; the disk sum runs
    over explicit modes up to λ + Λ_cut.
    """
    lam = float(lam)
    if not 0 <= lam <= MAX_LAMBDA:
        raise DomainError(f"λ must lie in [0, {MAX_LAMBDA}], got {lam}")
    x = domain.require_inside(np.asarray(x, dtype=float))
    if domain.kind is DomainKind.TORUS:
        return _torus_sum(window, lam, domain.dimension, symmetric=False)
    if domain.kind is DomainKind.DISK:
        cutoff = window_cutoff(window, lam, 2)
        return _explicit_sum(domain, bc, x, lam, window, symmetric=False, extra=cutoff)
    raise DomainError(f"smoothed sums are defined on the torus and disk, not {domain.label}")


def continuum_prediction(lam: float, window: SpectralWindow, n: int) -> float:
    """(2π)^{-n} ω_{n-1} ∫_0^∞ [ρ(λ - r) + ρ(λ + r)] r^{n-1} dr."""
    lam = float(lam)
    if lam < 0 or not math.isfinite(lam):
        raise DomainError(f"λ must be finite and nonnegative, got {lam}")
    if n not in (2, 3):
        raise DomainError(f"n must be 2 or 3, got {n}")
    reach = window_cutoff(window, lam, n, rtol=1e-16)
    r, w = composite_gauss_legendre(0.0, lam + 0.5 + reach)
    integrand = (window.rho(lam - r) + window.rho(lam + r)) * r ** (n - 1)
    return sphere_area(n) * math.fsum(w * integrand) / (2 * math.pi) ** n


def locality_table(lams: Sequence[float], window: SpectralWindow, n: int = 2,
                   threads: int = 1) -> list[tuple]:
    """Rows `lambda,smoothed,continuum,rel_err` on the n-torus."""
    domain = DomainSpec.torus(n)
    origin = np.zeros(n)

    def row(lam):
        smoothed = smoothed_local_sum(domain, origin, lam, window)
        continuum = continuum_prediction(lam, window, n)
        return (float(lam), smoothed, continuum, abs(smoothed - continuum) / continuum)
    return parallel_map(row, lams, threads)


def _torus_shell(n: int, low: float, high: float) -> int:
    """Lattice points with low <= |a| <= high."""
    if low <= 0:
        return lattice_count(n, high)
    return lattice_count(n, high) - lattice_count(n, low * (1.0 - 4 * EIGEN_RTOL) - EIGEN_RTOL)


def _band_squared(domain: DomainSpec, bc: BoundaryCondition, x, low: float, high: float) -> float:
    if high < 0:
        return 0.0
    if domain.kind is DomainKind.TORUS:
        return _torus_shell(domain.dimension, max(low, 0.0), high) / (2 * math.pi) ** domain.dimension
    if domain.kind is DomainKind.BALL:
        raise DomainError("ball modes are radial-only; band sums would be incomplete")
    modes = enumerate_modes(domain, bc, high)
    chosen = [mode for mode in modes if mode.lam >= low * (1.0 - EIGEN_RTOL) - EIGEN_RTOL]
    if not chosen:
        return 0.0
    return math.fsum(evaluate_modes_at(chosen, x) ** 2)


def band_function(domain: DomainSpec, bc: BoundaryCondition, x, lam: float) -> float:
    """u_I(x) = √(Σ_{λ_j ∈ [λ-1, λ]} u_j(x)²)."""
    bc = domain.check_bc(bc)
    x = domain.require_inside(np.asarray(x, dtype=float))
    return math.sqrt(_band_squared(domain, bc, x, float(lam) - 1.0, float(lam)))


class BandWindowCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def band_window_inequality(domain: DomainSpec, bc: BoundaryCondition, x, lam: float,
                           window: SpectralWindow, extra: float = EXPLICIT_EXTRA) -> BandWindowCheck:
    """u_{[λ-1,λ]}(x)² against Σ_j [ρ(λ - λ_j) + ρ(λ + λ_j)] u_j(x)².

    Explicit spectra are summed up to λ + min(Λ_cut, extra); dropping terms only
    lowers the right side.
    """
    bc = domain.check_bc(bc)
    x = domain.require_inside(np.asarray(x, dtype=float))
    lam = float(lam)
    lhs = band_function(domain, bc, x, lam) ** 2
    if domain.kind is DomainKind.TORUS:
        rhs = _torus_sum(window, lam, domain.dimension, symmetric=True)
    else:
        cutoff = min(window_cutoff(window, lam, domain.dimension), extra)
        rhs = _explicit_sum(domain, bc, x, lam, window, symmetric=True, extra=cutoff)
    return BandWindowCheck(lhs, rhs, lhs <= rhs + 1e-10)


def _check_interior(domain: DomainSpec, x, lam: float) -> np.ndarray:
    x = domain.require_inside(np.asarray(x, dtype=float))
    if domain.kind is DomainKind.BALL:
        raise DomainError("ball modes are radial-only; spectral sums would be incomplete")
    dist = float(domain.boundary_distance(x))
    if dist < MIN_CARLEMAN_DISTANCE or lam * dist < MIN_CARLEMAN_PRODUCT:
        raise DomainError(f"point at distance {dist:.3g} from the boundary is outside the interior regime")
    return x


def _partial_sum_squared(domain: DomainSpec, bc: BoundaryCondition, x, lam: float) -> float:
    if domain.kind is DomainKind.TORUS:
        return lattice_count(domain.dimension, lam) / (2 * math.pi) ** domain.dimension
    return _band_squared(domain, bc, x, 0.0, lam)


def carleman_ratio(domain: DomainSpec, bc: BoundaryCondition, x, lam: float) -> float:
    """u_{[0,λ]}(x) / (γ' λ^{n/2}) with γ' = (2π)^{-n/2} √vol(B^n)."""
    bc = domain.check_bc(bc)
    lam = float(lam)
    x = _check_interior(domain, x, lam)
    n = domain.dimension
    gamma = (2 * math.pi) ** (-n / 2) * math.sqrt(unit_ball_volume(n))
    return math.sqrt(_partial_sum_squared(domain, bc, x, lam)) / (gamma * lam ** (n / 2))


def sobolev_ratio(domain: DomainSpec, bc: BoundaryCondition, x, lam: float) -> float:
    """u_{[0,λ]}(x) / λ^{n/2}."""
    bc = domain.check_bc(bc)
    x = domain.require_inside(np.asarray(x, dtype=float))
    if domain.kind is DomainKind.BALL:
        raise DomainError("ball modes are radial-only; spectral sums would be incomplete")
    lam = float(lam)
    if lam <= 0:
        raise DomainError("λ must be positive")
    return math.sqrt(_partial_sum_squared(domain, bc, x, lam)) / lam ** (domain.dimension / 2)


def band_sup_table(lams: Sequence[float], n: int = 2, threads: int = 1) -> list[tuple]:
    """Rows `lambda,band_sup,ratio` on the n-torus, where u_{[λ-1,λ]} is constant in x."""
    domain = DomainSpec.torus(n)

    def row(lam):
        sup = band_function(domain, BoundaryCondition.NONE, np.zeros(n), lam)
        return (float(lam), sup, sup / float(lam) ** ((n - 1) / 2))
    return parallel_map(row, lams, threads)
