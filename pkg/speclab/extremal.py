"""The extremal combination u_y = Σ v_i(y) v_i over an eigenspace, spherical
averages of eigenfunctions and the empirical constant of the local estimate
|u(x0)| <= C λ^{(n-1)/2} R^{-1/2} ‖u‖_{L²(B(x0, R))}."""

import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import optimize

from speclab.eigenbasis import DomainKind, DomainSpec, Eigenmode, evaluate_mode, evaluate_modes_at
from speclab.errors import DomainError, NonOrthonormalError
from speclab.norms import SupNorm, multistart_sup
from speclab.quadrature import QuadratureGrid, build_grid, gauss_legendre, integrate, sample
from utils.parallel import parallel_map

logger = logging.getLogger(__name__)

GRAM_TOL = 1e-5
MIN_LOCAL_LAMBDA_R = 5.0

COEFFICIENT_HEADER = ("index", "domain", "bc", "quantum", "parity", "lambda", "coefficient")
LOCAL_ESTIMATE_HEADER = ("lambda", "center_r", "R", "C_emp")


@dataclass(frozen=True, eq=False)
class CombinedFunction:
    modes: tuple[Eigenmode, ...]
    anchor: tuple[float, ...]
    coefficients: np.ndarray
    grid: QuadratureGrid
    a_value: float
    l2: float
    sup: SupNorm
    slack_bound: float

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        total = np.zeros(pts.shape[:-1])
        for c, mode in zip(self.coefficients, self.modes):
            total = total + c * np.asarray(evaluate_mode(mode, pts))
        return total if total.ndim else total.item()

    @property
    def domain(self) -> DomainSpec:
        return self.modes[0].domain

    @property
    def lam(self) -> float:
        return max(mode.lam for mode in self.modes)

    @property
    def ratio(self) -> float:
        """‖u‖_∞ / ‖u‖_2 achieved by the combination."""
        return self.sup.value / self.l2

    @property
    def lower_bound(self) -> float:
        return math.sqrt(len(self.modes) / self.domain.volume)

    @property
    def slack(self) -> float:
        """How far the achieved ratio falls short of √(m/|M|); 0 when it does not."""
        return max(0.0, self.lower_bound - self.ratio)

    def coefficient_rows(self) -> list[tuple]:
        return [(i, mode.domain.label, mode.bc.value, ":".join(str(q) for q in mode.quantum),
                 mode.parity, mode.lam, float(c))
                for i, (mode, c) in enumerate(zip(self.modes, self.coefficients))]


def gram_matrix(modes: Sequence[Eigenmode], grid: QuadratureGrid) -> np.ndarray:
    samples = [sample(mode, grid) for mode in modes]
    size = len(samples)
    gram = np.empty((size, size))
    for i in range(size):
        for j in range(i, size):
            gram[i, j] = gram[j, i] = float(np.real(integrate(grid, samples[i] * np.conj(samples[j]))))
    return gram


def _a_function(modes: Sequence[Eigenmode]) -> Callable[[np.ndarray], float]:
    def a(y):
        return float(np.sum(evaluate_modes_at(modes, y) ** 2))
    return a


def _project_inside(domain: DomainSpec, y: np.ndarray) -> np.ndarray:
    if domain.kind is DomainKind.TORUS:
        return np.mod(y, 2 * math.pi)
    if domain.kind is DomainKind.RECTANGLE:
        return np.clip(y, 0.0, np.asarray(domain.sides))
    radius = np.linalg.norm(y)
    return y / radius if radius > 1.0 else y


def extremal_combination(modes: Sequence[Eigenmode], grid: QuadratureGrid | None = None,
                         nodes: int | None = None) -> CombinedFunction:
    """u_ȳ = Σ v_i(ȳ) v_i with ȳ maximising a(y) = Σ v_i(y)².

    ȳ is the lowest-index grid maximiser of a, refined by local ascent.
    """
    modes = tuple(modes)
    if not modes:
        raise DomainError("need at least one mode")
    domain = modes[0].domain
    if any(mode.domain != domain for mode in modes):
        raise DomainError("modes must live on one domain")
    if any(mode.parity == "exp" for mode in modes):
        raise DomainError("extremal combinations use the real basis")
    if domain.kind is DomainKind.BALL:
        raise DomainError("ball grids are radial-only; no pointwise argmax search")
    lam = max(mode.lam for mode in modes)
    grid = grid or build_grid(domain, lam, p_max=2.0, nodes=nodes)
    gram = gram_matrix(modes, grid)
    defect = float(np.abs(gram - np.eye(len(modes))).max())
    if defect > GRAM_TOL:
        raise NonOrthonormalError(f"Gram matrix deviates from the identity by {defect:.3g}")
    samples = np.stack([sample(mode, grid) for mode in modes])
    a_grid = (samples ** 2).sum(axis=0)
    flat = int(np.argmax(a_grid))
    points = grid.points().reshape(-1, domain.dimension)
    start = points[flat]
    a = _a_function(modes)
    res = optimize.minimize(lambda y: -a(_project_inside(domain, y)), start, method="Nelder-Mead",
                            options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
    anchor = _project_inside(domain, res.x) if -res.fun > a_grid.ravel()[flat] else start
    coefficients = evaluate_modes_at(modes, anchor)
    a_value = float(np.sum(coefficients ** 2))
    combined = np.tensordot(coefficients, samples, axes=1)
    l2 = math.sqrt(float(integrate(grid, combined ** 2)))
    partial = CombinedFunction(modes, tuple(float(c) for c in anchor), coefficients, grid,
                               a_value, l2, SupNorm(a_value, tuple(float(c) for c in anchor)), 0.0)
    sup = multistart_sup(partial, domain, grid)
    if sup.value < a_value:
        sup = SupNorm(a_value, partial.anchor)
    slack_bound = domain.volume * grid.spacing * lam * a_value
    logger.info("extremal combination of %d modes on %s: a(ȳ)=%.6g ratio=%.6g bound=%.6g",
                len(modes), domain.label, a_value, sup.value / l2, math.sqrt(len(modes) / domain.volume))
    return CombinedFunction(modes, partial.anchor, coefficients, grid, a_value, l2, sup, slack_bound)


class RadialProfile(NamedTuple):
    """h on radii r (r[0] = 0) with the radial quadrature weights of r[1:]."""
    r: np.ndarray
    h: np.ndarray
    weights: np.ndarray
    sphere_area: float
    ball_l2: float


def _sphere_nodes(n: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit directions and weights summing to the area of S^{n-1}."""
    azimuth = 2 * math.pi * np.arange(count) / count
    if n == 2:
        return np.stack([np.cos(azimuth), np.sin(azimuth)], axis=-1), np.full(count, 2 * math.pi / count)
    z, wz = gauss_legendre(-1.0, 1.0, max(16, count // 2))
    rho = np.sqrt(1.0 - z * z)
    dirs = np.stack([np.outer(rho, np.cos(azimuth)), np.outer(rho, np.sin(azimuth)),
                     np.repeat(z[:, None], count, axis=1)], axis=-1).reshape(-1, 3)
    weights = np.outer(wz, np.full(count, 2 * math.pi / count)).ravel()
    return dirs, weights


def _resolve_target(u, domain: DomainSpec | None, lam: float | None):
    if isinstance(u, (Eigenmode, CombinedFunction)):
        return u, u.domain, u.lam
    if domain is None or lam is None:
        raise DomainError("plain callables need an explicit domain and λ")
    return u, domain, float(lam)


def spherical_average(u, center, R: float, radial_nodes: int = 32,
                      domain: DomainSpec | None = None, lam: float | None = None) -> RadialProfile:
    """h(r) = mean of u over the sphere of radius r about center, for r in [0, R]."""
    fn, domain, lam = _resolve_target(u, domain, lam)
    if domain.kind is DomainKind.BALL and domain.dimension != 3:
        raise DomainError("ball domains are three-dimensional")
    center = domain.require_inside(np.asarray(center, dtype=float))
    R = float(R)
    if R <= 0:
        raise DomainError("radius must be positive")
    if float(domain.boundary_distance(center)) < R - 1e-12:
        raise DomainError(f"ball of radius {R} about {center.tolist()} leaves {domain.label}")
    n = domain.dimension
    angular = max(16, 8 * math.ceil(lam * R))
    dirs, wdir = _sphere_nodes(n, angular)
    r, wr = gauss_legendre(0.0, R, max(radial_nodes, math.ceil(2 * lam * R) + 16))
    points = center + r[:, None, None] * dirs[None, :, :]
    values = np.asarray(fn(points), dtype=float)
    area = float(wdir.sum())
    h = values @ wdir / area
    radial_weights = wr * r ** (n - 1)
    ball_l2 = math.sqrt(math.fsum(radial_weights * (values ** 2 @ wdir)))
    at_center = float(np.asarray(fn(center)))
    return RadialProfile(np.concatenate(([0.0], r)), np.concatenate(([at_center], h)),
                         radial_weights, area, ball_l2)


class MinkowskiCheck(NamedTuple):
    average_l2: float
    function_l2: float
    holds: bool


def minkowski_check(u, center, R: float, domain: DomainSpec | None = None,
                    lam: float | None = None) -> MinkowskiCheck:
    """‖h‖_{L²(B)} against ‖u‖_{L²(B)} on the same nodes."""
    profile = spherical_average(u, center, R, domain=domain, lam=lam)
    average = math.sqrt(profile.sphere_area * math.fsum(profile.weights * profile.h[1:] ** 2))
    return MinkowskiCheck(average, profile.ball_l2, average <= profile.ball_l2 * (1.0 + 1e-12) + 1e-14)


def local_estimate_constant(mode: Eigenmode, center, R: float) -> float:
    """C_emp = |u(center)| λ^{-(n-1)/2} R^{1/2} / ‖u‖_{L²(B(center, R))}."""
    if mode.lam * R < MIN_LOCAL_LAMBDA_R:
        raise DomainError(f"need λR >= {MIN_LOCAL_LAMBDA_R}, got {mode.lam * R:.4g}")
    profile = spherical_average(mode, center, R)
    n = mode.domain.dimension
    value = abs(profile.h[0])
    if profile.ball_l2 == 0.0:
        return 0.0
    return value * mode.lam ** (-(n - 1) / 2) * math.sqrt(R) / profile.ball_l2


def local_estimate_sweep(cases: Sequence[tuple[Eigenmode, Sequence[float], float]],
                         threads: int = 1) -> list[tuple]:
    """Rows `lambda,center_r,R,C_emp` for (mode, center, R) cases."""
    def row(case):
        mode, center, R = case
        return (mode.lam, float(np.linalg.norm(center)), float(R),
                local_estimate_constant(mode, center, R))
    return parallel_map(row, cases, threads)
