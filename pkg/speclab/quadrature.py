"""Tensor quadrature grids on the model domains.

Disk: Gauss-Legendre in r (weight r) times the periodic trapezoid in θ, with an
optional extra Gauss-Legendre panel in the boundary layer. Torus: uniform
tensor grid. Rectangle: Gauss-Legendre per axis. Ball: radial Gauss-Legendre
with weight 4πr², for radial functions only.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import special

from speclab.eigenbasis import DomainKind, DomainSpec, Eigenmode, angular_part, radial_part
from speclab.errors import DomainError, UnderResolvedGridError

logger = logging.getLogger(__name__)

MIN_NODES = 32
MIN_RADIAL_NODES = 64
NODES_PER_WAVELENGTH = 10.0
MAX_GRID_POINTS = 40_000_000


@lru_cache(maxsize=256)
def _legendre(count: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = special.roots_legendre(count)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(a: float, b: float, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    if count < 1:
        raise DomainError("need at least one node")
    x, w = _legendre(int(count))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_gauss_legendre(a: float, b: float, panel_width: float = 1.0,
                             order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre on equal panels of width at most panel_width."""
    panels = max(1, math.ceil((b - a) / panel_width))
    edges = np.linspace(a, b, panels + 1)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(lo, hi, order)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def _axis_count(lam: float, length: float, p_max: float, scale: float, floor: int) -> int:
    lam_length = lam * length
    need = max(NODES_PER_WAVELENGTH * lam_length / (2 * math.pi), 0.4 * p_max * lam_length)
    return max(floor, math.ceil(scale * (need + 8.0 * lam_length ** (1.0 / 3.0) + 24.0)))


def _periodic_count(lam: float, p_max: float, scale: float) -> int:
    # Trapezoid is exact for trigonometric degree below the node count.
    need = max(p_max * lam + 16.0, NODES_PER_WAVELENGTH * lam / (2 * math.pi))
    return max(MIN_NODES, math.ceil(scale * need))


def layer_width(lam: float) -> float:
    """Width of the boundary panel used for whispering-gallery modes."""
    return min(0.5, 6.0 * max(lam, 1.0) ** (-2.0 / 3.0))


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Tensor grid: `axes[i]` holds the nodes and `weights[i]` the weights of axis i.

    Disk axes are (r, θ) with the Jacobian r folded into the radial weights.
    """
    domain: DomainSpec
    lam_max: float
    axes: tuple[np.ndarray, ...]
    weights: tuple[np.ndarray, ...]
    p_max: float = 2.0

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.axes)

    @property
    def node_counts(self) -> tuple[int, ...]:
        return self.shape

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    @property
    def total_weight(self) -> float:
        return math.prod(math.fsum(w) for w in self.weights)

    @property
    def spacing(self) -> float:
        """Largest distance between neighbouring nodes along any axis."""
        kind = self.domain.kind
        if kind is DomainKind.TORUS:
            return 2 * math.pi / min(self.shape)
        if kind is DomainKind.DISK:
            r = np.concatenate(([0.0], self.axes[0], [1.0]))
            return max(float(np.diff(r).max()), 2 * math.pi / self.shape[1])
        if kind is DomainKind.RECTANGLE:
            gaps = []
            for side, axis in zip(self.domain.sides, self.axes):
                gaps.append(float(np.diff(np.concatenate(([0.0], axis, [side]))).max()))
            return max(gaps)
        r = np.concatenate(([0.0], self.axes[0], [1.0]))
        return float(np.diff(r).max())

    def points(self) -> np.ndarray:
        """Cartesian coordinates of every node, shape grid.shape + (n,)."""
        kind = self.domain.kind
        if kind is DomainKind.DISK:
            r, theta = self.axes
            return np.stack([np.outer(r, np.cos(theta)), np.outer(r, np.sin(theta))], axis=-1)
        if kind is DomainKind.BALL:
            r = self.axes[0]
            return np.stack([r, np.zeros_like(r), np.zeros_like(r)], axis=-1)
        grids = np.meshgrid(*self.axes, indexing="ij")
        return np.stack(grids, axis=-1)

    def resolves(self, lam: float) -> bool:
        return lam <= self.lam_max * (1.0 + 1e-9) + 1e-9

    def require_power(self, p: float) -> None:
        if p > self.p_max * (1.0 + 1e-12):
            raise UnderResolvedGridError(
                f"grid built for |u|^p with p <= {self.p_max:.6g} cannot integrate p = {p:.6g}")

    def require_resolves(self, mode: Eigenmode, p: float | None = None) -> None:
        if mode.domain != self.domain:
            raise DomainError(f"grid is for {self.domain.label}, mode lives on {mode.domain.label}")
        if not self.resolves(mode.lam):
            raise UnderResolvedGridError(
                f"grid built for λ <= {self.lam_max:.6g} cannot resolve λ = {mode.lam:.6g}")
        if p is not None:
            self.require_power(p)


def build_grid(domain: DomainSpec, lam_max: float, p_max: float = 6.0, scale: float = 1.0,
               boundary_layer: bool = False, nodes: int | None = None) -> QuadratureGrid:
    """Grid resolving every mode with λ <= lam_max raised to powers up to p_max.

    `nodes` fixes the per-axis count (torus and rectangle) and bypasses the
    resolution policy; `scale` multiplies every node count.
    """
    lam = max(float(lam_max), 1.0)
    if not math.isfinite(lam):
        raise DomainError("λ_max must be finite")
    if p_max < 1 or scale <= 0:
        raise DomainError("need p_max >= 1 and scale > 0")
    kind = domain.kind
    if kind is DomainKind.TORUS:
        count = int(nodes) if nodes else _periodic_count(lam, p_max, scale)
        axis = 2 * math.pi * np.arange(count) / count
        axes = (axis,) * domain.dimension
        weights = (np.full(count, 2 * math.pi / count),) * domain.dimension
        resolved = lam if nodes is None else min(lam, 0.5 * count / p_max)
    elif kind is DomainKind.RECTANGLE:
        axes, weights = [], []
        for side in domain.sides:
            count = int(nodes) if nodes else _axis_count(lam, side, p_max, scale, MIN_NODES)
            x, w = gauss_legendre(0.0, side, count)
            axes.append(x)
            weights.append(w)
        axes, weights = tuple(axes), tuple(weights)
        resolved = lam
    else:
        count = _axis_count(lam, 1.0, p_max, scale, MIN_RADIAL_NODES)
        if boundary_layer:
            delta = layer_width(lam)
            r_in, w_in = gauss_legendre(0.0, 1.0 - delta, count)
            r_out, w_out = gauss_legendre(1.0 - delta, 1.0, max(MIN_NODES, count // 4))
            r, w = np.concatenate((r_in, r_out)), np.concatenate((w_in, w_out))
        else:
            r, w = gauss_legendre(0.0, 1.0, count)
        if kind is DomainKind.DISK:
            n_theta = _periodic_count(lam, p_max, scale)
            theta = 2 * math.pi * np.arange(n_theta) / n_theta
            axes = (r, theta)
            weights = (w * r, np.full(n_theta, 2 * math.pi / n_theta))
        else:
            axes = (r,)
            weights = (4 * math.pi * w * r * r,)
        resolved = lam
    grid = QuadratureGrid(domain, float(resolved), axes, weights, float(p_max))
    if grid.size > MAX_GRID_POINTS:
        raise DomainError(f"grid with {grid.size} nodes exceeds {MAX_GRID_POINTS}")
    logger.debug("%s grid %s for λ <= %.6g", domain.label, grid.shape, grid.lam_max)
    return grid


def sample(mode: Eigenmode, grid: QuadratureGrid) -> np.ndarray:
    """Mode values on the grid, shape grid.shape, using separability."""
    grid.require_resolves(mode)
    kind = grid.domain.kind
    if kind is DomainKind.DISK:
        r, theta = grid.axes
        return np.outer(radial_part(mode, r), angular_part(mode, theta))
    if kind is DomainKind.BALL:
        return radial_part(mode, grid.axes[0])
    if kind is DomainKind.RECTANGLE:
        (p, q), (l1, l2) = mode.quantum, grid.domain.sides
        trig = np.sin if mode.parity == "sin" else np.cos
        x, y = grid.axes
        return mode.norm * np.outer(trig(p * np.pi * x / l1), trig(q * np.pi * y / l2))
    phase = sum(np.reshape(c * axis, (1,) * i + (-1,) + (1,) * (len(grid.axes) - i - 1))
                for i, (c, axis) in enumerate(zip(mode.quantum, grid.axes)))
    phase = np.broadcast_to(phase, grid.shape)
    if mode.parity == "exp":
        return mode.norm * np.exp(1j * phase)
    if mode.parity == "cos":
        return mode.norm * np.cos(phase)
    if mode.parity == "sin":
        return mode.norm * np.sin(phase)
    return np.full(grid.shape, mode.norm)


def sample_function(fn: Callable[[np.ndarray], np.ndarray], grid: QuadratureGrid) -> np.ndarray:
    """Values of a vectorised function of Cartesian points on the grid."""
    values = np.asarray(fn(grid.points()))
    if values.shape != grid.shape:
        raise DomainError(f"function returned shape {values.shape}, grid is {grid.shape}")
    return values


def integrate(grid: QuadratureGrid, values: np.ndarray) -> float | complex:
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise DomainError(f"values of shape {values.shape} do not match grid {grid.shape}")
    total = values
    for w in reversed(grid.weights):
        total = total @ w
    return total.item()
