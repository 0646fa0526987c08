"""Maximum principle in the boundary layer {dist(x, ∂M) < 1/λ} of the disk.

The comparison functions live on the strip 0 <= x_n <= 1/λ, x_n = 1 - r:
v = cos(3/2 (λx_n - 1)) for Dirichlet and v = cos(3/2 λx_n) for Neumann. Both
satisfy v'' + λ²v = -(5/4)λ²v; on the disk Δ adds (1/r)∂_r = -(1/r)∂_{x_n}.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from speclab.eigenbasis import (
    BoundaryCondition,
    DomainKind,
    DomainSpec,
    Eigenmode,
    enumerate_modes,
    radial_part,
)
from speclab.errors import DomainError
from speclab.norms import profile_max
from utils.parallel import parallel_map

logger = logging.getLogger(__name__)

DIRICHLET_FACTOR = 1.0
NEUMANN_FACTOR = 20.0
LAYER_NODES = 64
MIN_LAYER_LAMBDA = 10.0
HOLDS_TOL = 1e-10
STRIP_TOL = 1e-12

LAYER_HEADER = ("bc", "m", "k", "lambda", "max_inside", "max_inner", "factor", "holds")


def _strip_points(lam: float, x_n) -> np.ndarray:
    lam = float(lam)
    if lam <= 0:
        raise DomainError(f"λ must be positive, got {lam}")
    x = np.asarray(x_n, dtype=float)
    if np.any(x < -STRIP_TOL) or np.any(x > 1.0 / lam + STRIP_TOL):
        raise DomainError(f"x_n must lie in [0, 1/λ] = [0, {1.0 / lam:.6g}]")
    return x


def comparison_dirichlet(lam: float, x_n):
    """v = sin(π/2 + (3/2)(λx_n - 1)); v > 0.07 on the strip and v(1/λ) = 1."""
    x = _strip_points(lam, x_n)
    v = np.cos(1.5 * (lam * x - 1.0))
    return v if v.ndim else float(v)


def comparison_neumann(lam: float, x_n):
    """v = sin(π/2 + (3/2)λx_n); v(0) = 1, ∂v/∂x_n(0) = 0 and 1/v < 20 on the strip."""
    x = _strip_points(lam, x_n)
    v = np.cos(1.5 * lam * x)
    return v if v.ndim else float(v)


def _comparison(bc: BoundaryCondition, lam: float, x):
    if bc is BoundaryCondition.DIRICHLET:
        return np.cos(1.5 * (lam * x - 1.0)), -1.5 * lam * np.sin(1.5 * (lam * x - 1.0))
    if bc is BoundaryCondition.NEUMANN:
        return np.cos(1.5 * lam * x), -1.5 * lam * np.sin(1.5 * lam * x)
    raise DomainError("the comparison functions need a Dirichlet or Neumann condition")


def strip_operator_residual(bc: BoundaryCondition, lam: float, x_n):
    """(Δ + λ²)v on the disk strip, x_n = 1 - r, including the (1/r)∂_r term."""
    bc = BoundaryCondition(bc)
    x = _strip_points(lam, x_n)
    if 1.0 / lam >= 1.0:
        raise DomainError("the strip reaches the centre of the disk; need λ > 1")
    v, dv = _comparison(bc, lam, x)
    result = -1.25 * lam * lam * v - dv / (1.0 - x)
    return result if result.ndim else float(result)


def strip_sign_threshold(bc: BoundaryCondition, lams: Sequence[float], samples: int = 401) -> float:
    """Smallest sampled λ from which (Δ+λ²)v < 0 on the whole strip for every larger sample.

    NaN when the largest sample already fails.
    """
    lams = sorted(float(lam) for lam in lams)
    threshold = math.nan
    for lam in reversed(lams):
        x = np.linspace(0.0, 1.0 / lam, samples)
        if np.max(strip_operator_residual(bc, lam, x)) < 0.0:
            threshold = lam
        else:
            break
    logger.debug("%s sign threshold over %d samples: %s", BoundaryCondition(bc).value, len(lams), threshold)
    return threshold


@dataclass(frozen=True)
class LayerCheck:
    mode: Eigenmode
    lam: float
    width: float
    max_inside: float
    max_inner: float
    factor: float
    holds: bool

    @property
    def empirical_factor(self) -> float:
        return self.max_inside / self.max_inner if self.max_inner > 0 else math.inf

    def as_row(self) -> tuple:
        m, k = self.mode.quantum
        return (self.mode.bc.value, m, k, self.lam, self.max_inside, self.max_inner,
                self.factor, self.holds)


def max_principle_check(mode: Eigenmode) -> LayerCheck:
    """max over the layer dist < 1/λ against factor · max over dist = 1/λ.

    The disk modes separate, and |cos mθ|, |sin mθ| reach 1 on every circle, so
    both maxima are maxima of the radial factor.
    """
    if mode.domain.kind is not DomainKind.DISK:
        raise DomainError(f"layer checks run on the disk, not {mode.domain.label}")
    if mode.lam < MIN_LAYER_LAMBDA:
        raise DomainError(f"layer checks need λ >= {MIN_LAYER_LAMBDA}, got {mode.lam:.6g}")
    width = 1.0 / mode.lam
    inner_radius = 1.0 - width
    _, inside = profile_max(lambda r: radial_part(mode, r), inner_radius, 1.0,
                            2 * math.pi / mode.lam, min_samples=LAYER_NODES)
    inner = abs(float(radial_part(mode, inner_radius)))
    inside = max(inside, inner)
    factor = DIRICHLET_FACTOR if mode.bc is BoundaryCondition.DIRICHLET else NEUMANN_FACTOR
    holds = inside <= factor * inner + HOLDS_TOL
    return LayerCheck(mode, mode.lam, width, inside, inner, factor, holds)


def layer_profile_monotone(mode: Eigenmode, samples: int = 200) -> bool:
    """Whether |u| decreases towards r = 1 across the layer."""
    r = np.linspace(1.0 - 1.0 / mode.lam, 1.0, samples)
    profile = np.abs(radial_part(mode, r))
    return bool(np.all(np.diff(profile) <= 1e-15))


def layer_sweep(bc: BoundaryCondition, lam_min: float = 20.0, lam_max: float = 100.0,
                threads: int = 1) -> list[LayerCheck]:
    """LayerCheck for every disk mode (m, k) with λ in [lam_min, lam_max].

    The cos and sin modes of one (m, k) give the same check; one is kept.
    """
    bc = BoundaryCondition(bc)
    if lam_min < MIN_LAYER_LAMBDA or lam_max < lam_min:
        raise DomainError(f"need {MIN_LAYER_LAMBDA} <= lam_min <= lam_max")
    modes = [mode for mode in enumerate_modes(DomainSpec.disk(), bc, lam_max)
             if mode.lam >= lam_min and mode.parity != "sin"]
    checks = parallel_map(max_principle_check, modes, threads)
    failed = sum(not check.holds for check in checks)
    if failed:
        logger.warning("%d of %d %s layer checks failed", failed, len(checks), bc.value)
    return checks
