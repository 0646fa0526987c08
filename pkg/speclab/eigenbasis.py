"""L²-normalized eigenfunctions of the Dirichlet/Neumann Laplacian on the flat
model domains, by separation of variables.

Torus modes use the real basis sqrt(2)(2π)^{-n/2} cos(a·x), sin(a·x); the
complex basis (2π)^{-n/2} exp(ia·x) is available through
`torus_exponential_mode`. Disk modes are J_m(λr) times cos(mθ)/√π, sin(mθ)/√π
or 1/√(2π). The ball carries radial modes only.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import optimize, special

from speclab.errors import DomainError, ResourceLimitError
from speclab.special_functions import bessel_zero, bessel_deriv_zero, bessel_zeros_below

logger = logging.getLogger(__name__)

MAX_LAMBDA = 500.0
MAX_MODES = 250_000
MAX_FAMILY = 500

# Relative slack when deciding whether an eigenvalue lies below a cutoff.
EIGEN_RTOL = 1e-12
DEGENERACY_RTOL = 1e-9
POINT_TOL = 1e-12

FAMILY_LABELS = ("disk_radial", "disk_whispering", "torus_standard",
                 "rectangle_standard", "disk_neumann_radial")


class DomainKind(str, Enum):
    TORUS = "torus"
    RECTANGLE = "rectangle"
    DISK = "disk"
    BALL = "ball"


class BoundaryCondition(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    NONE = "none"


@dataclass(frozen=True)
class DomainSpec:
    kind: DomainKind
    dimension: int
    sides: tuple[float, ...] = ()

    @classmethod
    def torus(cls, n: int = 2) -> "DomainSpec":
        if n not in (2, 3):
            raise DomainError(f"torus dimension must be 2 or 3, got {n}")
        return cls(DomainKind.TORUS, n, (2 * math.pi,) * n)

    @classmethod
    def rectangle(cls, length: float = math.pi, width: float = math.pi) -> "DomainSpec":
        if not (length > 0 and width > 0 and math.isfinite(length) and math.isfinite(width)):
            raise DomainError("rectangle sides must be positive and finite")
        return cls(DomainKind.RECTANGLE, 2, (float(length), float(width)))

    @classmethod
    def disk(cls) -> "DomainSpec":
        return cls(DomainKind.DISK, 2)

    @classmethod
    def ball(cls) -> "DomainSpec":
        return cls(DomainKind.BALL, 3)

    @property
    def label(self) -> str:
        if self.kind is DomainKind.TORUS:
            return f"torus{self.dimension}"
        return self.kind.value

    @property
    def volume(self) -> float:
        if self.kind in (DomainKind.TORUS, DomainKind.RECTANGLE):
            return math.prod(self.sides)
        if self.kind is DomainKind.DISK:
            return math.pi
        return 4.0 * math.pi / 3.0

    @property
    def inradius(self) -> float:
        if self.kind is DomainKind.TORUS:
            return math.inf
        if self.kind is DomainKind.RECTANGLE:
            return 0.5 * min(self.sides)
        return 1.0

    @property
    def has_boundary(self) -> bool:
        return self.kind is not DomainKind.TORUS

    def check_bc(self, bc: BoundaryCondition) -> BoundaryCondition:
        bc = BoundaryCondition(bc)
        if self.kind is DomainKind.TORUS:
            if bc is not BoundaryCondition.NONE:
                raise DomainError("the torus has no boundary; use BoundaryCondition.NONE")
        elif bc is BoundaryCondition.NONE:
            raise DomainError(f"{self.label} needs a Dirichlet or Neumann condition")
        return bc

    def _as_points(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1:] != (self.dimension,):
            raise DomainError(f"{self.label} points need {self.dimension} coordinates, got shape {pts.shape}")
        return pts

    def contains(self, points) -> np.ndarray:
        pts = self._as_points(points)
        if self.kind is DomainKind.TORUS:
            return np.ones(pts.shape[:-1], dtype=bool)
        if self.kind is DomainKind.RECTANGLE:
            sides = np.asarray(self.sides)
            return np.all((pts >= -POINT_TOL) & (pts <= sides + POINT_TOL), axis=-1)
        return np.linalg.norm(pts, axis=-1) <= 1.0 + POINT_TOL

    def boundary_distance(self, points) -> np.ndarray:
        pts = self._as_points(points)
        if not np.all(self.contains(pts)):
            raise DomainError(f"point outside {self.label}")
        if self.kind is DomainKind.TORUS:
            return np.full(pts.shape[:-1], math.inf)
        if self.kind is DomainKind.RECTANGLE:
            sides = np.asarray(self.sides)
            return np.maximum(np.minimum(pts, sides - pts).min(axis=-1), 0.0)
        return np.maximum(1.0 - np.linalg.norm(pts, axis=-1), 0.0)

    def require_inside(self, points) -> np.ndarray:
        pts = self._as_points(points)
        if not np.all(self.contains(pts)):
            raise DomainError(f"point outside {self.label}")
        return pts


@dataclass(frozen=True)
class Eigenmode:
    domain: DomainSpec
    bc: BoundaryCondition
    quantum: tuple[int, ...]
    parity: str
    lam: float
    norm: float

    def __call__(self, points):
        return evaluate_mode(self, points)

    @property
    def order(self) -> int:
        """Angular order m for disk modes, 0 otherwise."""
        return self.quantum[0] if self.domain.kind is DomainKind.DISK else 0


@dataclass(frozen=True)
class ModeFamily:
    label: str
    modes: tuple[Eigenmode, ...]

    def __post_init__(self):
        if not self.modes:
            raise DomainError("a family needs at least one mode")
        first = self.modes[0]
        for mode in self.modes[1:]:
            if mode.domain != first.domain or mode.bc != first.bc:
                raise DomainError("family modes must share domain and boundary condition")
        lams = self.lams
        if np.any(np.diff(lams) <= 0):
            raise DomainError("family eigenvalues must be strictly increasing")

    @property
    def lams(self) -> np.ndarray:
        return np.array([mode.lam for mode in self.modes])

    def __len__(self) -> int:
        return len(self.modes)


def _below(lam: float, lam_max: float) -> bool:
    return lam <= lam_max * (1.0 + EIGEN_RTOL) + EIGEN_RTOL


# --- single-mode constructors -------------------------------------------------

def torus_mode(a: Sequence[int], parity: str | None = None, n: int | None = None) -> Eigenmode:
    a = tuple(int(c) for c in a)
    domain = DomainSpec.torus(n or len(a))
    if len(a) != domain.dimension:
        raise DomainError("lattice vector dimension mismatch")
    base = (2 * math.pi) ** (-domain.dimension / 2)
    if not any(a):
        return Eigenmode(domain, BoundaryCondition.NONE, a, "const", 0.0, base)
    parity = parity or "cos"
    if parity not in ("cos", "sin"):
        raise DomainError(f"real torus modes are cos or sin, got {parity!r}")
    lam = math.sqrt(sum(c * c for c in a))
    return Eigenmode(domain, BoundaryCondition.NONE, a, parity, lam, math.sqrt(2.0) * base)


def torus_exponential_mode(a: Sequence[int]) -> Eigenmode:
    """Complex basis view (2π)^{-n/2} exp(i a·x)."""
    a = tuple(int(c) for c in a)
    domain = DomainSpec.torus(len(a))
    lam = math.sqrt(sum(c * c for c in a))
    return Eigenmode(domain, BoundaryCondition.NONE, a, "exp", lam,
                     (2 * math.pi) ** (-domain.dimension / 2))


def rectangle_mode(p: int, q: int, bc: BoundaryCondition = BoundaryCondition.DIRICHLET,
                   domain: DomainSpec | None = None) -> Eigenmode:
    domain = domain or DomainSpec.rectangle()
    bc = domain.check_bc(bc)
    l1, l2 = domain.sides
    if bc is BoundaryCondition.DIRICHLET:
        if p < 1 or q < 1:
            raise DomainError("Dirichlet rectangle modes need p, q >= 1")
        norm = 2.0 / math.sqrt(l1 * l2)
        parity = "sin"
    else:
        if p < 0 or q < 0:
            raise DomainError("Neumann rectangle modes need p, q >= 0")
        norm = math.sqrt((1 if p == 0 else 2) * (1 if q == 0 else 2) / (l1 * l2))
        parity = "cos"
    lam = math.pi * math.hypot(p / l1, q / l2)
    return Eigenmode(domain, bc, (int(p), int(q)), parity, lam, norm)


def disk_mode(m: int, k: int, bc: BoundaryCondition = BoundaryCondition.DIRICHLET,
              parity: str | None = None) -> Eigenmode:
    """Disk mode of angular order m and radial index k.

    Neumann (0, 0) is the constant ground state.
    """
    domain = DomainSpec.disk()
    bc = domain.check_bc(bc)
    if m < 0:
        raise DomainError("angular order must be nonnegative")
    if m == 0:
        parity = "const"
    else:
        parity = parity or "cos"
        if parity not in ("cos", "sin"):
            raise DomainError(f"disk parity is cos or sin, got {parity!r}")
    if bc is BoundaryCondition.NEUMANN and m == 0 and k == 0:
        return Eigenmode(domain, bc, (0, 0), "const", 0.0, 1.0 / math.sqrt(math.pi))
    if k < 1:
        raise DomainError("radial index starts at 1")
    if bc is BoundaryCondition.DIRICHLET:
        lam = bessel_zero(m, k).location
    else:
        lam = bessel_deriv_zero(m, k).location
    return _disk_mode_at(m, k, bc, parity, lam)


def _disk_mode_at(m: int, k: int, bc: BoundaryCondition, parity: str, lam: float) -> Eigenmode:
    angular = 1.0 / math.sqrt(2 * math.pi) if m == 0 else 1.0 / math.sqrt(math.pi)
    if bc is BoundaryCondition.DIRICHLET:
        # ∫_0^1 J_m(λr)^2 r dr = J_{m+1}(λ)^2 / 2
        radial = math.sqrt(2.0) / abs(special.jv(m + 1, lam))
    else:
        radial = math.sqrt(2.0) / (abs(special.jv(m, lam)) * math.sqrt(1.0 - (m / lam) ** 2))
    return Eigenmode(DomainSpec.disk(), bc, (int(m), int(k)), parity, float(lam), radial * angular)


def _ball_neumann_root(k: int) -> float:
    # Radial Neumann condition for sin(λr)/r at r = 1: tan λ = λ.
    return float(optimize.brentq(lambda s: s * math.cos(s) - math.sin(s),
                                 k * math.pi, k * math.pi + 0.5 * math.pi, xtol=1e-14))


def ball_mode(k: int, bc: BoundaryCondition = BoundaryCondition.DIRICHLET) -> Eigenmode:
    """Radial ball mode c·sin(λr)/(λr); Neumann k = 0 is the constant."""
    domain = DomainSpec.ball()
    bc = domain.check_bc(bc)
    if bc is BoundaryCondition.NEUMANN and k == 0:
        return Eigenmode(domain, bc, (0,), "const", 0.0, math.sqrt(3.0 / (4.0 * math.pi)))
    if k < 1:
        raise DomainError("radial index starts at 1")
    if bc is BoundaryCondition.DIRICHLET:
        lam = k * math.pi
        norm = lam / math.sqrt(2.0 * math.pi)
    else:
        lam = _ball_neumann_root(k)
        norm = lam / math.sqrt(4.0 * math.pi * (0.5 - math.sin(2 * lam) / (4 * lam)))
    return Eigenmode(domain, bc, (int(k),), "const", lam, norm)


# --- evaluation ----------------------------------------------------------------

def radial_part(mode: Eigenmode, r) -> np.ndarray:
    """Radial factor of a disk or ball mode, normalization included."""
    r = np.asarray(r, dtype=float)
    if mode.domain.kind is DomainKind.DISK:
        m = mode.quantum[0]
        return mode.norm * special.jv(m, mode.lam * r)
    if mode.domain.kind is DomainKind.BALL:
        return mode.norm * np.sinc(mode.lam * r / np.pi)
    raise DomainError(f"{mode.domain.label} modes have no radial factor")


def angular_part(mode: Eigenmode, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if mode.parity == "cos":
        return np.cos(mode.quantum[0] * theta)
    if mode.parity == "sin":
        return np.sin(mode.quantum[0] * theta)
    return np.ones_like(theta)


def angular_argmax(mode: Eigenmode) -> float:
    """An angle where |angular_part| reaches its maximum 1."""
    if mode.parity == "sin":
        return 0.5 * math.pi / mode.quantum[0]
    return 0.0


def evaluate_mode(mode: Eigenmode, points):
    """Value of the normalized eigenfunction at points of shape (..., n)."""
    domain = mode.domain
    pts = domain.require_inside(points)
    kind = domain.kind
    if kind is DomainKind.TORUS:
        phase = pts @ np.asarray(mode.quantum, dtype=float)
        if mode.parity == "exp":
            values = mode.norm * np.exp(1j * phase)
        elif mode.parity == "cos":
            values = mode.norm * np.cos(phase)
        elif mode.parity == "sin":
            values = mode.norm * np.sin(phase)
        else:
            values = np.full(phase.shape, mode.norm)
    elif kind is DomainKind.RECTANGLE:
        (p, q), (l1, l2) = mode.quantum, domain.sides
        trig = np.sin if mode.parity == "sin" else np.cos
        values = mode.norm * trig(p * np.pi * pts[..., 0] / l1) * trig(q * np.pi * pts[..., 1] / l2)
    elif kind is DomainKind.DISK:
        r = np.hypot(pts[..., 0], pts[..., 1])
        theta = np.arctan2(pts[..., 1], pts[..., 0])
        values = radial_part(mode, r) * angular_part(mode, theta)
    else:
        values = radial_part(mode, np.linalg.norm(pts, axis=-1))
    return values if np.ndim(values) else values.item()


def evaluate_modes_at(modes: Sequence[Eigenmode], point) -> np.ndarray:
    """Values of many modes of one domain at a single point, vectorised."""
    if not modes:
        return np.zeros(0)
    domain = modes[0].domain
    x = domain.require_inside(point)
    if x.ndim != 1:
        raise DomainError("evaluate_modes_at takes a single point")
    norms = np.array([mode.norm for mode in modes])
    lams = np.array([mode.lam for mode in modes])
    parity = np.array([mode.parity for mode in modes])
    if domain.kind is DomainKind.DISK:
        r, theta = math.hypot(x[0], x[1]), math.atan2(x[1], x[0])
        orders = np.array([mode.quantum[0] for mode in modes])
        ang = np.where(parity == "cos", np.cos(orders * theta),
                       np.where(parity == "sin", np.sin(orders * theta), 1.0))
        return norms * special.jv(orders, lams * r) * ang
    if domain.kind is DomainKind.TORUS:
        lattice = np.array([mode.quantum for mode in modes], dtype=float)
        phase = lattice @ x
        return norms * np.where(parity == "cos", np.cos(phase),
                                np.where(parity == "sin", np.sin(phase), 1.0))
    return np.array([evaluate_mode(mode, x) for mode in modes])


# --- enumeration ---------------------------------------------------------------

def weyl_constant(domain: DomainSpec) -> float:
    """γ_M = (2π)^{-n} vol(B^n) vol(M)."""
    n = domain.dimension
    ball_volume = math.pi if n == 2 else 4.0 * math.pi / 3.0
    return (2 * math.pi) ** (-n) * ball_volume * domain.volume


def _check_lambda(domain: DomainSpec, lam_max: float) -> float:
    lam_max = float(lam_max)
    if not math.isfinite(lam_max) or lam_max < 0:
        raise DomainError(f"λ_max must be finite and nonnegative, got {lam_max}")
    if lam_max > MAX_LAMBDA:
        raise ResourceLimitError(f"λ_max = {lam_max} exceeds the desk-scale limit {MAX_LAMBDA}")
    return lam_max


def torus_lattice(n: int, lam_max: float) -> np.ndarray:
    """Integer vectors a in Z^n with |a| <= lam_max, rows sorted by (|a|², a)."""
    radius = int(math.floor(lam_max * (1.0 + EIGEN_RTOL))) if lam_max > 0 else 0
    axis = np.arange(-radius, radius + 1)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    lattice = np.stack([g.ravel() for g in grids], axis=-1)
    sq = (lattice * lattice).sum(axis=1)
    lattice = lattice[sq <= lam_max * lam_max * (1.0 + 2 * EIGEN_RTOL) + EIGEN_RTOL]
    sq = (lattice * lattice).sum(axis=1)
    order = np.lexsort(tuple(lattice[:, i] for i in reversed(range(n))) + (sq,))
    return lattice[order]


def _is_positive(a) -> bool:
    for c in a:
        if c:
            return c > 0
    return False


def _enumerate_torus(domain: DomainSpec, lam_max: float) -> list[Eigenmode]:
    modes = []
    for a in torus_lattice(domain.dimension, lam_max):
        a = tuple(int(c) for c in a)
        if not any(a):
            modes.append(torus_mode(a))
        elif _is_positive(a):
            modes.append(torus_mode(a, "cos"))
            modes.append(torus_mode(a, "sin"))
    return modes


def _enumerate_rectangle(domain: DomainSpec, bc: BoundaryCondition, lam_max: float) -> list[Eigenmode]:
    l1, l2 = domain.sides
    low = 1 if bc is BoundaryCondition.DIRICHLET else 0
    modes = []
    for p in range(low, int(lam_max * l1 / math.pi) + 2):
        for q in range(low, int(lam_max * l2 / math.pi) + 2):
            lam = math.pi * math.hypot(p / l1, q / l2)
            if _below(lam, lam_max):
                modes.append(rectangle_mode(p, q, bc, domain))
    return modes


def _enumerate_disk(bc: BoundaryCondition, lam_max: float) -> list[Eigenmode]:
    neumann = bc is BoundaryCondition.NEUMANN
    modes = [disk_mode(0, 0, bc)] if neumann else []
    m = 0
    # j_{m,1} > m and j'_{m,1} > m, so orders beyond lam_max contribute nothing.
    while m <= lam_max:
        zeros = bessel_zeros_below(m, lam_max, neumann)
        for k, lam in enumerate(zeros, start=1):
            if m == 0:
                modes.append(_disk_mode_at(0, k, bc, "const", lam))
            else:
                modes.append(_disk_mode_at(m, k, bc, "cos", lam))
                modes.append(_disk_mode_at(m, k, bc, "sin", lam))
        m += 1
    return modes


def _enumerate_ball(bc: BoundaryCondition, lam_max: float) -> list[Eigenmode]:
    modes = [ball_mode(0, bc)] if bc is BoundaryCondition.NEUMANN else []
    k = 1
    while True:
        mode = ball_mode(k, bc)
        if not _below(mode.lam, lam_max):
            return modes
        modes.append(mode)
        k += 1


_PARITY_RANK = {"const": 0, "cos": 1, "sin": 2, "exp": 3}


def _sort_key(mode: Eigenmode):
    return (mode.lam, mode.quantum, _PARITY_RANK[mode.parity])


@lru_cache(maxsize=64)
def enumerate_modes(domain: DomainSpec, bc: BoundaryCondition, lam_max: float) -> tuple[Eigenmode, ...]:
    """Every mode with λ <= lam_max, full multiplicity, sorted by (λ, index)."""
    bc = domain.check_bc(bc)
    lam_max = _check_lambda(domain, lam_max)
    estimate = weyl_constant(domain) * lam_max ** domain.dimension
    if estimate > MAX_MODES:
        raise ResourceLimitError(f"about {estimate:.0f} modes below {lam_max}; limit is {MAX_MODES}")
    if domain.kind is DomainKind.TORUS:
        modes = _enumerate_torus(domain, lam_max)
    elif domain.kind is DomainKind.RECTANGLE:
        modes = _enumerate_rectangle(domain, bc, lam_max)
    elif domain.kind is DomainKind.DISK:
        modes = _enumerate_disk(bc, lam_max)
    else:
        modes = _enumerate_ball(bc, lam_max)
    modes.sort(key=_sort_key)
    logger.debug("enumerated %d %s/%s modes up to λ=%.6g", len(modes), domain.label, bc.value, lam_max)
    return tuple(modes)


def eigenvalue_list(domain: DomainSpec, bc: BoundaryCondition, lam_max: float) -> np.ndarray:
    """Sorted eigenvalues λ <= lam_max with multiplicity, without building modes."""
    bc = domain.check_bc(bc)
    lam_max = _check_lambda(domain, lam_max)
    kind = domain.kind
    if kind is DomainKind.TORUS:
        lattice = torus_lattice(domain.dimension, lam_max)
        lams = np.sqrt((lattice * lattice).sum(axis=1).astype(float))
    elif kind is DomainKind.RECTANGLE:
        lams = np.array([mode.lam for mode in _enumerate_rectangle(domain, bc, lam_max)])
    elif kind is DomainKind.DISK:
        neumann = bc is BoundaryCondition.NEUMANN
        parts = [np.zeros(1)] if neumann else []
        for m in range(int(math.floor(lam_max)) + 1):
            zeros = np.asarray(bessel_zeros_below(m, lam_max, neumann))
            parts.append(zeros if m == 0 else np.repeat(zeros, 2))
        lams = np.concatenate(parts) if parts else np.zeros(0)
    else:
        lams = np.array([mode.lam for mode in _enumerate_ball(bc, lam_max)])
    return np.sort(lams[lams <= lam_max * (1.0 + EIGEN_RTOL) + EIGEN_RTOL])


def degenerate_clusters(lams: Sequence[float], rtol: float = DEGENERACY_RTOL) -> list[tuple[float, int]]:
    """Group sorted eigenvalues into (λ, multiplicity) clusters by relative gap."""
    clusters: list[tuple[float, int]] = []
    for lam in lams:
        if clusters and abs(lam - clusters[-1][0]) <= rtol * max(lam, 1.0):
            clusters[-1] = (clusters[-1][0], clusters[-1][1] + 1)
        else:
            clusters.append((float(lam), 1))
    return clusters


# --- families ------------------------------------------------------------------

def _distinct_representatives(domain: DomainSpec, bc: BoundaryCondition, wanted: int) -> list[Eigenmode]:
    lam_max = max(4.0, math.sqrt(wanted))
    while True:
        modes = enumerate_modes(domain, bc, lam_max)
        reps: list[Eigenmode] = []
        for mode in modes:
            if not reps or mode.lam > reps[-1].lam * (1.0 + DEGENERACY_RTOL) + DEGENERACY_RTOL:
                reps.append(mode)
        # The last cluster may be cut off at lam_max; it is only kept if not last.
        if len(reps) > wanted:
            return reps[:wanted]
        lam_max *= 1.5


def make_family(label: str, count: int, first: int = 1) -> ModeFamily:
    if label not in FAMILY_LABELS:
        raise DomainError(f"unknown family {label!r}; expected one of {', '.join(FAMILY_LABELS)}")
    if not 1 <= count <= MAX_FAMILY:
        raise DomainError(f"family size must be in 1..{MAX_FAMILY}, got {count}")
    if first < 1:
        raise DomainError("family index starts at 1")
    indices = range(first, first + count)
    if label == "disk_radial":
        modes = [disk_mode(0, k) for k in indices]
    elif label == "disk_whispering":
        modes = [disk_mode(m, 1, parity="cos") for m in indices]
    elif label == "disk_neumann_radial":
        modes = [disk_mode(0, k, BoundaryCondition.NEUMANN) for k in indices]
    elif label == "torus_standard":
        modes = _distinct_representatives(DomainSpec.torus(2), BoundaryCondition.NONE,
                                          first + count - 1)[first - 1:]
    else:
        modes = _distinct_representatives(DomainSpec.rectangle(), BoundaryCondition.DIRICHLET,
                                          first + count - 1)[first - 1:]
    return ModeFamily(label, tuple(modes))


MODE_CSV_HEADER = ("domain", "bc", "index1", "index2", "lambda", "norm_const")


def modes_to_rows(modes: Sequence[Eigenmode]) -> list[tuple]:
    rows = []
    for mode in modes:
        index2 = ":".join(str(c) for c in mode.quantum[1:])
        if mode.parity in ("cos", "sin", "exp") and mode.domain.kind is not DomainKind.RECTANGLE:
            index2 = f"{index2}{mode.parity}" if not index2 else f"{index2}:{mode.parity}"
        rows.append((mode.domain.label, mode.bc.value, mode.quantum[0], index2, mode.lam, mode.norm))
    return rows
