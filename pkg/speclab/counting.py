"""Eigenvalue counting (Weyl law), sums of squares, multiplicities and the
torus logarithmic-growth sequence λ² = 5^l."""

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from speclab.eigenbasis import (
    DEGENERACY_RTOL,
    EIGEN_RTOL,
    BoundaryCondition,
    DomainKind,
    DomainSpec,
    degenerate_clusters,
    eigenvalue_list,
    weyl_constant,
)
from speclab.errors import DomainError, ResourceLimitError
from speclab.norms import fit_power_law
from speclab.special_functions import bessel_zeros_below
from utils.parallel import parallel_map

logger = logging.getLogger(__name__)

MAX_LATTICE_LAMBDA = 500.0
MAX_DISK_LAMBDA = 200.0
SQUARES_LIMIT = {2: 10 ** 9, 3: 10 ** 6}
MAX_LOG_GROWTH_L = 12

WEYL_HEADER = ("lambda", "count", "prediction", "ratio")
LOG_GROWTH_HEADER = ("l", "lambda_sq", "r2", "bound")
REMAINDER_HEADER = ("lambda", "count", "prediction", "remainder", "scaled_remainder")
MULTIPLICITY_HEADER = ("lambda", "multiplicity", "ratio")


@dataclass(frozen=True)
class CountReport:
    lam: float
    count: int
    prediction: float
    ratio: float

    def as_row(self) -> tuple:
        return (self.lam, self.count, self.prediction, self.ratio)


@dataclass(frozen=True)
class LogGrowthReport:
    rows: list[tuple] = field(default_factory=list)
    exponent: float = math.nan
    quoted_exponent: float = 1.0
    discrepancy: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MultiplicityProfile:
    rows: list[tuple]
    max_ratio: float
    lambda_at_max: float


def _isqrt_array(values: np.ndarray) -> np.ndarray:
    """floor(sqrt(v)) for an int64 array of nonnegative values, exactly."""
    root = np.floor(np.sqrt(values.astype(float))).astype(np.int64)
    root -= (root * root > values).astype(np.int64)
    root += ((root + 1) * (root + 1) <= values).astype(np.int64)
    return root


def _squared_radius(lam: float) -> int:
    return int(math.floor(lam * lam * (1.0 + 2 * EIGEN_RTOL) + EIGEN_RTOL))


def lattice_count(n: int, lam: float) -> int:
    """Integer points a in Z^n with |a| <= lam."""
    limit = _squared_radius(lam)
    radius = math.isqrt(limit)
    axis = np.arange(-radius, radius + 1, dtype=np.int64)
    if n == 2:
        rem = limit - axis * axis
        return int((2 * _isqrt_array(rem) + 1).sum())
    if n == 3:
        rem = limit - axis[:, None] ** 2 - axis[None, :] ** 2
        inside = rem >= 0
        return int((2 * _isqrt_array(rem[inside]) + 1).sum())
    raise DomainError(f"lattice dimension must be 2 or 3, got {n}")


def _rectangle_count(domain: DomainSpec, bc: BoundaryCondition, lam: float) -> int:
    l1, l2 = domain.sides
    low = 1 if bc is BoundaryCondition.DIRICHLET else 0
    top = lam * (1.0 + EIGEN_RTOL) + EIGEN_RTOL
    total = 0
    p = low
    while p * math.pi / l1 <= top:
        rest = top * top - (p * math.pi / l1) ** 2
        q_max = int(math.floor(l2 * math.sqrt(max(rest, 0.0)) / math.pi))
        total += max(q_max - low + 1, 0)
        p += 1
    return total


def _disk_count(bc: BoundaryCondition, lam: float) -> int:
    neumann = bc is BoundaryCondition.NEUMANN
    orders = range(int(math.floor(lam)) + 1)
    counts = [len(bessel_zeros_below(m, lam, neumann)) for m in orders]
    return int(neumann) + counts[0] + 2 * sum(counts[1:])


def weyl_count(domain: DomainSpec, bc: BoundaryCondition, lam: float) -> CountReport:
    """Exact N(λ) = #{j: λ_j <= λ} with multiplicity, against γ_M λ^n."""
    bc = domain.check_bc(bc)
    lam = float(lam)
    if not math.isfinite(lam) or lam < 0:
        raise DomainError(f"λ must be finite and nonnegative, got {lam}")
    kind = domain.kind
    if kind is DomainKind.BALL:
        raise DomainError("ball spectrum is radial-only here; its count is not the full N(λ)")
    limit = MAX_DISK_LAMBDA if kind is DomainKind.DISK else MAX_LATTICE_LAMBDA
    if lam > limit:
        raise ResourceLimitError(f"λ = {lam} exceeds the {domain.label} counting limit {limit}")
    if kind is DomainKind.TORUS:
        count = lattice_count(domain.dimension, lam)
    elif kind is DomainKind.RECTANGLE:
        count = _rectangle_count(domain, bc, lam)
    else:
        count = _disk_count(bc, lam)
    prediction = weyl_constant(domain) * lam ** domain.dimension
    ratio = count / prediction if prediction > 0 else math.nan
    logger.debug("N(%.6g) on %s/%s = %d, Weyl %.6g", lam, domain.label, bc.value, count, prediction)
    return CountReport(lam, count, prediction, ratio)


def weyl_table(domain: DomainSpec, bc: BoundaryCondition, lams, threads: int = 1) -> list[tuple]:
    reports = parallel_map(lambda lam: weyl_count(domain, bc, lam), lams, threads)
    return [report.as_row() for report in reports]


def sum_of_squares_count(N: int, n: int = 2) -> int:
    """r_n(N): ordered integer n-tuples, signs included, with squares summing to N."""
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 0:
        raise DomainError(f"N must be a nonnegative integer, got {N!r}")
    if n not in SQUARES_LIMIT:
        raise DomainError(f"n must be 2 or 3, got {n}")
    if N > SQUARES_LIMIT[n]:
        raise ResourceLimitError(f"N = {N} exceeds the brute-force limit {SQUARES_LIMIT[n]} for n = {n}")
    N = int(N)
    radius = math.isqrt(N)
    axis = np.arange(-radius, radius + 1, dtype=np.int64)
    if n == 2:
        rem = N - axis * axis
    else:
        rem = (N - axis[:, None] ** 2 - axis[None, :] ** 2).ravel()
        rem = rem[rem >= 0]
    root = _isqrt_array(rem)
    exact = root * root == rem
    # a positive square y² = rem has two roots ±y, zero has one
    return int(np.where(root[exact] > 0, 2, 1).sum())


def eigenvalue_multiplicity(domain: DomainSpec, bc: BoundaryCondition, lam_sq: float,
                            tolerance: float = DEGENERACY_RTOL) -> int:
    """Number of eigenvalues λ_j² within relative tolerance of lam_sq; 0 if none."""
    lam_sq = float(lam_sq)
    if not math.isfinite(lam_sq) or lam_sq < 0:
        raise DomainError(f"λ² must be finite and nonnegative, got {lam_sq}")
    lams = eigenvalue_list(domain, bc, math.sqrt(lam_sq * (1.0 + tolerance)) + tolerance)
    squares = lams * lams
    return int(np.count_nonzero(np.abs(squares - lam_sq) <= tolerance * max(lam_sq, 1.0)))


def torus_log_growth_check(l_max: int = MAX_LOG_GROWTH_L) -> LogGrowthReport:
    """Rows (l, 5^l, r_2(5^l), √(r_2/|M|)) and the exponent of bound_l in log λ_l.

    The extremal bound grows like √(l+1), i.e. like (log λ)^{1/2}; the report
    keeps the quoted exponent 1 next to the fit and flags the gap.
    """
    if not 0 <= l_max <= MAX_LOG_GROWTH_L:
        raise DomainError(f"l_max must lie in 0..{MAX_LOG_GROWTH_L}, got {l_max}")
    volume = DomainSpec.torus(2).volume
    rows = []
    for l in range(l_max + 1):
        lam_sq = 5 ** l
        r2 = sum_of_squares_count(lam_sq, 2)
        rows.append((l, lam_sq, r2, math.sqrt(r2 / volume)))
    fitted = [(0.5 * l * math.log(5.0), bound) for l, _, _, bound in rows if l >= 1]
    if len(fitted) < 2:
        return LogGrowthReport(rows=rows)
    fit = fit_power_law([x for x, _ in fitted], [b for _, b in fitted])
    discrepancy = abs(fit.exponent - 1.0) > 0.25
    if discrepancy:
        logger.warning("log-growth exponent %.3f differs from the quoted exponent 1", fit.exponent)
    return LogGrowthReport(rows=rows, exponent=fit.exponent, quoted_exponent=1.0,
                           discrepancy=discrepancy)


def weyl_remainder_table(domain: DomainSpec, bc: BoundaryCondition, lams,
                         threads: int = 1) -> list[tuple]:
    """Rows (λ, N, γλ^n, N − γλ^n, (N − γλ^n)/λ^{n−1}); observed, not certified."""
    n = domain.dimension
    rows = []
    for report in parallel_map(lambda lam: weyl_count(domain, bc, lam), lams, threads):
        remainder = report.count - report.prediction
        scaled = remainder / report.lam ** (n - 1) if report.lam > 0 else math.nan
        rows.append((report.lam, report.count, report.prediction, remainder, scaled))
    return rows


def multiplicity_profile(domain: DomainSpec, bc: BoundaryCondition, lam_max: float,
                         tolerance: float = DEGENERACY_RTOL) -> MultiplicityProfile:
    """Cluster multiplicities and multiplicity/λ^{n−1} for every eigenvalue 0 < λ <= lam_max."""
    n = domain.dimension
    rows = []
    for lam, multiplicity in degenerate_clusters(eigenvalue_list(domain, bc, lam_max), tolerance):
        if lam > 0:
            rows.append((lam, multiplicity, multiplicity / lam ** (n - 1)))
    if not rows:
        return MultiplicityProfile(rows, math.nan, math.nan)
    worst = max(rows, key=lambda row: row[2])
    return MultiplicityProfile(rows, worst[2], worst[0])
