"""Eigenvalue machinery: spectra, bound states, counting, interval bounds.

Bound states of the curve operator at coupling alpha are located through
the equivalence "lam is an eigenvalue of the interaction operator iff alpha
is an eigenvalue of the boundary operator at energy lam": each eigenvalue
branch nu_k(lam) is continuous and strictly increasing in lam and tends to
-infinity, so nu_k(lam) = alpha has exactly one root whenever nu_k(0) > alpha.
Counting at alpha therefore reduces to counting eigenvalues of the
energy-zero operator above alpha.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
import scipy.linalg

from .assembly import OperatorMatrix, boundary_matrix, odd_harmonic_sums
from .curves import ArcGrid, Curve, circle_deviation, make_circle, make_grid
from .errors import ConfigError, InvariantError, NumericsError

ROOT_TOL = 1e-10
BISECT_WIDTH = 1e-8
PAIRING_TOL = 1e-9
MONOTONE_TOL = 1e-10
ENDPOINT_TOL = 1e-12
MAX_FLOOR_DOUBLINGS = 60

# paper-precision Euler-Mascheroni constant used in the asymptotic count
EULER_GAMMA = 0.577216


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues in nonincreasing order with matching eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray | None
    trusted_count: int

    def multiplicity_groups(self, tol: float = PAIRING_TOL) -> list[tuple[int, int]]:
        """(start index, size) of clusters of eigenvalues within tol."""
        groups = []
        start = 0
        for i in range(1, len(self.values) + 1):
            if i == len(self.values) or abs(self.values[i] - self.values[start]) > tol:
                groups.append((start, i - start))
                start = i
        return groups


def eigen(mat: OperatorMatrix, vectors: bool = True) -> EigenSystem:
    """Full symmetric eigendecomposition, sorted nonincreasingly."""
    try:
        if vectors:
            vals, vecs = scipy.linalg.eigh(mat.data)
        else:
            vals = scipy.linalg.eigh(mat.data, eigvals_only=True)
            vecs = None
    except scipy.linalg.LinAlgError as exc:
        raise NumericsError(f"eigensolver failed on {mat.label}: {exc}") from exc
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    if vecs is not None:
        vecs = vecs[:, order]
    return EigenSystem(values=vals, vectors=vecs, trusted_count=mat.n // 4)


def eigenvalue_at(mat: OperatorMatrix, k: int) -> float:
    """k-th largest eigenvalue (1-based) without the full decomposition."""
    n = mat.n
    if not 1 <= k <= n:
        raise ConfigError("eigenvalue index out of range")
    idx = n - k
    vals = scipy.linalg.eigh(mat.data, eigvals_only=True,
                             subset_by_index=[idx, idx], driver="evr")
    return float(vals[0])


def eigenvalue_curve(curve: Curve, grid: ArcGrid, k: int, lams) -> list[tuple[float, float]]:
    """Samples of the k-th eigenvalue branch; asserts strict growth in lam."""
    lams = sorted(float(x) for x in lams)
    if any(lam > 0 for lam in lams):
        raise ConfigError("eigenvalue branches are defined for lam <= 0")
    if k > grid.n // 4:
        raise ConfigError("mode index beyond the trusted range n/4")
    samples = [(lam, eigenvalue_at(boundary_matrix(curve, lam, grid), k)) for lam in lams]
    for (lam_a, nu_a), (lam_b, nu_b) in zip(samples, samples[1:]):
        if nu_b - nu_a <= -MONOTONE_TOL:
            raise NumericsError(
                f"eigenvalue branch {k} not increasing between lam={lam_a:g} and "
                f"{lam_b:g} (grid under-resolved)")
    return samples


@dataclass(frozen=True)
class BoundState:
    """One negative eigenvalue of the interaction operator.

    `coefficients` holds the discrete eigenfunction of the boundary operator
    at the root energy (unit Euclidean norm on the grid); `residual` is
    |nu_k(energy) - alpha|.
    """

    index: int
    energy: float
    alpha: float
    coefficients: np.ndarray
    residual: float


def _top_eigenvalue_floor(curve: Curve, grid: ArcGrid, alpha: float) -> float:
    """Energy at which even the top eigenvalue branch is below alpha."""
    lam = -1.0
    for _ in range(MAX_FLOOR_DOUBLINGS):
        if eigenvalue_at(boundary_matrix(curve, lam, grid), 1) < alpha:
            return lam
        lam *= 2.0
    raise NumericsError("could not find an energy floor below alpha "
                        f"after {MAX_FLOOR_DOUBLINGS} doublings")


def find_bound_states(curve: Curve, grid: ArcGrid, alpha: float,
                      lam_floor: float | None = None,
                      max_states: int | None = None,
                      root_tol: float = ROOT_TOL) -> list[BoundState]:
    """All bound states at coupling alpha, sorted by energy.

    For each k with nu_k(0) > alpha the unique root of nu_k(lam) = alpha is
    bracketed by bisection down to width 1e-8 and polished with three secant
    steps; monotonicity of the branch makes the bracket unconditionally
    safe and is asserted at every step.
    """
    if alpha == 0:
        raise ConfigError("coupling alpha must be nonzero")
    zero_spec = eigen(boundary_matrix(curve, 0.0, grid), vectors=False)
    trusted = zero_spec.trusted_count
    n_roots = int(np.sum(zero_spec.values[:trusted] > alpha))
    if n_roots >= trusted:
        raise NumericsError("bound-state count reaches the trusted range n/4; "
                            "refusing to undercount - refine the grid")
    if max_states is not None:
        n_roots = min(n_roots, max_states)
    if n_roots == 0:
        return []

    if lam_floor is None:
        lam_floor = _top_eigenvalue_floor(curve, grid, alpha)
    elif eigenvalue_at(boundary_matrix(curve, lam_floor, grid), 1) >= alpha:
        lam_floor = _top_eigenvalue_floor(curve, grid, alpha)

    states = []
    for k in range(1, n_roots + 1):
        nu_of = lambda lam: eigenvalue_at(boundary_matrix(curve, lam, grid), k)
        lo, hi = lam_floor, 0.0
        g_lo = nu_of(lo) - alpha
        g_hi = zero_spec.values[k - 1] - alpha
        if g_lo >= 0 or g_hi <= 0:
            raise NumericsError(f"root bracket invalid for mode {k}")
        while hi - lo > BISECT_WIDTH:
            mid = 0.5 * (lo + hi)
            g_mid = nu_of(mid) - alpha
            if not (g_lo - MONOTONE_TOL <= g_mid <= g_hi + MONOTONE_TOL):
                raise NumericsError(f"monotonicity violated inside bracket for mode {k}")
            if g_mid < 0:
                lo, g_lo = mid, g_mid
            else:
                hi, g_hi = mid, g_mid
        # secant polish; stays inside the bracket by monotonicity
        xa, ga, xb, gb = lo, g_lo, hi, g_hi
        for _ in range(3):
            if gb == ga:
                break
            xc = xb - gb * (xb - xa) / (gb - ga)
            xc = min(max(xc, lo), hi)
            gc = nu_of(xc) - alpha
            xa, ga, xb, gb = xb, gb, xc, gc
        root = xb
        full = eigen(boundary_matrix(curve, root, grid))
        residual = abs(full.values[k - 1] - alpha)
        if residual >= root_tol:
            raise NumericsError(f"root polish left residual {residual:.2e} for mode {k}")
        states.append(BoundState(index=k, energy=root, alpha=alpha,
                                 coefficients=full.vectors[:, k - 1],
                                 residual=residual))
    return sorted(states, key=lambda st: st.energy)


# -- counting ---------------------------------------------------------------


def _count_threshold(radius: float) -> float:
    return math.log(4.0 * radius) / (2.0 * np.pi)


def interval_index(x: float, radius: float) -> int:
    """Index r >= -1 of the half-open partition interval containing x.

    The intervals are bounded by ln(4R)/(2 pi) minus (1/pi) times the
    partial sums of 1/(2j-1); each interval is closed on the left and open
    on the right, and x >= ln(4R)/(2 pi) maps to r = -1.  Partial sums are
    accumulated in extended precision; the half-open comparison happens on
    the float64 endpoint values.
    """
    t0 = _count_threshold(radius)
    if x >= t0:
        return -1
    block = 1024
    count = 0
    carry = np.longdouble(0.0)
    j0 = 1
    while True:
        j = np.arange(j0, j0 + block, dtype=np.longdouble)
        sums = carry + np.cumsum(1.0 / (2.0 * j - 1.0))
        endpoints = t0 - np.asarray(sums, dtype=float) / np.pi
        above = int(np.sum(endpoints > x))
        count += above
        if above < block:
            return count
        carry = sums[-1]
        j0 += block
        if j0 > 10 ** 7:
            raise NumericsError("interval index out of tractable range")


def _interval_endpoints(r: int, radius: float) -> tuple[float, float]:
    """Left and right endpoints of interval r (right = +inf for r = -1)."""
    t0 = _count_threshold(radius)
    if r == -1:
        return t0, math.inf
    sums = odd_harmonic_sums(r + 1)
    left = t0 - float(sums[r]) / np.pi
    right = t0 - (float(sums[r - 1]) / np.pi if r >= 1 else 0.0)
    return left, right


def asymptotic_count_bounds(radius: float, alpha: float,
                            deviation: float = 0.0) -> tuple[float, float]:
    """Explicit lower/upper bounds on the number of negative eigenvalues.

    Valid for alpha + deviation < ln(4R)/(2 pi) - 1/pi:

        lower = 2R c^{-1} e^{-2 pi alpha - gamma} - 1 - 4 (e^{1/92} - 1)
        upper = 2R c e^{-2 pi alpha - gamma} + 1,   c = e^{2 pi deviation},

    with gamma the Euler-Mascheroni constant.
    """
    if not alpha + deviation < _count_threshold(radius) - 1.0 / np.pi:
        raise ConfigError("asymptotic bounds need alpha + deviation below "
                          "ln(4R)/(2 pi) - 1/pi")
    c = math.exp(2.0 * np.pi * deviation)
    base = 2.0 * radius * math.exp(-2.0 * np.pi * alpha - EULER_GAMMA)
    lower = base / c - 1.0 - 4.0 * (math.exp(1.0 / 92.0) - 1.0)
    upper = base * c + 1.0
    return lower, upper


@dataclass(frozen=True)
class CountReport:
    """Negative-eigenvalue count with its interval sandwich."""

    alpha: float
    count: int
    deviation: float          # computed kernel deviation from the circle
    radius: float             # comparison circle radius L/(2 pi)
    r_index: int              # interval index of alpha + deviation
    l_index: int              # interval index of alpha - deviation
    lower: int                # 2 r + 1
    upper: int                # 2 l + 1 (meaningful when count can be nonzero)
    asym_lower: float | None  # explicit bounds when applicable
    asym_upper: float | None
    endpoint_flag: bool       # alpha +- deviation within 1e-12 of an endpoint
    vanishes: bool            # alpha - deviation at or above the threshold


def count_bound_states(curve: Curve, grid: ArcGrid, alpha: float) -> CountReport:
    """Count negative eigenvalues at coupling alpha and check the sandwich.

    The count equals the number of eigenvalues of the energy-zero boundary
    operator above alpha (within the trusted range n/4; the call refuses
    rather than undercounting when the count reaches that range).  For a
    circle the result is cross-checked against the closed-form 2r + 1.
    """
    if alpha == 0:
        raise ConfigError("coupling alpha must be nonzero")
    spec = eigen(boundary_matrix(curve, 0.0, grid), vectors=False)
    trusted = spec.trusted_count
    count = int(np.sum(spec.values[:trusted] > alpha))
    if count >= trusted:
        raise NumericsError("count reaches the trusted range n/4; refusing to "
                            "undercount - refine the grid")

    deviation = circle_deviation(curve, grid)
    radius = grid.length / (2.0 * np.pi)
    t0 = _count_threshold(radius)
    r_index = interval_index(alpha + deviation, radius)
    l_index = interval_index(alpha - deviation, radius)
    lower = 2 * r_index + 1
    upper = 2 * l_index + 1

    vanishes = alpha - deviation >= t0
    if vanishes:
        if count != 0:
            raise InvariantError(
                f"count {count} nonzero although alpha - deviation >= ln(4R)/(2 pi)")
    else:
        if not lower <= count <= upper:
            raise InvariantError(
                f"count {count} escapes the sandwich [{lower}, {upper}] "
                f"(deviation {deviation:.3e})")

    if curve.is_circle:
        expected = 0 if alpha >= t0 else 2 * interval_index(alpha, radius) + 1
        if count != expected:
            raise InvariantError(
                f"circle count {count} differs from closed form {expected}")

    endpoint_flag = False
    for x in (alpha + deviation, alpha - deviation):
        left, right = _interval_endpoints(interval_index(x, radius), radius)
        if min(abs(x - left), abs(x - right)) < ENDPOINT_TOL:
            endpoint_flag = True

    asym_lower = asym_upper = None
    if alpha + deviation < t0 - 1.0 / np.pi:
        asym_lower, asym_upper = asymptotic_count_bounds(radius, alpha, deviation)

    return CountReport(alpha=alpha, count=count, deviation=deviation,
                       radius=radius, r_index=r_index, l_index=l_index,
                       lower=lower, upper=upper, asym_lower=asym_lower,
                       asym_upper=asym_upper, endpoint_flag=endpoint_flag,
                       vanishes=vanishes)


def isoperimetric_compare(curve: Curve, grid: ArcGrid,
                          alpha: float) -> tuple[float, float, float]:
    """Principal bound-state energies of the curve and the equal-length circle.

    Returns (energy_curve, energy_circle, gap) with gap = circle - curve;
    the circle uniquely maximizes the principal eigenvalue among closed
    curves of fixed length, so a positive gap is expected for any
    non-circular input.  Comparing a circle against itself is allowed and
    gives a gap of zero up to root tolerance.
    """
    radius = grid.length / (2.0 * np.pi)
    if alpha >= _count_threshold(radius):
        raise ConfigError("alpha too large: neither operator has bound states")
    circle = make_circle(radius)
    circle_grid = make_grid(circle, grid.n)
    curve_states = find_bound_states(curve, grid, alpha, max_states=1)
    circle_states = find_bound_states(circle, circle_grid, alpha, max_states=1)
    if not curve_states or not circle_states:
        raise NumericsError("no bound state found for the comparison")
    lam_curve = curve_states[0].energy
    lam_circle = circle_states[0].energy
    return lam_curve, lam_circle, lam_circle - lam_curve
