"""Closed curves in R^3 and their arc-length geometry.

A curve is a truncated Fourier series

    sigma(t) = a0 + sum_{m=1}^{M} cos(2 pi m t / T) c_m + sin(2 pi m t / T) s_m,

which is closed and smooth by construction.  All spectral computations
downstream work on the unit-speed (arc-length) parametrization, obtained
here by numerically inverting the arc-length function.  The key geometric
quantities are chord lengths |sigma(s) - sigma(t)|, the curvature along the
curve, and the L^2 deviation of the curve's Coulomb kernel from that of the
circle of equal length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import PchipInterpolator

from .errors import ConfigError, CurveError

# Threshold for the self-intersection guard: points whose arc separation
# exceeds L/64 must stay at least this fraction of L apart in space.
SELF_INTERSECTION_TOL = 1e-9


class _ArcTable:
    """Monotone map between arc length s in [0, L] and curve parameter t.

    Cumulative lengths are accumulated with composite Gauss quadrature of
    |sigma'| on fine panels; inversion uses a monotone cubic (PCHIP) initial
    guess refined by Newton steps on the exact quadrature, so parameter
    values are recovered essentially to machine precision.
    """

    def __init__(self, curve: "Curve", panels: int):
        self._curve = curve
        T = curve.period
        self._edges = np.linspace(0.0, T, panels + 1)
        x, w = leggauss(10)
        self._gauss_x = x
        self._gauss_w = w
        mid = 0.5 * (self._edges[1:] + self._edges[:-1])
        half = 0.5 * np.diff(self._edges)
        tq = mid[:, None] + half[:, None] * x[None, :]
        speeds = curve.speed(tq.ravel()).reshape(tq.shape)
        panel_len = half * (speeds @ w)
        self.cum = np.concatenate([[0.0], np.cumsum(panel_len)])
        self.total_length = float(self.cum[-1])
        self._inverse = PchipInterpolator(self.cum, self._edges)

    def length_at(self, t: np.ndarray) -> np.ndarray:
        """Arc length from parameter 0 to t (t in [0, T])."""
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self._edges, t, side="right") - 1, 0,
                      len(self._edges) - 2)
        lo = self._edges[idx]
        mid = 0.5 * (lo + t)
        half = 0.5 * (t - lo)
        tq = mid[..., None] + half[..., None] * self._gauss_x
        speeds = self._curve.speed(tq.reshape(-1)).reshape(tq.shape)
        return self.cum[idx] + half * (speeds @ self._gauss_w)

    def param_at(self, s: np.ndarray) -> np.ndarray:
        """Parameter t with arc length s, for s in [0, L] (vectorized)."""
        s = np.asarray(s, dtype=float)
        t = np.clip(self._inverse(np.clip(s, 0.0, self.total_length)),
                    0.0, self._curve.period)
        for _ in range(4):
            resid = s - self.length_at(t)
            t = t + resid / self._curve.speed(t)
            t = np.clip(t, 0.0, self._curve.period)
        return t


class Curve:
    """Closed C^infinity curve given by truncated Fourier coefficients."""

    def __init__(self, a0, cos_coeff, sin_coeff, period,
                 is_circle: bool = False, radius: float | None = None):
        self.a0 = np.asarray(a0, dtype=float).reshape(3)
        self.cos_coeff = np.atleast_2d(np.asarray(cos_coeff, dtype=float))
        self.sin_coeff = np.atleast_2d(np.asarray(sin_coeff, dtype=float))
        if self.cos_coeff.shape != self.sin_coeff.shape or self.cos_coeff.shape[1] != 3:
            raise CurveError("cosine and sine coefficient arrays must both be (M, 3)")
        if period <= 0:
            raise CurveError("period must be positive")
        self.period = float(period)
        self._modes = np.arange(1, self.cos_coeff.shape[0] + 1, dtype=float)
        self.is_circle = bool(is_circle)
        self.radius = radius
        self._table: _ArcTable | None = None
        # a circle built by make_circle is unit-speed natively
        self.unit_speed = bool(is_circle)
        self.curvature_bound: float | None = 1.0 / radius if is_circle else None

    # -- evaluation in the native parameter -------------------------------

    def _angles(self, t):
        t = np.asarray(t, dtype=float)
        return 2.0 * np.pi * np.multiply.outer(t, self._modes) / self.period

    def point(self, t):
        """Position sigma(t); t scalar or array, returns (..., 3)."""
        ang = self._angles(t)
        return self.a0 + np.cos(ang) @ self.cos_coeff + np.sin(ang) @ self.sin_coeff

    def velocity(self, t):
        ang = self._angles(t)
        om = 2.0 * np.pi * self._modes / self.period
        return (-np.sin(ang) * om) @ self.cos_coeff + (np.cos(ang) * om) @ self.sin_coeff

    def acceleration(self, t):
        ang = self._angles(t)
        om2 = (2.0 * np.pi * self._modes / self.period) ** 2
        return (-np.cos(ang) * om2) @ self.cos_coeff + (-np.sin(ang) * om2) @ self.sin_coeff

    def speed(self, t):
        return np.linalg.norm(self.velocity(t), axis=-1)

    def curvature(self, t):
        """|sigma' x sigma''| / |sigma'|^3, the curvature of the trace."""
        v = self.velocity(t)
        a = self.acceleration(t)
        cross = np.cross(v, a)
        return np.linalg.norm(cross, axis=-1) / np.linalg.norm(v, axis=-1) ** 3

    # -- arc-length parametrization ---------------------------------------

    @property
    def total_length(self) -> float:
        if self.unit_speed and self._table is None:
            return self.period
        if self._table is None:
            raise CurveError("curve has no arc-length table; call reparametrize_arclength")
        return self._table.total_length

    def param_at_arclength(self, s):
        s = np.mod(np.asarray(s, dtype=float), self.total_length)
        if self.unit_speed and self._table is None:
            return s
        return self._table.param_at(s)

    def point_at_arclength(self, s):
        return self.point(self.param_at_arclength(s))

    def curvature_at_arclength(self, s):
        return self.curvature(self.param_at_arclength(s))


def make_circle(radius: float) -> Curve:
    """Planar circle of the given radius, natively unit-speed.

    sigma(t) = (R cos(t/R), R sin(t/R), 0) with period 2 pi R.
    """
    if radius <= 0:
        raise CurveError("circle radius must be positive")
    return Curve(
        a0=np.zeros(3),
        cos_coeff=[[radius, 0.0, 0.0]],
        sin_coeff=[[0.0, radius, 0.0]],
        period=2.0 * np.pi * radius,
        is_circle=True,
        radius=float(radius),
    )


def make_ellipse(a: float, b: float) -> Curve:
    """Planar ellipse (a cos t, b sin t, 0), not yet arc-length parametrized."""
    if a <= 0 or b <= 0:
        raise CurveError("ellipse semi-axes must be positive")
    return Curve(
        a0=np.zeros(3),
        cos_coeff=[[a, 0.0, 0.0]],
        sin_coeff=[[0.0, b, 0.0]],
        period=2.0 * np.pi,
    )


def scale_to_length(curve: Curve, target_length: float) -> Curve:
    """Rescale a curve homothetically so its total length equals the target.

    The parameter domain scales along with the coefficients, so a natively
    unit-speed input stays unit-speed.
    """
    if target_length <= 0:
        raise ConfigError("target length must be positive")
    table = _ArcTable(curve, panels=_panel_count(curve))
    factor = target_length / table.total_length
    return Curve(
        a0=curve.a0 * factor,
        cos_coeff=curve.cos_coeff * factor,
        sin_coeff=curve.sin_coeff * factor,
        period=curve.period * factor,
        is_circle=curve.is_circle,
        radius=None if curve.radius is None else curve.radius * factor,
    )


def _panel_count(curve: Curve) -> int:
    return max(256, 16 * curve.cos_coeff.shape[0])


def reparametrize_arclength(curve: Curve, tol: float = 1e-8) -> Curve:
    """Attach an arc-length table and validate the unit-speed property.

    Raises CurveError on irregular (vanishing velocity) or self-intersecting
    input.  The returned curve answers point_at_arclength queries through the
    table; for a natively unit-speed curve the input is returned unchanged.
    """
    tfine = np.linspace(0.0, curve.period, 4096, endpoint=False)
    speeds = curve.speed(tfine)
    if speeds.min() <= 1e-10 * speeds.max():
        raise CurveError("curve is not regular: |sigma'| vanishes on the parameter grid")

    if curve.unit_speed and curve._table is None:
        dev = np.abs(speeds - 1.0).max()
        if dev < tol:
            _check_self_intersection(curve)
            return curve

    out = Curve(curve.a0, curve.cos_coeff, curve.sin_coeff, curve.period,
                is_circle=curve.is_circle, radius=curve.radius)
    table = _ArcTable(out, panels=_panel_count(out))
    out._table = table
    out.unit_speed = True
    _check_self_intersection(out)

    L = table.total_length
    n_check = 4 * _panel_count(out)
    s_check = np.linspace(0.0, L, n_check, endpoint=False)
    # 4th-order central difference of the position; the arc table is
    # accurate to ~1e-14 so the stencil noise stays near 1e-12
    hs = 1e-3 * L / (2.0 * np.pi)
    p1 = out.point_at_arclength(s_check + hs)
    m1 = out.point_at_arclength(s_check - hs)
    p2 = out.point_at_arclength(s_check + 2 * hs)
    m2 = out.point_at_arclength(s_check - 2 * hs)
    tangent = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * hs)
    dev = np.abs(np.linalg.norm(tangent, axis=-1) - 1.0).max()
    if dev >= tol:
        raise CurveError(f"unit-speed check failed: max | |sigma'| - 1 | = {dev:.3e}")

    out.curvature_bound = float(out.curvature(tfine).max())
    return out


def _check_self_intersection(curve: Curve) -> None:
    n = 1024
    L = curve.total_length
    s = np.arange(n) * L / n
    pts = curve.point_at_arclength(s)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    ds = np.abs(s[:, None] - s[None, :])
    ds = np.minimum(ds, L - ds)
    far = ds > L / 64.0
    if dist[far].min() <= SELF_INTERSECTION_TOL * L:
        raise CurveError("curve self-intersects (or nearly touches itself)")


# -- arc-length grids ------------------------------------------------------


@dataclass(frozen=True)
class ArcGrid:
    """Equispaced arc-length nodes with the uniform trapezoid weight."""

    curve: Curve
    nodes: np.ndarray       # (N,) arc-length values s_j = (j-1) L / N
    weight: float           # L / N
    points: np.ndarray      # (N, 3) positions on the curve
    curvatures: np.ndarray  # (N,) curvature at the nodes

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def length(self) -> float:
        return self.n * self.weight


def make_grid(curve: Curve, n: int) -> ArcGrid:
    """Build the N-node discretization backbone (N even, N >= 16)."""
    if n % 2 != 0 or n < 16:
        raise ConfigError("grid size must be even and at least 16")
    if not curve.unit_speed:
        raise CurveError("grid requires a unit-speed curve; call reparametrize_arclength")
    L = curve.total_length
    s = np.arange(n) * (L / n)
    return ArcGrid(
        curve=curve,
        nodes=s,
        weight=L / n,
        points=curve.point_at_arclength(s),
        curvatures=curve.curvature_at_arclength(s),
    )


# -- geometric quantities --------------------------------------------------


def chord(curve: Curve, s, t):
    """Euclidean distance |sigma(s) - sigma(t)| at arc lengths s, t."""
    ps = curve.point_at_arclength(s)
    pt = curve.point_at_arclength(t)
    return np.linalg.norm(ps - pt, axis=-1)


def circle_chord(length: float, ds):
    """Chord of the circle of circumference `length` at arc separation ds."""
    R = length / (2.0 * np.pi)
    return 2.0 * R * np.abs(np.sin(np.pi * np.asarray(ds, dtype=float) / length))


def _chord_matrices(grid: ArcGrid):
    """Pairwise chords of the curve and of the equal-length circle."""
    pts = grid.points
    diff = pts[:, None, :] - pts[None, :, :]
    c_curve = np.sqrt(np.sum(diff * diff, axis=-1))
    s = grid.nodes
    c_circle = circle_chord(grid.length, np.abs(s[:, None] - s[None, :]))
    return c_curve, c_circle


def circle_deviation(curve: Curve, grid: ArcGrid) -> float:
    """Squared L^2 distance between the curve's Coulomb kernel and the circle's.

    Double integral over [0, L]^2 of

        | 1/(4 pi |sigma(t) - sigma(s)|) - 1/(4 pi |tau(t) - tau(s)|) |^2,

    where tau parametrizes the circle of equal length.  Evaluated by the
    tensor periodic trapezoid rule; the integrand extends continuously by 0
    on the diagonal (both chords agree to second order for a C^2 curve), so
    the diagonal entries are set to 0.  Zero for a circle, positive and
    rigid-motion invariant otherwise.
    """
    c_curve, c_circle = _chord_matrices(grid)
    n = grid.n
    off = ~np.eye(n, dtype=bool)
    integrand = np.zeros((n, n))
    integrand[off] = (1.0 / (4.0 * np.pi * c_curve[off])
                      - 1.0 / (4.0 * np.pi * c_circle[off]))
    return float(grid.weight ** 2 * np.sum(integrand ** 2))


def chord_mean_inequality(curve: Curve, grid: ArcGrid, u: float):
    """Both sides of the chord-average comparison at arc shift u.

    lhs = integral over one period of |sigma(s+u) - sigma(s)| ds,
    rhs = (L^2/pi) sin(pi u / L).  Equality holds exactly for circles;
    any other closed curve of the same length satisfies lhs < rhs.
    """
    L = grid.length
    if not (0.0 < u < L):
        raise ConfigError("shift u must lie strictly inside (0, L)")
    shifted = curve.point_at_arclength(grid.nodes + u)
    lhs = grid.weight * float(np.sum(np.linalg.norm(shifted - grid.points, axis=-1)))
    rhs = (L ** 2 / np.pi) * np.sin(np.pi * u / L)
    return lhs, rhs


def curve_to_json_dict(curve: Curve) -> dict:
    """Serializable description matching the CLI curve schema."""
    if curve.is_circle:
        return {"kind": "circle", "radius": curve.radius}
    return {
        "kind": "fourier",
        "a0": curve.a0.tolist(),
        "cos": curve.cos_coeff.tolist(),
        "sin": curve.sin_coeff.tolist(),
        "period": curve.period,
    }


def curve_from_json_dict(spec: dict, reparam_tol: float = 1e-8) -> Curve:
    """Build (and arc-length parametrize) a curve from its JSON description."""
    try:
        kind = spec["kind"]
        if kind == "circle":
            return make_circle(float(spec["radius"]))
        if kind == "fourier":
            raw = Curve(
                a0=spec.get("a0", [0.0, 0.0, 0.0]),
                cos_coeff=spec["cos"],
                sin_coeff=spec["sin"],
                period=float(spec.get("period", 2.0 * np.pi)),
            )
            return reparametrize_arclength(raw, tol=reparam_tol)
        raise ConfigError(f"unknown curve kind {kind!r}")
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed curve description: {exc}") from exc
