"""Pointwise integral kernels.

All kernels derive from the free-space resolvent kernel e^{i sqrt(lam) r}/(4 pi r)
with the square root taken on the branch with nonnegative imaginary part;
values on the positive real axis are the boundary values from above, so
sqrt(lam + i0) is real positive for lam >= 0 and i sqrt(lam) = -sqrt(-lam)
for lam < 0.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.integrate import quad

from .curves import Curve, chord, circle_chord
from .errors import ConfigError

# switch to a 3-term Taylor expansion once |exponent| * r drops below this,
# to avoid cancellation in differences of exponentials
_SERIES_CUTOFF = 1e-6


def spectral_sqrt(lam) -> complex:
    """sqrt(lam) with Im >= 0; boundary values on [0, inf) from above."""
    w = cmath.sqrt(lam)
    if w.imag < 0.0:
        w = -w
    return w


def green_kernel(lam, r):
    """Free resolvent kernel e^{i sqrt(lam) r} / (4 pi r); real for lam <= 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ConfigError("green_kernel requires r > 0")
    lamc = complex(lam)
    if lamc.imag == 0.0 and lamc.real <= 0.0:
        a = math.sqrt(-lamc.real)
        out = np.exp(-a * r) / (4.0 * np.pi * r)
        return float(out) if out.ndim == 0 else out
    k = spectral_sqrt(lam)
    out = np.exp(1j * k * r) / (4.0 * np.pi * r)
    return complex(out) if out.ndim == 0 else out


def circle_top_eigenvalue(lam: float, radius: float) -> float:
    """Largest eigenvalue of the circle's boundary operator at energy lam <= 0.

    Equals

        int_0^{pi/2} (e^{-sqrt(-lam) 2R sin s} - 1) / (2 pi sin s) ds
            + ln(4R) / (2 pi),

    evaluated with adaptive Gauss-Kronrod quadrature to absolute tolerance
    1e-12; the integrand extends continuously by -sqrt(-lam) R / pi at s = 0.
    The eigenfunction is the constant function; the value decreases to
    -infinity as lam -> -infinity.
    """
    if lam > 0:
        raise ConfigError("circle_top_eigenvalue requires lam <= 0")
    if radius <= 0:
        raise ConfigError("radius must be positive")
    const = math.log(4.0 * radius) / (2.0 * np.pi)
    if lam == 0:
        return const
    a = math.sqrt(-lam)

    def integrand(s):
        if s == 0.0:
            return -a * radius / np.pi
        return np.expm1(-a * 2.0 * radius * np.sin(s)) / (2.0 * np.pi * np.sin(s))

    val, _ = quad(integrand, 0.0, np.pi / 2.0, epsabs=1e-12, epsrel=1e-12, limit=200)
    return val + const


def smoothing_kernel(lam, r):
    """(1 - e^{-sqrt(-lam) r}) / (4 pi r), extended by sqrt(-lam)/(4 pi) at r = 0.

    Bounded by sqrt(-lam)/(4 pi) everywhere; identically zero for lam = 0.
    """
    if lam > 0:
        raise ConfigError("smoothing_kernel requires lam <= 0")
    r = np.asarray(r, dtype=float)
    a = math.sqrt(-lam)
    x = a * r
    small = x < _SERIES_CUTOFF
    safe_r = np.where(small, 1.0, r)
    out = np.where(
        small,
        a * (1.0 - x / 2.0 + x * x / 6.0) / (4.0 * np.pi),
        -np.expm1(-x) / (4.0 * np.pi * safe_r),
    )
    return float(out) if out.ndim == 0 else out


def comparison_kernel(curve: Curve, lam: float, s: float, t: float) -> float:
    """Difference of resolvent kernels between curve chords and circle chords.

    G_lam(|sigma(s) - sigma(t)|) - G_lam(|tau(s) - tau(t)|), where tau is the
    arc-length circle of the same length; 0 on the diagonal, where both
    chords agree to second order.
    """
    if lam > 0:
        raise ConfigError("comparison_kernel requires lam <= 0")
    L = curve.total_length
    ds = abs(float(s) - float(t)) % L
    ds = min(ds, L - ds)
    if ds == 0.0:
        return 0.0
    c_curve = float(chord(curve, s, t))
    c_circ = float(circle_chord(L, ds))
    return float(green_kernel(lam, c_curve) - green_kernel(lam, c_circ))


def scattering_kernel(lam, eta: float, r):
    """(e^{i sqrt(lam) r} - e^{i sqrt(eta) r}) / (4 pi r) for a reference eta < 0.

    Extended by (i sqrt(lam) + sqrt(-eta)) / (4 pi) at r = 0.  Real for real
    lam < 0; for lam >= 0 the imaginary part is sin(sqrt(lam) r)/(4 pi r).
    """
    if eta >= 0:
        raise ConfigError("scattering_kernel requires eta < 0")
    r = np.asarray(r, dtype=float)
    kx = 1j * spectral_sqrt(lam)              # exponent slope for lam
    ky = complex(-math.sqrt(-eta))            # exponent slope for eta
    scale = abs(kx) + abs(ky)
    small = scale * r < _SERIES_CUTOFF
    safe_r = np.where(small, 1.0, r)
    # both exponentials through the complex path so equal slopes cancel exactly
    x = kx * r
    y = ky * r
    series = (kx - ky) * (1.0 + (x + y) / 2.0 + (x * x + x * y + y * y) / 6.0)
    out = np.where(
        small,
        series / (4.0 * np.pi),
        (np.exp(x) - np.exp(y)) / (4.0 * np.pi * safe_r),
    )
    lamc = complex(lam)
    if lamc.imag == 0.0 and lamc.real < 0.0:
        out = out.real
    return out if out.ndim else out[()]
