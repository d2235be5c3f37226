"""Scattering matrix block on the channel space spanned by Im N.

For energies lam >= 0 the operator N(lam + i0) with kernel

    (e^{i sqrt(lam) r} - e^{i sqrt(eta) r}) / (4 pi r),   eta < 0 fixed,

is assembled on the grid.  Its imaginary part is positive semidefinite and
of rapidly decaying rank; the nontrivial scattering block acts on the
retained range of Im N as

    S' = I - 2i sqrt(Im N) (N + B_eta - alpha)^{-1} sqrt(Im N),

with B_eta the real boundary operator at the reference energy.  S' is
unitary on that subspace away from exceptional energies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .assembly import OperatorMatrix, boundary_matrix, kink_correction, _finalize
from .curves import ArcGrid, Curve
from .errors import ConfigError, NumericsError
from .kernels import scattering_kernel
from .spectral import eigen

RANK_TOL = 1e-10          # relative cutoff defining the retained channel space
CONDITION_LIMIT = 1e12    # flags lam at or near the exceptional set
ETA_MARGIN = 1e-6         # required spectral distance of alpha from B_eta


def scattering_layer_matrix(curve: Curve, grid: ArcGrid, lam,
                            eta: float) -> OperatorMatrix:
    """Trapezoid matrix of the scattering kernel; complex symmetric for lam > 0.

    The diagonal takes the analytic kernel limit plus the kink correction
    with slope (eta - lam)/(8 pi); the correction is real, so the imaginary
    part of the matrix is exactly the positive semidefinite trapezoid matrix
    of sin(sqrt(lam) r)/(4 pi r).
    """
    if eta >= 0:
        raise ConfigError("reference energy eta must be negative")
    pts = grid.points
    diff = pts[:, None, :] - pts[None, :, :]
    chords = np.sqrt(np.sum(diff * diff, axis=-1))
    np.fill_diagonal(chords, 0.0)
    w = grid.weight
    mat = w * scattering_kernel(lam, eta, chords)
    lamc = complex(lam)
    slope = (eta - lamc.real) / (8.0 * np.pi)
    mat[np.diag_indices_from(mat)] += kink_correction(slope, w)
    return _finalize(mat, lam, f"scattering lam={lam} eta={eta:g}")


def choose_reference_energy(curve: Curve, grid: ArcGrid, alpha: float,
                            candidates) -> float:
    """First candidate eta < 0 whose boundary operator keeps alpha at a
    spectral distance above the invertibility margin."""
    candidates = list(candidates)
    if not candidates:
        raise ConfigError("empty candidate list for the reference energy")
    for eta in candidates:
        if eta >= 0:
            raise ConfigError("reference energy candidates must be negative")
        spec = eigen(boundary_matrix(curve, eta, grid), vectors=False)
        if np.min(np.abs(spec.values - alpha)) > ETA_MARGIN:
            return float(eta)
    raise NumericsError("no candidate reference energy keeps alpha away from "
                        "the spectrum")


@dataclass(frozen=True)
class ScatteringBlock:
    """Unitary block of the scattering matrix on the retained channel space."""

    lam: float
    eta: float
    alpha: float
    retained_dim: int
    matrix: np.ndarray            # (g, g) complex
    unitarity_defect: float       # || S'* S' - I ||_2 on the retained space
    channel_eigenvalues: np.ndarray  # eigenvalues of Im N, nonincreasing
    min_channel_eigenvalue: float
    condition: float              # condition number of N + B_eta - alpha


def scattering_block(curve: Curve, grid: ArcGrid, lam: float, alpha: float,
                     eta: float, rank_tol: float = RANK_TOL) -> ScatteringBlock:
    """Assemble S'(lam) at energy lam >= 0, coupling alpha, reference eta."""
    if lam < 0:
        raise ConfigError("scattering block is defined for lam >= 0")
    n_mat = scattering_layer_matrix(curve, grid, lam, eta).data
    b_mat = boundary_matrix(curve, eta, grid).data

    imag_part = 0.5 * (n_mat.imag + n_mat.imag.T)
    vals, vecs = scipy.linalg.eigh(imag_part)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    top = vals[0] if len(vals) else 0.0
    if top <= 0.0:
        retained = 0
    else:
        retained = int(np.sum(vals > rank_tol * top))
    channel_vals = vals.copy()
    min_channel = float(vals[-1]) if len(vals) else 0.0

    if retained == 0:
        return ScatteringBlock(lam=lam, eta=eta, alpha=alpha, retained_dim=0,
                               matrix=np.zeros((0, 0), dtype=complex),
                               unitarity_defect=0.0,
                               channel_eigenvalues=channel_vals,
                               min_channel_eigenvalue=min_channel,
                               condition=0.0)

    system = n_mat + b_mat - alpha * np.eye(grid.n)
    condition = float(np.linalg.cond(system))
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise NumericsError(
            f"system N + B - alpha is numerically singular at lam={lam:g} "
            f"(condition {condition:.2e}); energy near the exceptional set")

    sqrt_vals = np.sqrt(vals[:retained])
    half = vecs[:, :retained] * sqrt_vals     # columns are sqrt(Im N) modes
    solved = scipy.linalg.solve(system, half.astype(complex))
    block = np.eye(retained, dtype=complex) - 2j * (half.T @ solved)
    defect = float(np.linalg.norm(block.conj().T @ block - np.eye(retained), 2))
    return ScatteringBlock(lam=lam, eta=eta, alpha=alpha, retained_dim=retained,
                           matrix=block, unitarity_defect=defect,
                           channel_eigenvalues=channel_vals,
                           min_channel_eigenvalue=min_channel,
                           condition=condition)
