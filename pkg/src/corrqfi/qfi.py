"""Quantum Fisher information from a parameterized density matrix.

Two routes are provided and kept deliberately independent:

* ``qfi_sld`` evaluates the symmetric-logarithmic-derivative closed form in
  the eigenbasis of the state,

      F = sum_{i,j: lam_i + lam_j > tol} 2 |<i| d_rho |j>|^2 / (lam_i + lam_j),

  which is the main numerical path (it needs no eigenvector derivatives and
  is therefore safe under spectral degeneracies).

* ``qfi_spectral`` assembles the spectral decomposition formula

      F = sum_i lam_i'^2 / lam_i + sum_i lam_i F_i
          - sum_{i != j} 8 lam_i lam_j |<psi_i'|psi_j>|^2 / (lam_i + lam_j)

  from externally supplied eigen-data with derivatives; the closed-form
  module feeds it analytic spectra so the two routes cross-check each other.

Only the support set of the state contributes: eigenvalue pairs whose sum
falls at or below ``support_tol`` are excluded everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .channels import ChannelSpec, apply_channel
from .linalg import HERMITICITY_TOL, eigh
from .probes import Param, ProbeSpec, density, density_derivative

__all__ = [
    "SUPPORT_TOL",
    "SpectralData",
    "qfi_sld",
    "build_sld",
    "qfi_spectral",
    "qfi_numeric",
    "qfi_numeric_fd",
    "cramer_rao_bound",
]

# Default support cutoff on lam_i + lam_j.  The eigenstates outside the
# support set do not affect the Fisher information; this threshold decides
# numerically what counts as "outside".
SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class SpectralData:
    """Eigen-decomposition of a state plus its parameter derivatives.

    ``eigenvectors`` holds |psi_i> as columns and ``d_eigenvectors`` their
    derivatives; ``pure_term_qfi`` is the per-eigenstate pure contribution
    F_i = 4 (<psi_i'|psi_i'> - |<psi_i'|psi_i>|^2).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    d_eigenvalues: np.ndarray
    d_eigenvectors: np.ndarray
    pure_term_qfi: np.ndarray


def _require_hermitian(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
        raise ValueError(f"{name} is not Hermitian within tolerance")
    return m


def _qfi_from_eigensystem(
    w: np.ndarray, v: np.ndarray, d_rho: np.ndarray, support_tol: float
) -> float:
    t = v.conj().T @ d_rho @ v
    denom = w[:, None] + w[None, :]
    mask = denom > support_tol
    return float(np.sum(2.0 * np.abs(t[mask]) ** 2 / denom[mask]))


def qfi_sld(
    rho: np.ndarray, d_rho: np.ndarray, support_tol: float = SUPPORT_TOL
) -> float:
    """QFI of ``rho`` for the parameter behind ``d_rho`` (SLD route)."""
    rho = _require_hermitian(rho, "rho")
    d_rho = _require_hermitian(d_rho, "d_rho")
    w, v = eigh(rho)
    return _qfi_from_eigensystem(w, v, d_rho, support_tol)


def build_sld(
    rho: np.ndarray, d_rho: np.ndarray, support_tol: float = SUPPORT_TOL
) -> np.ndarray:
    """Symmetric logarithmic derivative L with d_rho = (L rho + rho L)/2.

    Matrix elements outside the support set are set to zero, the standard
    minimal-norm completion.  Tr(L^2 rho) reproduces qfi_sld.
    """
    rho = _require_hermitian(rho, "rho")
    d_rho = _require_hermitian(d_rho, "d_rho")
    w, v = eigh(rho)
    t = v.conj().T @ d_rho @ v
    denom = w[:, None] + w[None, :]
    safe = np.where(denom > support_tol, denom, np.inf)  # excluded pairs -> 0
    return v @ (2.0 * t / safe) @ v.conj().T


def qfi_spectral(data: SpectralData, support_tol: float = SUPPORT_TOL) -> float:
    """QFI assembled from eigen-data with derivatives (spectral route)."""
    w = np.asarray(data.eigenvalues, dtype=float)
    dw = np.asarray(data.d_eigenvalues, dtype=float)
    v = np.asarray(data.eigenvectors, dtype=complex)
    dv = np.asarray(data.d_eigenvectors, dtype=complex)
    fi = np.asarray(data.pure_term_qfi, dtype=float)
    n = w.size

    classical = sum(dw[i] ** 2 / w[i] for i in range(n) if w[i] > support_tol)
    mixture = float(np.dot(w, fi))
    cross = 0.0
    overlaps = dv.conj().T @ v  # overlaps[i, j] = <psi_i'|psi_j>
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            den = w[i] + w[j]
            if den <= support_tol:
                continue
            cross += 8.0 * w[i] * w[j] / den * abs(overlaps[i, j]) ** 2
    return float(classical + mixture - cross)


def qfi_numeric(
    probe: ProbeSpec,
    channel: ChannelSpec,
    param: Param,
    support_tol: float = SUPPORT_TOL,
) -> float:
    """QFI of the channel output, fully numeric.

    The channel is linear and parameter independent, so the exact analytic
    probe derivative is pushed through it directly.
    """
    rho = apply_channel(density(probe), channel)
    d_rho = apply_channel(density_derivative(probe, param), channel)
    return qfi_sld(rho, d_rho, support_tol)


def qfi_numeric_fd(
    probe: ProbeSpec,
    channel: ChannelSpec,
    param: Param,
    step: float = 1e-5,
    support_tol: float = SUPPORT_TOL,
) -> float:
    """Finite-difference variant of qfi_numeric (independent oracle).

    Replaces the analytic probe derivative by a central difference of the
    channel output with the given step; everything else is unchanged.
    """
    param = Param(param)
    kwargs = {"family": probe.family, "theta": probe.theta, "phi": probe.phi,
              "r": probe.r, "n_qubits": probe.n_qubits}
    lo = dict(kwargs)
    hi = dict(kwargs)
    lo[param.value] -= step
    hi[param.value] += step
    rho_lo = apply_channel(density(ProbeSpec(**lo)), channel)
    rho_hi = apply_channel(density(ProbeSpec(**hi)), channel)
    d_rho = (rho_hi - rho_lo) / (2.0 * step)
    # Dividing by 2h amplifies the matmul roundoff of the two channel
    # applications past the Hermiticity tolerance; fold it back.
    d_rho = 0.5 * (d_rho + d_rho.conj().T)
    rho = apply_channel(density(probe), channel)
    return qfi_sld(rho, d_rho, support_tol)


def cramer_rao_bound(qfi: float, repetitions: int) -> float:
    """Minimum unbiased-estimator variance 1 / (M * F).

    A nonpositive QFI carries no information about the parameter; the bound
    is then unbounded and signalled by returning ``math.inf`` rather than
    raising.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    if qfi <= 0.0:
        return math.inf
    return 1.0 / (repetitions * qfi)
