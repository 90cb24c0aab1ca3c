"""Small dense linear-algebra helpers shared across the package."""
from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-10


def hermitize(M: np.ndarray) -> np.ndarray:
    """Nearest Hermitian matrix (also fixes round-off drift)."""
    return (M + M.conj().T) / 2


def hermitize_stack(G: np.ndarray) -> np.ndarray:
    return (G + np.swapaxes(G.conj(), -1, -2)) / 2


def min_eig(M: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitize(M)).min())


def spectral_norm(M: np.ndarray) -> float:
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def psd_clip(M: np.ndarray) -> np.ndarray:
    """Project a Hermitian matrix onto the PSD cone (eigenvalue clipping)."""
    w, V = np.linalg.eigh(hermitize(M))
    return (V * np.clip(w, 0, None)) @ V.conj().T


def psd_clip_stack(G: np.ndarray) -> np.ndarray:
    """Stackwise PSD projection for an (L, n, n) Hermitian stack."""
    w, V = np.linalg.eigh(hermitize_stack(G))
    return (V * np.clip(w, 0, None)[..., None, :]) @ np.swapaxes(V.conj(), -1, -2)


def hermitian_sqrt(M: np.ndarray, tol: float = DEFAULT_TOL):
    """Hermitian square root and pseudo-inverse square root of a PSD matrix."""
    w, V = np.linalg.eigh(hermitize(M))
    wmax = max(w.max(), 0.0)
    if w.min() < -tol * max(wmax, 1.0):
        raise ValueError(f"matrix not PSD: min eigenvalue {w.min():.3e}")
    w = np.clip(w, 0, None)
    keep = w > tol * max(wmax, 1e-300)
    root = (V[:, keep] * np.sqrt(w[keep])) @ V[:, keep].conj().T
    iroot = (V[:, keep] / np.sqrt(w[keep])) @ V[:, keep].conj().T
    return root, iroot


def orthonormal_range(M: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of ran(M) via SVD with a relative rank cut."""
    if M.size == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(M)
    rank = int((s > tol * max(s.max(initial=0.0), 1e-300)).sum())
    return U[:, :rank]


def polar_isometry(M: np.ndarray) -> np.ndarray:
    """Closest matrix with orthonormal columns (polar factor)."""
    U, _, Vh = np.linalg.svd(M, full_matrices=False)
    return U @ Vh


def numerical_rank(s: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    if s.size == 0:
        return 0
    return int((s > tol * max(s.max(), 1e-300)).sum())
