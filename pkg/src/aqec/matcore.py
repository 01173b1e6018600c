"""Dense complex linear-algebra helpers.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; nothing here
keeps state between calls.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = [
    "as_cmatrix",
    "dag",
    "kron",
    "expm",
    "gell_mann",
    "orthonormal_pair",
    "gram_schmidt",
    "is_hermitian",
]


def as_cmatrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a finite 2-D complex128 array (copy)."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def dag(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two 2-D arrays (broadcast form; ``np.kron``
    spends most of its time on generic-axis bookkeeping at these sizes)."""
    (p, q), (r, s) = a.shape, b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(p * r, q * s)


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    return m.shape[0] == m.shape[1] and bool(np.max(np.abs(m - dag(m)), initial=0.0) <= tol)


def expm(m: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Matrix exponential ``exp(scale * m)``.

    Scaling and squaring around a degree-13 Pade core (scipy's
    implementation); the matrices here are at most 36x36.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expm needs a square matrix, got shape {m.shape}")
    return scipy.linalg.expm(m * scale)


def gell_mann(n: int) -> np.ndarray:
    """Generalized Gell-Mann matrices for an ``n``-level system.

    Returns an array of shape ``(n*n - 1, n, n)`` ordered as: symmetric
    ``E_jk + E_kj`` (j<k), antisymmetric ``-i E_jk + i E_kj`` (j<k), then
    the ``n - 1`` diagonal ones. Normalization is ``Tr(G_a G_b) = 2 delta_ab``.
    """
    if n < 2:
        raise ValueError("gell_mann needs n >= 2")
    sym, anti, diag = [], [], []
    for j in range(n):
        for k in range(j + 1, n):
            g = np.zeros((n, n), dtype=np.complex128)
            g[j, k] = g[k, j] = 1.0
            sym.append(g)
            g = np.zeros((n, n), dtype=np.complex128)
            g[j, k] = -1j
            g[k, j] = 1j
            anti.append(g)
    for l in range(1, n):
        d = np.zeros(n)
        d[:l] = 1.0
        d[l] = -l
        diag.append(np.diag(np.sqrt(2.0 / (l * (l + 1))) * d).astype(np.complex128))
    return np.array(sym + anti + diag)


def orthonormal_pair(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Two random orthonormal vectors in C^n.

    Entries start as complex standard normals; Gram-Schmidt with one
    re-orthogonalization pass keeps the overlap at machine precision.
    """
    if n < 2:
        raise ValueError("orthonormal_pair needs n >= 2")
    z = rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))
    return gram_schmidt(z[0], z[1])


def gram_schmidt(v0: np.ndarray, v1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    v0 = v0 / np.linalg.norm(v0)
    for _ in range(2):
        v1 = v1 - np.vdot(v0, v1) * v0
    return v0, v1 / np.linalg.norm(v1)
