"""Lindblad superoperators on column-stacked density matrices.

Convention: ``vec`` stacks columns, so ``vec(A X B) = (B^T kron A) vec(X)``.
Units are hbar = 1 and gamma = 1; times are in units of 1/gamma.
"""
from __future__ import annotations

from typing import TYPE_CHECKING

import functools

import numpy as np

from .matcore import dag, expm, is_hermitian, kron

if TYPE_CHECKING:
    from .codes import AqecCode
    from .models import QuditModel

__all__ = [
    "vec",
    "unvec",
    "dissipator",
    "hamiltonian_part",
    "build_lindbladian",
    "propagate",
    "apply",
]


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack ``rho``: ``out[j*n + i] = rho[i, j]``."""
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if n is None:
        n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    return v.reshape((n, n), order="F")


@functools.lru_cache(maxsize=None)
def _identity(n: int) -> np.ndarray:
    out = np.eye(n, dtype=np.complex128)
    out.setflags(write=False)
    return out


def dissipator(a: np.ndarray) -> np.ndarray:
    """Superoperator of ``a rho a^dag - 1/2 {a^dag a, rho}``."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"jump operator must be square, got shape {a.shape}")
    ident = _identity(a.shape[0])
    ada = dag(a) @ a
    return kron(a.conj(), a) - 0.5 * kron(ident, ada) - 0.5 * kron(ada.T, ident)


def hamiltonian_part(h: np.ndarray, check: bool = True) -> np.ndarray:
    """Superoperator of ``-i [h, rho]``."""
    h = np.asarray(h, dtype=np.complex128)
    if check and not is_hermitian(h):
        raise ValueError("Hamiltonian is not Hermitian")
    ident = _identity(h.shape[0])
    return -1j * (kron(ident, h) - kron(h.T, ident))


def natural_part(model: QuditModel) -> np.ndarray:
    """Free-evolution superoperator of ``model`` (Hamiltonian + natural jumps)."""
    out = hamiltonian_part(model.free_hamiltonian, check=False)
    for a in model.natural_jumps:
        out = out + dissipator(a)
    return out


def build_lindbladian(model: QuditModel, code: AqecCode) -> np.ndarray:
    """Full generator: free Hamiltonian plus control, natural and induced jumps."""
    if model.dim != code.dim:
        raise ValueError(f"model has dim {model.dim} but code has dim {code.dim}")
    if not is_hermitian(code.control):
        raise ValueError("control matrix is not Hermitian")
    out = hamiltonian_part(model.free_hamiltonian + code.control, check=False)
    for a in model.natural_jumps:
        out = out + dissipator(a)
    for b in code.induced_jumps:
        out = out + dissipator(b)
    return out


def propagate(lindbladian: np.ndarray, tau: float) -> np.ndarray:
    """Propagator ``exp(L tau)`` for ``tau >= 0``."""
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    return expm(lindbladian, tau)


def apply(superop: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Act with a superoperator on a density matrix and reshape back."""
    rho = np.asarray(rho)
    return unvec(superop @ vec(rho), rho.shape[0])
