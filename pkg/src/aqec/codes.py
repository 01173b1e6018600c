"""AQEC codes, the code-space projector and the projector fidelity.

A code is a pair of orthonormal code words plus the engineered parts of the
generator: induced jump operators and a Hermitian control Hamiltonian.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .lindblad import build_lindbladian, natural_part, propagate
from .matcore import as_cmatrix, expm, is_hermitian
from .models import QuditModel

__all__ = [
    "AqecCode",
    "KappaConfig",
    "projector",
    "projector_vectors",
    "fidelity",
    "fidelity_from_propagator",
    "kappa",
    "thirteen_code",
    "binomial_code",
    "ladder_code",
    "trivial_code",
    "basis_state",
]


def _readonly(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AqecCode:
    dim: int
    word0: np.ndarray
    word1: np.ndarray
    induced_jumps: tuple[np.ndarray, ...] = ()
    control: np.ndarray = None

    def __post_init__(self):
        n = self.dim
        w0 = np.array(self.word0, dtype=np.complex128).reshape(-1)
        w1 = np.array(self.word1, dtype=np.complex128).reshape(-1)
        if w0.size != n or w1.size != n:
            raise ValueError(f"code words must have length {n}")
        if not (np.all(np.isfinite(w0)) and np.all(np.isfinite(w1))):
            raise ValueError("code words have non-finite entries")
        if abs(np.linalg.norm(w0) - 1) > 1e-12 or abs(np.linalg.norm(w1) - 1) > 1e-12:
            raise ValueError("code words must be normalized")
        if abs(np.vdot(w0, w1)) > 1e-10:
            raise ValueError("code words must be orthogonal")
        jumps = []
        for b in self.induced_jumps:
            b = as_cmatrix(b, "induced jump")
            if b.shape != (n, n):
                raise ValueError(f"induced jump must be {n}x{n}, got {b.shape}")
            jumps.append(_readonly(b))
        o = np.zeros((n, n)) if self.control is None else self.control
        o = as_cmatrix(o, "control")
        if o.shape != (n, n):
            raise ValueError(f"control must be {n}x{n}")
        if not is_hermitian(o):
            raise ValueError("control matrix is not Hermitian")
        object.__setattr__(self, "word0", _readonly(w0))
        object.__setattr__(self, "word1", _readonly(w1))
        object.__setattr__(self, "induced_jumps", tuple(jumps))
        object.__setattr__(self, "control", _readonly(o))

    @property
    def words(self) -> tuple[np.ndarray, np.ndarray]:
        return self.word0, self.word1

    def with_words(self, w0, w1) -> "AqecCode":
        return replace(self, word0=w0, word1=w1)

    def with_jump(self, index: int, b) -> "AqecCode":
        jumps = list(self.induced_jumps)
        jumps[index] = b
        return replace(self, induced_jumps=tuple(jumps))

    def with_control(self, o) -> "AqecCode":
        return replace(self, control=o)


@dataclass(frozen=True)
class KappaConfig:
    beta1: float = 0.3
    beta2: float = 0.1

    def __post_init__(self):
        if not (self.beta1 > 0 and self.beta2 > 0) or self.beta1 == self.beta2:
            raise ValueError("kappa needs distinct positive beta1, beta2")


def basis_state(n: int, k: int) -> np.ndarray:
    v = np.zeros(n, dtype=np.complex128)
    v[k] = 1.0
    return v


def projector_vectors(w0: np.ndarray, w1: np.ndarray) -> np.ndarray:
    """Rows are ``vec(w_a w_b^dag)`` for (a, b) in 00, 01, 10, 11."""
    w = np.array([w0, w1])
    n = w.shape[1]
    # vec(|a><b|)[j*n + i] = a_i conj(b_j)
    return np.einsum("bj,ai->abji", w.conj(), w).reshape(4, n * n)


def projector(code: AqecCode) -> np.ndarray:
    """Code-space projector as an ``n^2 x n^2`` superoperator (rank 4)."""
    v = projector_vectors(code.word0, code.word1)
    return v.T @ v.conj()


def fidelity_from_propagator(prop: np.ndarray, w0: np.ndarray, w1: np.ndarray) -> float:
    """``|Tr(prop P)| / 4`` without forming ``P``."""
    v = projector_vectors(w0, w1)
    return float(abs(np.einsum("ai,ij,aj->", v.conj(), prop, v))) / 4.0


def fidelity(model: QuditModel, code: AqecCode, tau: float = 1.0) -> float:
    prop = propagate(build_lindbladian(model, code), tau)
    return fidelity_from_propagator(prop, code.word0, code.word1)


def _free_slope(model: QuditModel, h: float = 1e-6) -> float:
    # trivial code {|0>,|1>} under the natural generator, central difference in gamma*t
    gen = natural_part(model) / model.gamma
    w0, w1 = basis_state(model.dim, 0), basis_state(model.dim, 1)
    fp = fidelity_from_propagator(expm(gen, h), w0, w1)
    fm = fidelity_from_propagator(expm(gen, -h), w0, w1)
    return (fp - fm) / (2 * h)


def kappa(model: QuditModel, code: AqecCode, cfg: KappaConfig = KappaConfig()) -> float:
    """Ratio of the early-time fidelity slope under the code to the free slope.

    The free reference is the model's natural evolution of the do-nothing
    code ``{|0>, |1>}`` (slope ``-gamma/2`` for the ladder models here).
    """
    g = model.gamma
    num = (fidelity(model, code, cfg.beta1 / g) - fidelity(model, code, cfg.beta2 / g)) / (
        cfg.beta1 - cfg.beta2
    )
    den = _free_slope(model)
    if abs(den) < 1e-12:
        raise ValueError("free evolution does not decay; kappa is undefined")
    return num / den


def trivial_code(n: int) -> AqecCode:
    return AqecCode(n, basis_state(n, 0), basis_state(n, 1), (np.zeros((n, n)),))


def thirteen_code(gamma_ratio: float) -> AqecCode:
    """Four-level code on ``{|1>, |3>}`` with re-excitation ``|0>->|1>``, ``|2>->|3>``."""
    if gamma_ratio <= 0:
        raise ValueError("gamma_ratio must be positive")
    return ladder_code(4, gamma_ratio)


def binomial_code(gamma_ratio: float) -> AqecCode:
    """Five-level binomial code with its induced jump and sigma_y^(04) control."""
    if gamma_ratio <= 0:
        raise ValueError("gamma_ratio must be positive")
    n = 5
    s = np.sqrt(gamma_ratio)
    b = np.zeros((n, n), dtype=np.complex128)
    b[0, 3] = b[4, 3] = s / np.sqrt(2)
    b[2, 1] = s
    o = np.zeros((n, n), dtype=np.complex128)
    o[0, 4] = -1j
    o[4, 0] = 1j
    w0 = (basis_state(n, 0) + basis_state(n, 4)) / np.sqrt(2)
    return AqecCode(n, w0, basis_state(n, 2), (b,), o)


def ladder_code(n: int, gamma_ratio: float) -> AqecCode:
    """Even-``n`` code on ``{|n/2-1>, |n-1>}``, one induced jump per loss order.

    The p-th jump (p = 1 .. n/2-1) re-excites ``|n/2-p-1> -> |n/2-p>`` and
    ``|n-p-1> -> |n-p>`` with amplitude ``sqrt(gamma_ratio)``.
    """
    if n % 2 or n < 4:
        raise ValueError("ladder code needs even n >= 4")
    if gamma_ratio <= 0:
        raise ValueError("gamma_ratio must be positive")
    s = np.sqrt(gamma_ratio)
    half = n // 2
    jumps = []
    for p in range(1, half):
        b = np.zeros((n, n), dtype=np.complex128)
        b[half - p, half - p - 1] = s
        b[n - p, n - p - 1] = s
        jumps.append(b)
    return AqecCode(n, basis_state(n, half - 1), basis_state(n, n - 1), tuple(jumps))
