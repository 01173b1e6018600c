"""Qudit decay models: the fixed physics that a code has to protect against.

Levels are zero-indexed ``|0>, ..., |n-1>``. Decay rates are absorbed into
the jump operators as square-root prefactors, and gamma = 1 sets the unit.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .matcore import as_cmatrix, is_hermitian

__all__ = ["QuditModel", "uniform_decay", "photon_loss", "power_law", "model_from_name"]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuditModel:
    dim: int
    natural_jumps: tuple[np.ndarray, ...]
    free_hamiltonian: np.ndarray = None
    gamma: float = 1.0
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.dim
        h = np.zeros((n, n)) if self.free_hamiltonian is None else self.free_hamiltonian
        h = as_cmatrix(h, "free_hamiltonian")
        if h.shape != (n, n):
            raise ValueError(f"free_hamiltonian must be {n}x{n}")
        if not is_hermitian(h):
            raise ValueError("free_hamiltonian is not Hermitian")
        jumps = []
        for a in self.natural_jumps:
            a = as_cmatrix(a, "jump operator")
            if a.shape != (n, n):
                raise ValueError(f"jump operator must be {n}x{n}, got {a.shape}")
            jumps.append(_readonly(a))
        object.__setattr__(self, "free_hamiltonian", _readonly(h))
        object.__setattr__(self, "natural_jumps", tuple(jumps))


def _ladder(n: int, rates) -> np.ndarray:
    a = np.zeros((n, n), dtype=np.complex128)
    for k in range(1, n):
        a[k - 1, k] = rates[k - 1]
    return a


def power_law(n: int, alpha: float, gamma: float = 1.0) -> QuditModel:
    """Single ladder jump with amplitude ``sqrt(gamma) * k**alpha`` on ``|k> -> |k-1>``."""
    if n < 2:
        raise ValueError("need at least two levels")
    if not np.isfinite(alpha):
        raise ValueError("alpha must be finite")
    rates = [np.sqrt(gamma) * k ** alpha for k in range(1, n)]
    return QuditModel(n, (_ladder(n, rates),), gamma=gamma, name="power_law",
                      params={"n": n, "alpha": float(alpha)})


def uniform_decay(n: int, gamma: float = 1.0) -> QuditModel:
    if n < 2:
        raise ValueError("need at least two levels")
    a = _ladder(n, [np.sqrt(gamma)] * (n - 1))
    return QuditModel(n, (a,), gamma=gamma, name="uniform", params={"n": n})


def photon_loss(n: int, gamma: float = 1.0) -> QuditModel:
    """Truncated harmonic-oscillator annihilation operator times ``sqrt(gamma)``."""
    if n < 2:
        raise ValueError("need at least two levels")
    a = _ladder(n, [np.sqrt(gamma * k) for k in range(1, n)])
    return QuditModel(n, (a,), gamma=gamma, name="photon_loss", params={"n": n})


_POWER_RE = re.compile(r"^power_law\(\s*([-+0-9.eE]+)\s*\)$")


def model_from_name(name: str, n: int, alpha: float | None = None) -> QuditModel:
    """Build a model from ``"uniform"``, ``"photon_loss"``, ``"power_law"`` or
    ``"power_law(<alpha>)"``."""
    m = _POWER_RE.match(name.strip())
    if m:
        name, alpha = "power_law", float(m.group(1))
    if name == "uniform":
        return uniform_decay(n)
    if name == "photon_loss":
        return photon_loss(n)
    if name == "power_law":
        if alpha is None:
            raise ValueError("power_law model needs alpha")
        return power_law(n, alpha)
    raise ValueError(f"unknown model {name!r}")
