"""Independent cross-checks: closed-form fidelity curves, analytic rates and
a direct RK4 integrator of the master equation that never vectorizes."""
from __future__ import annotations

import math

import numpy as np

from .codes import AqecCode
from .models import QuditModel

__all__ = [
    "relaxation_fidelity",
    "dephasing_fidelity",
    "relaxed_state",
    "effective_dephasing_rate",
    "lindblad_rhs",
    "default_dt",
    "rk4_propagate",
]


def relaxation_fidelity(t: float) -> float:
    """Projector fidelity of a relaxing qubit at ``gamma*t = t``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return 0.25 * (1 + 2 * math.exp(-t / 2) + math.exp(-t))


def dephasing_fidelity(t: float) -> float:
    if t < 0:
        raise ValueError("t must be non-negative")
    return 0.5 * (1 + math.exp(-t))


def relaxed_state(rho0: np.ndarray, t: float) -> np.ndarray:
    """Closed-form qubit density matrix after relaxation for ``gamma*t = t``."""
    rho0 = np.asarray(rho0, dtype=np.complex128)
    if rho0.shape != (2, 2):
        raise ValueError("relaxed_state needs a 2x2 density matrix")
    e, h = math.exp(-t), math.exp(-t / 2)
    return np.array(
        [[rho0[0, 0] + (1 - e) * rho0[1, 1], h * rho0[0, 1]],
         [h * rho0[1, 0], e * rho0[1, 1]]]
    )


def effective_dephasing_rate(n_fock: int) -> float:
    """Residual coherence decay rate (units of gamma) of the Fock pair
    ``{|N>, |N+2>}`` under photon loss and fast re-excitation."""
    if n_fock < 1:
        raise ValueError("n_fock must be >= 1")
    m = n_fock + 1
    # m - sqrt(m^2 - 1) written to avoid cancellation at large N
    return 1.0 / (m + math.sqrt(m * m - 1))


def _operators(model: QuditModel, code: AqecCode | None):
    if code is not None and code.dim != model.dim:
        raise ValueError(f"model has dim {model.dim} but code has dim {code.dim}")
    h = model.free_hamiltonian + (code.control if code is not None else 0)
    jumps = list(model.natural_jumps) + (list(code.induced_jumps) if code is not None else [])
    return h, jumps


def lindblad_rhs(h: np.ndarray, jumps, rho: np.ndarray) -> np.ndarray:
    out = -1j * (h @ rho - rho @ h)
    for a in jumps:
        ad = a.conj().T
        ada = ad @ a
        out += a @ rho @ ad - 0.5 * (ada @ rho + rho @ ada)
    return out


def default_dt(model: QuditModel, code: AqecCode | None = None) -> float:
    """``min(1e-3/gamma, 0.1/Gamma_max)`` with Gamma_max the largest squared jump norm."""
    _, jumps = _operators(model, code)
    gmax = max((np.linalg.norm(a, 2) ** 2 for a in jumps), default=0.0)
    dt = 1e-3 / model.gamma
    return min(dt, 0.1 / gmax) if gmax > 0 else dt


def rk4_propagate(model: QuditModel, code: AqecCode | None, rho0: np.ndarray, t: float,
                  dt: float | None = None) -> np.ndarray:
    """Classic fixed-step RK4 on the matrix form of the master equation.

    The last step is shortened so the integration ends exactly at ``t``.
    """
    h, jumps = _operators(model, code)
    rho = np.array(rho0, dtype=np.complex128)
    if rho.shape != (model.dim, model.dim):
        raise ValueError(f"rho0 must be {model.dim}x{model.dim}")
    if dt is None:
        dt = default_dt(model, code)
    if dt <= 0 or t < 0:
        raise ValueError("need dt > 0 and t >= 0")
    if t == 0:
        return rho
    if dt > t:
        raise ValueError("dt must not exceed t")
    steps = int(math.ceil(t / dt - 1e-9))
    step = t / steps
    f = lambda r: lindblad_rhs(h, jumps, r)  # noqa: E731
    for _ in range(steps):
        k1 = f(rho)
        k2 = f(rho + 0.5 * step * k1)
        k3 = f(rho + 0.5 * step * k2)
        k4 = f(rho + step * k3)
        rho = rho + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho
