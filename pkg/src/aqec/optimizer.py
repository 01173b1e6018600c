"""Alternating gradient ascent over code words, induced jumps and control.

Every iteration runs three kinds of update in turn. Each one takes a
forward-difference gradient of the projector fidelity, normalizes it, and
line-searches the step along it. The code words are rotated by a unitary
generated from Gell-Mann directions. The induced jump operators and the
control Hamiltonian are shifted additively.
"""
from __future__ import annotations

import csv
import functools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .codes import AqecCode, fidelity_from_propagator
from .lindblad import dissipator, hamiltonian_part, natural_part
from .matcore import expm, gell_mann, gram_schmidt, orthonormal_pair
from .models import QuditModel

__all__ = [
    "OptimizerConfig",
    "IterationRecord",
    "ConvergenceLog",
    "UpdateResult",
    "SeedResult",
    "init_random",
    "randomize_parts",
    "line_search",
    "basis_gradient",
    "matrix_gradient",
    "update_basis",
    "update_matrix",
    "optimize",
    "multi_seed",
    "leakage",
]

PLATEAU = 1e-15
EPS = float(np.finfo(float).eps)
ZERO_GRADIENT = 1e-14
TERMINATION_REASONS = ("max_iterations", "stagnation", "zero_gradient")


@dataclass(frozen=True)
class OptimizerConfig:
    tau: float = 1.0
    max_iterations: int = 100_000
    stagnation_window: int = 1000
    stagnation_threshold: float = 1e-8
    basis_probe: float = 1e-8
    basis_initial_step: float = 1e-2
    basis_step_cap: float = 2 * math.pi
    matrix_probe: float = 1e-6
    matrix_initial_step: float = 1e-6
    matrix_step_cap: float = 1e4
    zoom_tolerance: float = 1e-8
    freeze_basis: bool = False
    freeze_b: bool = False
    freeze_o: bool = False
    seed: int = 0
    num_induced_jumps: int = 1
    noise_floor: float = 1.0

    def __post_init__(self):
        positive = ("tau", "stagnation_threshold", "basis_probe", "basis_initial_step",
                    "basis_step_cap", "matrix_probe", "matrix_initial_step",
                    "matrix_step_cap", "zoom_tolerance")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iterations < 1 or self.stagnation_window < 1:
            raise ValueError("max_iterations and stagnation_window must be >= 1")
        if self.num_induced_jumps < 0:
            raise ValueError("num_induced_jumps must be >= 0")
        if not self.noise_floor >= 0:
            raise ValueError("noise_floor must be non-negative")


class UpdateResult(NamedTuple):
    code: AqecCode
    fidelity: float
    step: float
    gradient_norm: float


@dataclass
class IterationRecord:
    iteration: int
    fidelity: float
    basis_step: float
    b_steps: tuple
    o_step: float
    leakage: float
    max_abs_b: float
    wall_ms: float

    @property
    def infidelity(self) -> float:
        return 1.0 - self.fidelity


@dataclass
class ConvergenceLog:
    initial_fidelity: float
    records: list = field(default_factory=list)
    termination_reason: str | None = None
    seed: int | None = None

    @property
    def fidelities(self) -> list:
        return [r.fidelity for r in self.records]

    @property
    def fidelity_history(self) -> list:
        """``(iteration, fidelity)`` pairs, starting with iteration 0."""
        return [(0, self.initial_fidelity)] + [(r.iteration, r.fidelity) for r in self.records]

    @property
    def final_fidelity(self) -> float:
        return self.records[-1].fidelity if self.records else self.initial_fidelity

    def columns(self) -> list:
        nb = len(self.records[0].b_steps) if self.records else 0
        return (["iteration", "fidelity", "infidelity", "basis_step"]
                + [f"b_step_{l}" for l in range(nb)]
                + ["o_step", "leakage_code_space", "max_abs_b", "wall_ms"])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.columns())
            for r in self.records:
                nums = [r.fidelity, r.infidelity, r.basis_step, *r.b_steps, r.o_step,
                        r.leakage, r.max_abs_b]
                w.writerow([r.iteration, *(repr(float(x)) for x in nums), f"{r.wall_ms:.3f}"])

    @classmethod
    def read_csv(cls, path, initial_fidelity: float = float("nan")) -> "ConvergenceLog":
        log = cls(initial_fidelity)
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                nb = sum(1 for k in row if k.startswith("b_step_"))
                log.records.append(IterationRecord(
                    iteration=int(row["iteration"]),
                    fidelity=float(row["fidelity"]),
                    basis_step=float(row["basis_step"]),
                    b_steps=tuple(float(row[f"b_step_{l}"]) for l in range(nb)),
                    o_step=float(row["o_step"]),
                    leakage=float(row["leakage_code_space"]),
                    max_abs_b=float(row["max_abs_b"]),
                    wall_ms=float(row["wall_ms"]),
                ))
        return log


class SeedResult(NamedTuple):
    seed: int
    code: AqecCode
    fidelity: float
    log: ConvergenceLog


# --- initialization -------------------------------------------------------

def _uniform_complex(rng, shape):
    return rng.uniform(-0.5, 0.5, shape) + 1j * rng.uniform(-0.5, 0.5, shape)


def _random_hermitian(rng, n):
    o = np.zeros((n, n), dtype=np.complex128)
    o[np.diag_indices(n)] = rng.uniform(-0.5, 0.5, n)
    iu = np.triu_indices(n, 1)
    o[iu] = _uniform_complex(rng, len(iu[0]))
    o[(iu[1], iu[0])] = o[iu].conj()
    return o


def init_random(model: QuditModel, cfg: OptimizerConfig) -> AqecCode:
    """Random starting code drawn from ``cfg.seed``.

    Words: random orthonormal pair. Induced jumps: real and imaginary parts
    uniform in [-0.5, 0.5]. Control: same distribution on the diagonal (real
    part only) and upper triangle, mirrored to stay Hermitian.
    """
    rng = np.random.default_rng(cfg.seed)
    n = model.dim
    w0, w1 = orthonormal_pair(n, rng)
    jumps = tuple(_uniform_complex(rng, (n, n)) for _ in range(cfg.num_induced_jumps))
    return AqecCode(n, w0, w1, jumps, _random_hermitian(rng, n))


def randomize_parts(code: AqecCode, cfg: OptimizerConfig, parts: Sequence[str]) -> AqecCode:
    """Replace the named parts (``"basis"``, ``"b"``, ``"o"``) of ``code`` with
    random draws; induced jumps keep their count from ``code``."""
    unknown = set(parts) - {"basis", "b", "o"}
    if unknown:
        raise ValueError(f"unknown code parts {sorted(unknown)}")
    n = code.dim
    fresh = init_random(QuditModel(n, ()), replace(cfg, num_induced_jumps=len(code.induced_jumps)))
    if "basis" in parts:
        code = code.with_words(fresh.word0, fresh.word1)
    if "b" in parts:
        code = replace(code, induced_jumps=fresh.induced_jumps)
    if "o" in parts:
        code = code.with_control(fresh.control)
    return code


# --- line search -----------------------------------------------------------

def line_search(evaluate: Callable[[float], float], initial_step: float, step_cap: float,
                zoom_tol: float, f0: float | None = None) -> tuple[float, float]:
    """Maximize ``evaluate`` along ``s >= 0`` starting from ``s = 0``.

    Marches outward, doubling the step after every improvement, until the
    value stops increasing or ``step_cap`` is hit; ties within 1e-15 of the
    incumbent end the march. The bracketed peak is then zoomed until the
    bracket is at most ``zoom_tol`` wide. Returns ``(step, value)``; the
    value is never below ``evaluate(0)``.
    """
    if f0 is None:
        f0 = evaluate(0.0)
    if step_cap <= 0:
        return 0.0, f0
    a = m = 0.0
    fa = fm = f0
    s = min(initial_step, step_cap)
    while True:
        fs = evaluate(s)
        if fs > fm + PLATEAU:
            a, fa, m, fm = m, fm, s, fs
            if s >= step_cap:
                return m, fm
            s = min(2.0 * s, step_cap)
        else:
            c, fc = s, fs
            break
    return _zoom(evaluate, a, fa, m, fm, c, fc, zoom_tol)


def _vertex(a, fa, m, fm, c, fc):
    p = (m - a) * (fm - fc)
    q = (m - c) * (fm - fa)
    den = p - q
    if den == 0.0 or m == a or m == c:
        return None
    return m - 0.5 * ((m - a) * p - (m - c) * q) / den


def _zoom(evaluate, a, fa, m, fm, c, fc, tol):
    """Shrink the bracket ``a <= m < c`` (``fm`` highest) to width ``tol``.

    Parabolic steps through the three points, with bisection of the wider
    side whenever the bracket failed to halve over the last two steps or the
    parabola leaves the bracket. Trial points closer than ``tol/4`` to the
    incumbent are pushed out to ``tol/4`` so the bracket keeps shrinking.
    """
    eps = 0.25 * tol
    widths = []
    while c - a > tol:
        x = None
        if len(widths) < 2 or c - a <= 0.5 * widths[-2]:
            x = _vertex(a, fa, m, fm, c, fc)
            if x is not None and not (a < x < c):
                x = None
            elif x is not None and abs(x - m) < eps:
                x = m + eps if c - m > m - a else m - eps
        if x is None:
            x = 0.5 * (a + m) if m - a > c - m else 0.5 * (m + c)
        widths.append(c - a)
        fx = evaluate(x)
        if x < m:
            if fx > fm:
                c, fc, m, fm = m, fm, x, fx
            else:
                a, fa = x, fx
        else:
            if fx > fm:
                a, fa, m, fm = m, fm, x, fx
            else:
                c, fc = x, fx
    return m, fm


# --- gradients and updates -------------------------------------------------

@functools.lru_cache(maxsize=None)
def _probe_unitaries(n: int, probe: float) -> np.ndarray:
    return np.array([expm(1j * probe * g) for g in gell_mann(n)])


@functools.lru_cache(maxsize=None)
def _directions(n: int, hermitian: bool) -> np.ndarray:
    """Real-coefficient basis of matrix perturbations.

    General matrices: ``E_ij`` and ``i E_ij`` (2 n^2 directions). Hermitian
    matrices: ``E_kk``, ``E_ij + E_ji`` and ``i E_ij - i E_ji`` (n^2 directions).
    """
    out = []
    if hermitian:
        for k in range(n):
            d = np.zeros((n, n), dtype=np.complex128)
            d[k, k] = 1.0
            out.append(d)
        for i in range(n):
            for j in range(i + 1, n):
                d = np.zeros((n, n), dtype=np.complex128)
                d[i, j] = d[j, i] = 1.0
                out.append(d)
                d = np.zeros((n, n), dtype=np.complex128)
                d[i, j] = 1j
                d[j, i] = -1j
                out.append(d)
    else:
        for i in range(n):
            for j in range(n):
                for unit in (1.0, 1j):
                    d = np.zeros((n, n), dtype=np.complex128)
                    d[i, j] = unit
                    out.append(d)
    a = np.array(out)
    a.setflags(write=False)
    return a


class _Problem:
    """Cached natural generator of a model plus fidelity evaluation helpers."""

    def __init__(self, model: QuditModel, cfg: OptimizerConfig):
        self.model = model
        self.n = model.dim
        self.tau = cfg.tau
        self.noise_floor = cfg.noise_floor
        self.l_nat = natural_part(model)

    def margin(self, gen) -> float:
        """Smallest fidelity gain treated as real for generator ``gen``.

        The propagator is computed with absolute rounding error of order
        ``eps * tau * |L|``; gains below that are not resolvable and
        accepting them would walk the code along rounding noise.
        """
        return self.noise_floor * EPS * self.tau * float(np.abs(gen).sum(axis=0).max())

    def generator(self, code: AqecCode, skip_jump: int | None = None, skip_control=False):
        if code.dim != self.n:
            raise ValueError(f"model has dim {self.n} but code has dim {code.dim}")
        out = self.l_nat
        if not skip_control:
            out = out + hamiltonian_part(code.control, check=False)
        for l, b in enumerate(code.induced_jumps):
            if l != skip_jump:
                out = out + dissipator(b)
        return out

    def fid(self, gen, w0, w1) -> float:
        return fidelity_from_propagator(expm(gen, self.tau), w0, w1)

    def fidelity(self, code: AqecCode) -> float:
        return self.fid(self.generator(code), code.word0, code.word1)


def _basis_gradient(prob: _Problem, prop, w0, w1, f0, probe):
    us = _probe_unitaries(prob.n, probe)
    g = np.empty(len(us))
    for m, u in enumerate(us):
        g[m] = (fidelity_from_propagator(prop, u @ w0, u @ w1) - f0) / probe
    return g


def basis_gradient(model: QuditModel, code: AqecCode, cfg: OptimizerConfig = OptimizerConfig()):
    """Forward-difference fidelity gradient over Gell-Mann rotations of both words."""
    prob = _Problem(model, cfg)
    prop = expm(prob.generator(code), cfg.tau)
    f0 = fidelity_from_propagator(prop, code.word0, code.word1)
    return _basis_gradient(prob, prop, code.word0, code.word1, f0, cfg.basis_probe)


def _basis_step(prob: _Problem, code: AqecCode, cfg: OptimizerConfig, f_in: float) -> UpdateResult:
    full = prob.generator(code)
    prop = expm(full, prob.tau)
    w0, w1 = code.word0, code.word1
    f0 = fidelity_from_propagator(prop, w0, w1)
    grad = _basis_gradient(prob, prop, w0, w1, f0, cfg.basis_probe)
    norm = float(np.linalg.norm(grad))
    if norm < ZERO_GRADIENT:
        return UpdateResult(code, f_in, 0.0, norm)
    gen = np.tensordot(grad / norm, gell_mann(prob.n), axes=1)
    evals, vecs = np.linalg.eigh(gen)
    vw0, vw1 = vecs.conj().T @ w0, vecs.conj().T @ w1

    def rotated(s):
        ph = np.exp(1j * s * evals)
        return vecs @ (ph * vw0), vecs @ (ph * vw1)

    def evaluate(s):
        return fidelity_from_propagator(prop, *rotated(s))

    s, _ = line_search(evaluate, cfg.basis_initial_step, cfg.basis_step_cap,
                       cfg.zoom_tolerance, f0=f0)
    if s == 0.0:
        return UpdateResult(code, f_in, 0.0, norm)
    n0, n1 = gram_schmidt(*rotated(s))
    f_new = fidelity_from_propagator(prop, n0, n1)
    if not f_new > f_in + prob.margin(full):
        return UpdateResult(code, f_in, 0.0, norm)
    return UpdateResult(code.with_words(n0, n1), f_new, s, norm)


def update_basis(model: QuditModel, code: AqecCode, cfg: OptimizerConfig = OptimizerConfig()) -> UpdateResult:
    """One line-searched rotation of the code words along the basis gradient."""
    prob = _Problem(model, cfg)
    return _basis_step(prob, code, cfg, prob.fidelity(code))


def _matrix_objective(prob: _Problem, code: AqecCode, which):
    w0, w1 = code.word0, code.word1
    if which == "control":
        rest = prob.generator(code, skip_control=True)
        current = code.control

        def part(m):
            return hamiltonian_part(m, check=False)
    else:
        rest = prob.generator(code, skip_jump=which)
        current = code.induced_jumps[which]
        part = dissipator

    def f(m):
        return prob.fid(rest + part(m), w0, w1)
    return f, current, prob.margin(rest + part(current))


def _matrix_gradient(f, current, dirs, probe, f0):
    return np.array([(f(current + probe * d) - f0) / probe for d in dirs])


def matrix_gradient(model: QuditModel, code: AqecCode, which, cfg: OptimizerConfig = OptimizerConfig()):
    """Forward-difference gradient over the real and imaginary parts of one
    induced jump (``which`` = its index) or of the control (``"control"``)."""
    prob = _Problem(model, cfg)
    f, current, _ = _matrix_objective(prob, code, which)
    dirs = _directions(prob.n, which == "control")
    return _matrix_gradient(f, current, dirs, cfg.matrix_probe, f(current))


def _matrix_step(prob: _Problem, code: AqecCode, cfg: OptimizerConfig, which, f_in: float) -> UpdateResult:
    f, current, margin = _matrix_objective(prob, code, which)
    dirs = _directions(prob.n, which == "control")
    f0 = f(current)
    grad = _matrix_gradient(f, current, dirs, cfg.matrix_probe, f0)
    norm = float(np.linalg.norm(grad))
    if norm < ZERO_GRADIENT:
        return UpdateResult(code, f_in, 0.0, norm)
    unit = grad / norm
    direction = np.tensordot(unit, dirs, axes=1)
    # the cap bounds the change of every real and imaginary part
    cap = cfg.matrix_step_cap / np.max(np.abs(unit))

    def evaluate(s):
        return f(current + s * direction)

    s, f_new = line_search(evaluate, cfg.matrix_initial_step, cap, cfg.zoom_tolerance, f0=f0)
    if s == 0.0 or not f_new > f_in + margin:
        return UpdateResult(code, f_in, 0.0, norm)
    new = current + s * direction
    if which == "control":
        return UpdateResult(code.with_control(new), f_new, s, norm)
    return UpdateResult(code.with_jump(which, new), f_new, s, norm)


def update_matrix(model: QuditModel, code: AqecCode, cfg: OptimizerConfig = OptimizerConfig(),
                  which="control") -> UpdateResult:
    """One line-searched update of an induced jump (index) or the control."""
    prob = _Problem(model, cfg)
    return _matrix_step(prob, code, cfg, which, prob.fidelity(code))


# --- driver ----------------------------------------------------------------

def leakage(code: AqecCode, target: np.ndarray | None) -> float:
    """Mean probability of the code words outside ``target`` (orthonormal columns)."""
    if target is None:
        return float("nan")
    q = np.asarray(target).reshape(code.dim, -1)
    kept = np.linalg.norm(q.conj().T @ code.word0) ** 2 + np.linalg.norm(q.conj().T @ code.word1) ** 2
    return float(1.0 - 0.5 * kept)


def optimize(model: QuditModel, cfg: OptimizerConfig = OptimizerConfig(),
             initial: AqecCode | None = None, target: np.ndarray | None = None,
             callback: Callable[[IterationRecord, AqecCode], None] | None = None,
             ) -> tuple[AqecCode, ConvergenceLog]:
    """Run the alternating ascent until the iteration cap, stagnation, or a
    vanishing gradient on every free component.

    ``target`` is an optional ``n x k`` matrix of orthonormal columns used only
    for the leakage diagnostic in the log.
    """
    code = init_random(model, cfg) if initial is None else initial
    if code.dim != model.dim:
        raise ValueError(f"model has dim {model.dim} but code has dim {code.dim}")
    prob = _Problem(model, cfg)
    f = prob.fidelity(code)
    log = ConvergenceLog(initial_fidelity=f, seed=cfg.seed)
    history = [f]
    for k in range(1, cfg.max_iterations + 1):
        t0 = time.perf_counter()
        norms = []
        basis_step, o_step = 0.0, 0.0
        b_steps = [0.0] * len(code.induced_jumps)
        if not cfg.freeze_basis:
            code, f, basis_step, g = _basis_step(prob, code, cfg, f)
            norms.append(g)
        if not cfg.freeze_b:
            for l in range(len(code.induced_jumps)):
                code, f, b_steps[l], g = _matrix_step(prob, code, cfg, l, f)
                norms.append(g)
        if not cfg.freeze_o:
            code, f, o_step, g = _matrix_step(prob, code, cfg, "control", f)
            norms.append(g)
        history.append(f)
        max_b = max((float(np.max(np.abs(b))) for b in code.induced_jumps), default=0.0)
        rec = IterationRecord(k, f, basis_step, tuple(b_steps), o_step, leakage(code, target),
                              max_b, 1e3 * (time.perf_counter() - t0))
        log.records.append(rec)
        if callback is not None:
            callback(rec, code)
        if all(g < ZERO_GRADIENT for g in norms):
            log.termination_reason = "zero_gradient"
            break
        w = cfg.stagnation_window
        if k >= w and history[k] - history[k - w] < cfg.stagnation_threshold:
            log.termination_reason = "stagnation"
            break
    else:
        log.termination_reason = "max_iterations"
    return code, log


def _run_seed(model, cfg, base, parts, target):
    start = None if base is None else randomize_parts(base, cfg, parts)
    code, log = optimize(model, cfg, start, target)
    return SeedResult(cfg.seed, code, log.final_fidelity, log)


def multi_seed(model: QuditModel, cfg: OptimizerConfig, num_seeds: int,
               base: AqecCode | None = None, parts: Sequence[str] = ("basis", "b", "o"),
               target: np.ndarray | None = None, workers: int = 1) -> list[SeedResult]:
    """Independent runs with seeds ``cfg.seed + i``, best fidelity first.

    Without ``base`` every run starts from ``init_random``; with it, each run
    starts from ``base`` with ``parts`` redrawn from that run's seed.
    """
    if num_seeds < 1:
        raise ValueError("num_seeds must be >= 1")
    cfgs = [replace(cfg, seed=cfg.seed + i) for i in range(num_seeds)]
    args = ([model] * num_seeds, cfgs, [base] * num_seeds, [tuple(parts)] * num_seeds,
            [target] * num_seeds)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_seed, *args))
    else:
        results = [_run_seed(*a) for a in zip(*args)]
    return sorted(results, key=lambda r: (-r.fidelity, r.seed))
