"""Fidelity and kappa against the power-law exponent for a fixed reference code,
optionally followed by an optimization seeded at that code."""
import argparse
from dataclasses import dataclass

import numpy as np

from aqec.codes import binomial_code, fidelity, kappa, thirteen_code
from aqec.models import power_law
from aqec.optimizer import OptimizerConfig, optimize

CODES = {"binomial": (5, binomial_code), "thirteen": (4, thirteen_code)}


@dataclass
class SweepConfig:
    code: str = "binomial"
    alphas: tuple = (0.0, 0.1, 0.2, 0.3, 0.4, 0.45, 0.49, 0.5)
    gamma_ratio: float = 1e6
    optimize_iterations: int = 0


def run(cfg: SweepConfig):
    n, ctor = CODES[cfg.code]
    code = ctor(cfg.gamma_ratio)
    print(f"{'alpha':>6s} {'F':>12s} {'kappa':>10s}" + (f" {'F opt':>12s}" if cfg.optimize_iterations else ""))
    for alpha in cfg.alphas:
        model = power_law(n, alpha)
        line = f"{alpha:6.3f} {fidelity(model, code):12.8f} {kappa(model, code):10.3e}"
        if cfg.optimize_iterations:
            _, log = optimize(model, OptimizerConfig(max_iterations=cfg.optimize_iterations), code)
            line += f" {log.final_fidelity:12.8f}"
        print(line, flush=True)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--code", choices=sorted(CODES), default="binomial")
    p.add_argument("--alphas", type=float, nargs="+")
    p.add_argument("--points", type=int, help="evenly spaced alphas on [0, 0.5] instead of --alphas")
    p.add_argument("--gamma-ratio", type=float, default=1e6)
    p.add_argument("--optimize", type=int, default=0, metavar="ITER",
                   help="also optimize from the code for this many iterations")
    a = p.parse_args()
    cfg = SweepConfig(a.code, gamma_ratio=a.gamma_ratio, optimize_iterations=a.optimize)
    if a.points:
        cfg.alphas = tuple(np.linspace(0, 0.5, a.points))
    elif a.alphas:
        cfg.alphas = tuple(a.alphas)
    run(cfg)


if __name__ == "__main__":
    main()
