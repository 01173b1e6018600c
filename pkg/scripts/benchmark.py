"""Optimizer throughput in iterations per second."""
import argparse
import time

from aqec.models import uniform_decay
from aqec.optimizer import OptimizerConfig, optimize


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--seed", type=int, default=1)
    a = p.parse_args()
    model = uniform_decay(a.n)
    optimize(model, OptimizerConfig(max_iterations=2))
    t = time.perf_counter()
    _, log = optimize(model, OptimizerConfig(max_iterations=a.iterations, seed=a.seed))
    dt = time.perf_counter() - t
    print(f"n = {a.n}: {len(log.records)} iterations in {dt:.2f} s, "
          f"{len(log.records) / dt:.1f} it/s, F = {log.final_fidelity:.6f}")


if __name__ == "__main__":
    main()
