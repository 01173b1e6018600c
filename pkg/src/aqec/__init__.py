"""Search and optimization of autonomous quantum error correction codes for
few-level open quantum systems."""
from .codes import (AqecCode, KappaConfig, binomial_code, fidelity, kappa, ladder_code,
                    projector, thirteen_code, trivial_code)
from .models import QuditModel, photon_loss, power_law, uniform_decay
from .optimizer import ConvergenceLog, OptimizerConfig, init_random, multi_seed, optimize

__all__ = [
    "AqecCode", "KappaConfig", "binomial_code", "fidelity", "kappa", "ladder_code",
    "projector", "thirteen_code", "trivial_code", "QuditModel", "photon_loss", "power_law",
    "uniform_decay", "ConvergenceLog", "OptimizerConfig", "init_random", "multi_seed",
    "optimize",
]

__version__ = "0.1.0"
