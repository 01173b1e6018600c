"""Command-line front end.

    aqec evaluate --model uniform --n 4 --code thirteen --gamma-ratio 1e6
    aqec optimize --model power_law --alpha 0.45 --n 5 --code binomial --out runs/a045
    aqec sweep --n 4 --code thirteen --values 0 0.25 0.5 --out runs/sweep
    aqec seeds --model uniform --n 4 --seeds 3 --max-iter 100 --out runs/seeds

Settings come from an optional JSON document (``--config``); flags given on
the command line override it. Exit status: 0 clean, 1 usage or input error,
2 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import __version__
from .codes import (AqecCode, KappaConfig, binomial_code, fidelity, kappa, ladder_code,
                    thirteen_code)
from .models import QuditModel, model_from_name
from .optimizer import OptimizerConfig, init_random, multi_seed, optimize, randomize_parts

SHORT_TIER_MAX_ITER = 10_000
LONG_TIER_MAX_ITER = 100_000
REFERENCE_CODES = ("thirteen", "binomial", "ladder")
PARTS = ("basis", "b", "o")

DEFAULTS = {
    "model": None,
    "n": None,
    "alpha": None,
    "code": "random",
    "gamma_ratio": 1e6,
    "tau": 1.0,
    "max_iter": None,
    "seed": 0,
    "freeze": [],
    "randomize": [],
    "jumps": 1,
    "target": None,
    "out": "aqec_out",
    "beta1": 0.3,
    "beta2": 0.1,
    "seeds": 1,
    "workers": 1,
    "values": None,
    "optimize": False,
    "long_running": False,
    "optimizer": {},
}


class UsageError(Exception):
    pass


class NumericalError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- artifacts --------------------------------------------------------------

def _pair(a) -> dict:
    a = np.asarray(a)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def _unpair(d) -> np.ndarray:
    return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)


def code_to_dict(code: AqecCode, metadata: dict | None = None) -> dict:
    return {
        "dim": code.dim,
        "word0": _pair(code.word0),
        "word1": _pair(code.word1),
        "induced_jumps": [_pair(b) for b in code.induced_jumps],
        "control": _pair(code.control),
        "metadata": dict(metadata or {}),
    }


def code_from_dict(d: dict) -> AqecCode:
    return AqecCode(
        int(d["dim"]),
        _unpair(d["word0"]),
        _unpair(d["word1"]),
        tuple(_unpair(b) for b in d.get("induced_jumps", [])),
        _unpair(d["control"]) if "control" in d else None,
    )


def save_code(path, code: AqecCode, metadata: dict | None = None) -> None:
    Path(path).write_text(json.dumps(code_to_dict(code, metadata), indent=1))


def load_code(path) -> tuple[AqecCode, dict]:
    try:
        d = json.loads(Path(path).read_text())
        return code_from_dict(d), d.get("metadata", {})
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise UsageError(f"cannot read code artifact {path}: {e}") from e


# --- config -----------------------------------------------------------------

def _load_config(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read config {path}: {e}") from e
    if not isinstance(raw, dict):
        raise UsageError("config must be a JSON object")
    out = {}
    for key, value in raw.items():
        k = key.replace("-", "_")
        if k not in DEFAULTS:
            raise UsageError(f"unknown config key {key!r}")
        out[k] = value
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Defaults, then the config file, then explicit flags."""
    opts = dict(DEFAULTS)
    if args.config is not None:
        opts.update(_load_config(args.config))
    for k, v in vars(args).items():
        if k in DEFAULTS and v is not None:
            opts[k] = v
    for k in ("freeze", "randomize"):
        bad = set(opts[k]) - set(PARTS)
        if bad:
            raise UsageError(f"--{k} takes parts from {PARTS}, got {sorted(bad)}")
    return opts


def build_model(opts: dict, code: AqecCode | None = None, alpha=None) -> QuditModel:
    name = opts["model"]
    if name is None:
        raise UsageError("--model is required")
    n = opts["n"] if opts["n"] is not None else (code.dim if code is not None else None)
    if n is None:
        raise UsageError("--n is required")
    try:
        return model_from_name(name, int(n), opts["alpha"] if alpha is None else alpha)
    except ValueError as e:
        raise UsageError(str(e)) from e


def build_code(opts: dict, model: QuditModel | None = None) -> tuple[AqecCode | None, dict]:
    """Code from ``opts["code"]``; ``None`` means a random start. Also returns
    a description of where the code came from."""
    src = opts["code"]
    g = float(opts["gamma_ratio"])
    try:
        if src == "random":
            return None, {"source": "random"}
        if src == "thirteen":
            code = thirteen_code(g)
        elif src == "binomial":
            code = binomial_code(g)
        elif src == "ladder":
            n = opts["n"] if opts["n"] is not None else (model.dim if model else None)
            if n is None:
                raise UsageError("ladder code needs --n")
            code = ladder_code(int(n), g)
        else:
            code, meta = load_code(src)
            return code, {"source": "file", "path": str(src), "file_metadata": meta}
    except ValueError as e:
        raise UsageError(str(e)) from e
    return code, {"source": src, "gamma_ratio": g}


def _implied_dim(opts) -> int | None:
    return {"thirteen": 4, "binomial": 5}.get(opts["code"])


def _model_and_code(opts, alpha=None):
    if opts["n"] is None and _implied_dim(opts):
        opts = dict(opts, n=_implied_dim(opts))
    code, source = build_code(opts)
    model = build_model(opts, code, alpha)
    if code is not None and code.dim != model.dim:
        raise UsageError(f"model has dim {model.dim} but code has dim {code.dim}")
    return model, code, source


def optimizer_config(opts: dict, num_jumps: int) -> OptimizerConfig:
    max_iter = opts["max_iter"]
    if max_iter is None:
        max_iter = LONG_TIER_MAX_ITER if opts["long_running"] else SHORT_TIER_MAX_ITER
    if max_iter > SHORT_TIER_MAX_ITER and not opts["long_running"]:
        raise UsageError(f"--max-iter above {SHORT_TIER_MAX_ITER} needs --long-running")
    freeze = set(opts["freeze"])
    extra = dict(opts["optimizer"] or {})
    names = {f.name for f in fields(OptimizerConfig)}
    bad = set(extra) - names
    if bad:
        raise UsageError(f"unknown optimizer settings {sorted(bad)}")
    try:
        return OptimizerConfig(**{
            **extra,
            "tau": float(opts["tau"]),
            "max_iterations": int(max_iter),
            "seed": int(opts["seed"]),
            "freeze_basis": "basis" in freeze,
            "freeze_b": "b" in freeze,
            "freeze_o": "o" in freeze,
            "num_induced_jumps": num_jumps,
        })
    except (TypeError, ValueError) as e:
        raise UsageError(str(e)) from e


def _target(opts, code: AqecCode | None, n: int):
    if opts["target"] is not None:
        levels = [int(x) for x in str(opts["target"]).split(",") if x.strip()]
        if not levels or any(not 0 <= k < n for k in levels):
            raise UsageError(f"--target levels must lie in 0..{n - 1}")
        return np.eye(n)[:, levels]
    if code is not None:
        q, _ = np.linalg.qr(np.column_stack(code.words))
        return q
    return None


def _finite(f: float) -> float:
    if not math.isfinite(f):
        raise NumericalError(f"non-finite fidelity {f}")
    return f


def _kappa_or_none(model, code, opts):
    try:
        k = kappa(model, code, KappaConfig(float(opts["beta1"]), float(opts["beta2"])))
    except ValueError:
        return None
    return k if math.isfinite(k) else None


def _model_echo(model: QuditModel) -> dict:
    return {"name": model.name, "params": dict(model.params), "gamma": model.gamma}


def _metadata(model, opts, source, fid, seed=None) -> dict:
    return {
        "model": _model_echo(model),
        "code": source,
        "gamma_ratio": float(opts["gamma_ratio"]) if source.get("source") in REFERENCE_CODES else None,
        "tau": float(opts["tau"]),
        "fidelity": fid,
        "seed": seed,
        "version": __version__,
    }


def _starting_code(model, code, cfg, opts):
    if code is None:
        return init_random(model, cfg)
    if opts["randomize"]:
        return randomize_parts(code, cfg, opts["randomize"])
    return code


def _outdir(opts) -> Path:
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- commands ---------------------------------------------------------------

def cmd_evaluate(opts: dict) -> dict:
    model, code, source = _model_and_code(opts)
    if code is None:
        cfg = optimizer_config(opts, int(opts["jumps"]))
        code = init_random(model, cfg)
        source = dict(source, seed=cfg.seed)
    tau = float(opts["tau"])
    if tau < 0:
        raise UsageError("--tau must be non-negative")
    f = _finite(fidelity(model, code, tau))
    report = {
        "fidelity": f,
        "infidelity": 1.0 - f,
        "kappa": _kappa_or_none(model, code, opts),
        "tau": tau,
        "beta1": float(opts["beta1"]),
        "beta2": float(opts["beta2"]),
        "model": _model_echo(model),
        "code": source,
        "dim": code.dim,
    }
    print(f"F = {f:.10f}  1-F = {1 - f:.3e}  kappa = {report['kappa']}")
    out = _outdir(opts)
    (out / "report.json").write_text(json.dumps(report, indent=1))
    return report


def cmd_optimize(opts: dict):
    model, code, source = _model_and_code(opts)
    jumps = len(code.induced_jumps) if code is not None else int(opts["jumps"])
    cfg = optimizer_config(opts, jumps)
    start = _starting_code(model, code, cfg, opts)
    target = _target(opts, code, model.dim)
    final, log = optimize(model, cfg, start, target)
    f = _finite(log.final_fidelity)
    out = _outdir(opts)
    meta = _metadata(model, opts, source, f, cfg.seed)
    meta.update(termination=log.termination_reason, iterations=len(log.records),
                initial_fidelity=log.initial_fidelity)
    save_code(out / "code.json", final, meta)
    log.to_csv(out / "log.csv")
    print(f"F = {f:.10f} after {len(log.records)} iterations ({log.termination_reason})")
    return final, log


SWEEP_COLUMNS = ["alpha", "fidelity", "infidelity", "kappa", "source", "error"]


def cmd_sweep(opts: dict) -> list[dict]:
    values = opts["values"]
    if not values:
        raise UsageError("sweep needs --values")
    opts = dict(opts, model="power_law")
    if opts["n"] is None and _implied_dim(opts):
        opts["n"] = _implied_dim(opts)
    out = _outdir(opts)
    rows = []
    for alpha in map(float, values):
        row = {"alpha": alpha}
        try:
            model, code, source = _model_and_code(opts, alpha)
            if not opts["optimize"]:
                if code is None:
                    raise UsageError("evaluation sweep needs a fixed code")
                best, label = code, "reference"
            else:
                jumps = len(code.induced_jumps) if code is not None else int(opts["jumps"])
                cfg = optimizer_config(opts, jumps)
                start = None if code is None else _starting_code(model, code, cfg, opts)
                results = multi_seed(model, cfg, int(opts["seeds"]), base=start,
                                     parts=tuple(opts["randomize"]), workers=int(opts["workers"]))
                if code is not None and not opts["randomize"]:
                    results = results[:1]
                best = results[0].code
                label = "random-best" if code is None else "optimized"
                save_code(out / f"code_alpha{alpha:g}.json", best,
                          _metadata(model, opts, source, results[0].fidelity, results[0].seed))
            f = _finite(fidelity(model, best, float(opts["tau"])))
            row.update(fidelity=f, infidelity=1.0 - f, kappa=_kappa_or_none(model, best, opts),
                       source=label, error="")
        except (UsageError, ValueError, NumericalError, np.linalg.LinAlgError) as e:
            row.update(fidelity=float("nan"), infidelity=float("nan"), kappa=None,
                       source="failed", error=str(e))
        rows.append(row)
        print(f"alpha = {alpha:g}  F = {row['fidelity']:.10f}  ({row['source']})")
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, SWEEP_COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if r[k] is None else (repr(r[k]) if isinstance(r[k], float) else r[k]))
                        for k in SWEEP_COLUMNS})
    return rows


def cmd_seeds(opts: dict):
    model, code, source = _model_and_code(opts)
    n_seeds = int(opts["seeds"])
    if n_seeds < 1:
        raise UsageError("--seeds must be >= 1")
    jumps = len(code.induced_jumps) if code is not None else int(opts["jumps"])
    cfg = optimizer_config(opts, jumps)
    parts = tuple(opts["randomize"]) if code is not None else PARTS
    if code is not None and not parts:
        raise UsageError("seeding from a fixed code needs --randomize parts")
    results = multi_seed(model, cfg, n_seeds, base=code, parts=parts,
                         target=_target(opts, code, model.dim), workers=int(opts["workers"]))
    out = _outdir(opts)
    with open(out / "ranking.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rank", "seed", "fidelity", "infidelity", "iterations", "termination", "artifact"])
        for rank, r in enumerate(results, 1):
            f = _finite(r.fidelity)
            name = f"code_seed{r.seed}.json"
            meta = _metadata(model, opts, source, f, r.seed)
            meta.update(termination=r.log.termination_reason, iterations=len(r.log.records))
            save_code(out / name, r.code, meta)
            r.log.to_csv(out / f"log_seed{r.seed}.csv")
            w.writerow([rank, r.seed, repr(f), repr(1 - f), len(r.log.records),
                        r.log.termination_reason, name])
            print(f"{rank:3d}  seed {r.seed:4d}  F = {f:.10f}")
    return results


COMMANDS = {"evaluate": cmd_evaluate, "optimize": cmd_optimize, "sweep": cmd_sweep,
            "seeds": cmd_seeds}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with default settings")
    common.add_argument("--model", help="uniform | photon_loss | power_law | power_law(ALPHA)")
    common.add_argument("--n", type=int, help="number of levels")
    common.add_argument("--alpha", type=float, help="power-law exponent")
    common.add_argument("--code", help="thirteen | binomial | ladder | random | path to code JSON")
    common.add_argument("--gamma-ratio", type=float, help="induced/natural rate for reference codes")
    common.add_argument("--tau", type=float, help="evolution time in units of 1/gamma (default 1)")
    common.add_argument("--max-iter", type=int, help="iteration cap")
    common.add_argument("--seed", type=int, help="base RNG seed")
    common.add_argument("--freeze", nargs="+", choices=PARTS, help="components kept fixed")
    common.add_argument("--randomize", nargs="+", choices=PARTS,
                        help="components of the starting code redrawn at random")
    common.add_argument("--jumps", type=int, help="induced jumps for random codes (default 1)")
    common.add_argument("--target", help="comma-separated levels for the leakage diagnostic")
    common.add_argument("--out", help="output directory")
    common.add_argument("--beta1", type=float, help="kappa sample time beta1 (default 0.3)")
    common.add_argument("--beta2", type=float, help="kappa sample time beta2 (default 0.1)")
    common.add_argument("--seeds", type=int, help="number of independent runs")
    common.add_argument("--workers", type=int, help="parallel processes for multi-seed runs")
    common.add_argument("--long-running", action="store_const", const=True,
                        help="allow more than 1e4 iterations")

    parser = _Parser(prog="aqec", description="Search for autonomous error-correcting codes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("evaluate", parents=[common], help="fidelity and kappa of a fixed code")
    sub.add_parser("optimize", parents=[common], help="run one optimization")
    sw = sub.add_parser("sweep", parents=[common], help="scan the power-law exponent")
    sw.add_argument("--values", type=float, nargs="+", help="alpha values")
    sw.add_argument("--optimize", action="store_const", const=True,
                    help="optimize at each alpha instead of evaluating")
    sub.add_parser("seeds", parents=[common], help="multi-seed campaign with ranking")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        opts = resolve(args)
        COMMANDS[args.command](opts)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError, OverflowError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
