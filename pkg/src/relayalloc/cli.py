"""Command-line front end: solve instance files, run named experiments.

Exit codes: 0 success, 1 parse/validation error, 2 infeasible problem.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import fields

import numpy as np

from .channel import ScenarioConfig
from .errors import ConfigError, Infeasible, RelayAllocError
from .experiments import (
    run_assumption_table,
    run_bound_tightness,
    run_cell_comparison,
    run_oracle_check,
    write_csv,
    write_manifest,
)
from .model import ChannelInstance, SolverOptions
from .selection import bound_pair
from .solver import MinRateTargets

_EXPERIMENTS = ("assumption-table", "bound-tightness", "cell-comparison",
                "oracle-check")

_SCENARIO_FIELDS = {f.name for f in fields(ScenarioConfig)}

_EXPERIMENT_KEYS = {
    "assumption-table": _SCENARIO_FIELDS | {"num_samples"},
    "bound-tightness": {"j_values", "k_values", "snr_db", "trials",
                        "objective", "seed"},
    "cell-comparison": _SCENARIO_FIELDS | {"radii_km", "objective",
                                           "location_sets", "fades_per_set",
                                           "report_bits_per_second"},
    "oracle-check": {"j_values", "k_values", "snr_db", "trials", "objective",
                     "seed"},
}


# ---------------------------------------------------------------------------
# Instance and config files
# ---------------------------------------------------------------------------

def load_instance(path: str) -> ChannelInstance:
    """Instance JSON: {"c": [...], "p": [[...], ...], "sr": [...]} linear SNRs."""
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict) or "c" not in data or "p" not in data:
        raise ConfigError(f"{path}: instance JSON needs keys 'c' and 'p'")
    try:
        return ChannelInstance(c=np.asarray(data["c"], float),
                               p=np.asarray(data["p"], float),
                               sr=None if data.get("sr") is None
                               else np.asarray(data["sr"], float))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def dump_instance(instance: ChannelInstance) -> dict:
    out = {"c": instance.c.tolist(), "p": instance.p.tolist()}
    if instance.sr is not None:
        out["sr"] = instance.sr.tolist()
    return out


def _parse_value(text: str):
    text = text.strip()
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    if text.lower() in ("none", "null"):
        return None
    if "," in text:
        return [_parse_value(tok) for tok in text.split(",") if tok.strip()]
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def parse_config_file(path: str) -> dict:
    """Flat ``key = value`` file with '#' comments; duplicate keys rejected."""
    out = {}
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = (_parse_value(value), lineno)
    return out


def _split_config(raw: dict, experiment: str, path: str):
    allowed = _EXPERIMENT_KEYS[experiment]
    scenario = {}
    extras = {}
    for key, (value, lineno) in raw.items():
        if key not in allowed:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r} "
                              f"for experiment {experiment}")
        if key in _SCENARIO_FIELDS:
            scenario[key] = value
        else:
            extras[key] = value
    try:
        config = ScenarioConfig(**scenario)
    except (TypeError, RelayAllocError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config, extras


def _as_list(value, cast=float):
    if isinstance(value, list):
        return [cast(v) for v in value]
    return [cast(value)]


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def _cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    options = SolverOptions(tol=args.tol)
    targets = None
    if args.objective == "sum_min":
        if args.min_rates is not None:
            r = np.asarray([float(x) for x in args.min_rates.split(",")])
        elif args.min_rate is not None:
            r = np.full(instance.num_users, float(args.min_rate))
        else:
            raise ConfigError("sum_min needs --min-rate or --min-rates")
        targets = MinRateTargets(r)
    refine = {"auto": None, "on": True, "off": False}[args.refine]
    bp = bound_pair(instance, args.objective, options, targets=targets,
                    codebook=args.codebook, refine=refine)
    payload = {
        "objective": args.objective,
        "codebook": args.codebook,
        "alpha": bp.lower_alpha.alpha.tolist(),
        "assignment": bp.assignment.relay_of.tolist(),
        "per_user_rates": bp.lower_rates.per_user.tolist(),
        "sum_rate": bp.lower_rates.sum_rate,
        "min_rate": bp.lower_rates.min_rate,
        "upper_bound": bp.upper,
        "lower_bound": bp.lower,
        "gap": bp.gap,
        "kkt_residual": bp.relaxed.kkt_residual,
        "certified": bp.relaxed.certified,
        "multi_relay_users": bp.relaxed.multi_relay_users,
    }
    text = json.dumps(payload, indent=2) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    return 0


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------

def _cmd_experiment(args) -> int:
    name = args.name
    raw = parse_config_file(args.config) if args.config else {}
    config, extras = _split_config(raw, name, args.config or "<defaults>")
    seed = args.seed if args.seed is not None else extras.get("seed", config.seed)
    threads = args.threads
    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    started = time.time()
    audit = None
    if name == "assumption-table":
        num_samples = int(extras.get("num_samples", 300_000))
        if args.full:
            num_samples = 3_000_000
        rows, columns = run_assumption_table(config, num_samples, seed)
        echo = {"scenario": config.to_dict(), "num_samples": num_samples}
    elif name == "bound-tightness":
        j_values = _as_list(extras.get("j_values", 4), int)
        k_values = _as_list(extras.get("k_values", [8, 16, 24, 32]), int)
        snr_db = float(extras.get("snr_db", 30.0))
        trials = int(extras.get("trials", 200))
        objective = extras.get("objective", "sum")
        rows, columns = run_bound_tightness(
            j_values, k_values, snr_db, trials, objective, seed,
            include_oracle=args.oracle, threads=threads)
        echo = {"j_values": j_values, "k_values": k_values, "snr_db": snr_db,
                "trials": trials, "objective": objective,
                "oracle": bool(args.oracle)}
    elif name == "oracle-check":
        j_values = _as_list(extras.get("j_values", 2), int)
        k_values = _as_list(extras.get("k_values", [1, 2, 3, 4, 5, 6, 7, 8]), int)
        snr_db = float(extras.get("snr_db", 30.0))
        trials = int(extras.get("trials", 100))
        objective = extras.get("objective", "sum")
        rows, columns = run_oracle_check(j_values, k_values, snr_db, trials,
                                         objective, seed, threads)
        echo = {"j_values": j_values, "k_values": k_values, "snr_db": snr_db,
                "trials": trials, "objective": objective}
    elif name == "cell-comparison":
        radii = _as_list(extras.get("radii_km", [1.0, 2.0, 3.0]), float)
        objective = extras.get("objective", "sum")
        location_sets = int(extras.get("location_sets", 50))
        fades = int(extras.get("fades_per_set", 500))
        bits_s = bool(extras.get("report_bits_per_second", False))
        rows, columns, audit = run_cell_comparison(
            config, radii, objective, location_sets, fades, seed, threads,
            report_bits_per_second=bits_s)
        echo = {"scenario": config.to_dict(), "radii_km": radii,
                "objective": objective, "location_sets": location_sets,
                "fades_per_set": fades, "report_bits_per_second": bits_s}
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown experiment {name!r}")
    csv_path = os.path.join(out_dir, f"{name}.csv")
    write_csv(csv_path, rows, columns)
    write_manifest(os.path.join(out_dir, f"{name}_manifest.json"), name, echo,
                   seed, threads, wall_time_s=time.time() - started,
                   extra={"audit": audit} if audit else None)
    sys.stderr.write(f"wrote {csv_path}\n")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relayalloc",
        description="Relay selection and power allocation: solvers and "
                    "Monte Carlo experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a JSON channel instance")
    p_solve.add_argument("instance")
    p_solve.add_argument("--objective", default="sum",
                         choices=("sum", "sum_min", "max_min"))
    p_solve.add_argument("--codebook", default="repetition",
                         choices=("repetition", "independent"))
    p_solve.add_argument("--min-rate", type=float, default=None,
                         help="uniform per-user rate floor (sum_min)")
    p_solve.add_argument("--min-rates", default=None,
                         help="comma-separated per-user rate floors (sum_min)")
    p_solve.add_argument("--refine", default="auto",
                         choices=("auto", "on", "off"),
                         help="re-optimize per relay after rounding")
    p_solve.add_argument("--tol", type=float, default=1e-8)
    p_solve.add_argument("--out", default="-", help="output path or - for stdout")
    p_solve.set_defaults(func=_cmd_solve)

    p_exp = sub.add_parser("experiment", help="run a named experiment")
    p_exp.add_argument("name", choices=_EXPERIMENTS)
    p_exp.add_argument("--config", default=None,
                       help="flat key = value config file")
    p_exp.add_argument("--seed", type=int, default=None)
    p_exp.add_argument("--out-dir", default=".")
    p_exp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p_exp.add_argument("--oracle", action="store_true",
                       help="add the exhaustive-oracle column (bound-tightness)")
    p_exp.add_argument("--full", action="store_true",
                       help="full-scale sample count (assumption-table)")
    p_exp.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Infeasible as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return 2
    except RelayAllocError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
