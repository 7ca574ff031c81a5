"""Monte Carlo harness: decode-assumption table, bound tightness, cell comparison.

Every experiment draws from counter-style substreams keyed by (seed, trial
indices), so outputs are byte-identical across reruns and worker counts.
Results are returned as (rows, columns) and written as CSV plus a JSON run
manifest.
"""

from __future__ import annotations

import json
import math
import subprocess
import time
from dataclasses import replace

import numpy as np

from .baselines import miso_rates, relay_system_rates, siso_rates
from .channel import (
    Placement,
    ScenarioConfig,
    SmallScaleFades,
    draw_large_scale,
    draw_synthetic_rayleigh,
    draw_user_positions,
    instance_from_draws,
    miso_small_scale,
    path_loss_dB,
    place_relays,
    rayleigh_fade_power,
    rician_fade_power,
)
from .errors import TooLarge
from .model import SolverOptions
from .oracle import exhaustive_optimum
from .selection import bound_pair
from ._util import parallel_map, substream

_SYSTEMS = ("siso", "miso", "relay")


# ---------------------------------------------------------------------------
# Decode-assumption table
# ---------------------------------------------------------------------------

def run_assumption_table(config: ScenarioConfig, num_samples: int = 300_000,
                         seed: int | None = None, num_bins: int = 10,
                         chunk: int = 50_000):
    """Fraction of user locations where every relay out-hears the compound link.

    One user per sample, uniform over the cell disk, fresh channels per
    location; the check uses full power on both hops (a_jk = 1).  Returns
    rows (annulus_low_m, annulus_high_m, num_samples, percent_valid) for
    equal-width annuli.
    """
    seed = config.seed if seed is None else seed
    relays = place_relays(config)
    d_bs_relay = np.linalg.norm(relays, axis=1)
    num_relays = config.num_relays
    radius = config.cell_radius_km
    pl_sr = path_loss_dB(d_bs_relay, "bs_relay", config)
    k_lin = 10.0 ** (config.rician_K_dB / 10.0)
    power = config.tx_power_mW
    noise = config.noise_mW
    sigma = config.shadowing_sigma_dB
    edges = np.linspace(0.0, radius, num_bins + 1)
    total = np.zeros(num_bins, dtype=np.int64)
    valid = np.zeros(num_bins, dtype=np.int64)
    rng = substream(seed, "assumption")
    remaining = int(num_samples)
    while remaining > 0:
        n = min(chunk, remaining)
        remaining -= n
        pos = draw_user_positions(rng, n, 0.0, radius)
        d_user = np.linalg.norm(pos, axis=1)
        d_ru = np.linalg.norm(relays[:, None, :] - pos[None, :, :], axis=2)

        def gain(pl, size):
            s = rng.normal(0.0, sigma, size) if sigma > 0 else 0.0
            return 10.0 ** ((-pl + s) / 10.0)

        c = power / noise * gain(path_loss_dB(d_user, "bs_user", config), n) \
            * rayleigh_fade_power(rng, n)
        sr = power / noise * gain(pl_sr[:, None], (num_relays, n)) \
            * rician_fade_power(rng, k_lin, (num_relays, n))
        p = power / num_relays / noise \
            * gain(path_loss_dB(d_ru, "relay_user", config), (num_relays, n)) \
            * rayleigh_fade_power(rng, (num_relays, n))
        ok = np.all(sr > c[None, :] + p, axis=0)
        bins = np.minimum(np.digitize(d_user, edges) - 1, num_bins - 1)
        total += np.bincount(bins, minlength=num_bins)
        valid += np.bincount(bins[ok], minlength=num_bins)
    rows = []
    for i in range(num_bins):
        pct = 100.0 * valid[i] / total[i] if total[i] else float("nan")
        rows.append({
            "annulus_low_m": int(round(edges[i] * 1000)),
            "annulus_high_m": int(round(edges[i + 1] * 1000)),
            "num_samples": int(total[i]),
            "percent_valid": pct,
        })
    columns = ["annulus_low_m", "annulus_high_m", "num_samples", "percent_valid"]
    return rows, columns


# ---------------------------------------------------------------------------
# Bound tightness on synthetic Rayleigh channels
# ---------------------------------------------------------------------------

def _tightness_block(args):
    (num_relays, num_users, snr_linear, objective, seed, t0, t1,
     include_oracle, oracle_limit) = args
    out = []
    options = SolverOptions()
    for t in range(t0, t1):
        rng = substream(seed, "tightness", num_relays, num_users, t)
        inst = draw_synthetic_rayleigh(num_relays, num_users, snr_linear, rng)
        bp = bound_pair(inst, objective, options)
        row = [bp.upper, bp.lower, bp.gap]
        if include_oracle:
            _, _, report = exhaustive_optimum(inst, objective, options,
                                              limit=oracle_limit)
            row.append(report.sum_rate if objective == "sum" else report.min_rate)
        out.append(row)
    return out


def run_bound_tightness(j_values, k_values, snr_dB: float, trials: int,
                        objective: str = "sum", seed: int = 0,
                        include_oracle: bool = False, threads: int = 1,
                        oracle_limit: int = 10**6, block: int = 25):
    """Mean upper/lower bounds and relative gap per (J, K) cell.

    Instances are i.i.d. unit-mean Rayleigh at the given total SNR.  With
    ``include_oracle`` the exhaustive optimum is added per trial (raises
    TooLarge when some J^K exceeds the enumeration limit).
    """
    snr_linear = 10.0 ** (snr_dB / 10.0)
    tasks = []
    for J in j_values:
        for K in k_values:
            if include_oracle and J ** K > oracle_limit:
                raise TooLarge(f"oracle cannot enumerate {J}^{K} assignments")
            for t0 in range(0, trials, block):
                tasks.append((J, K, snr_linear, objective, seed, t0,
                              min(t0 + block, trials), include_oracle,
                              oracle_limit))
    results = parallel_map(_tightness_block, tasks, threads)
    per_cell = {}
    for task, rows in zip(tasks, results):
        per_cell.setdefault((task[0], task[1]), []).extend(rows)
    out_rows = []
    for J in j_values:
        for K in k_values:
            data = np.asarray(per_cell[(J, K)])
            row = {
                "J": J, "K": K, "trials": trials,
                "mean_upper": float(data[:, 0].mean()),
                "mean_lower": float(data[:, 1].mean()),
                "mean_gap": float(data[:, 2].mean()),
            }
            if include_oracle:
                row["mean_oracle"] = float(data[:, 3].mean())
            out_rows.append(row)
    columns = ["J", "K", "trials", "mean_upper", "mean_lower", "mean_gap"]
    if include_oracle:
        columns.append("mean_oracle")
    return out_rows, columns


def run_oracle_check(j_values, k_values, snr_dB: float, trials: int,
                     objective: str = "sum", seed: int = 0, threads: int = 1):
    """Sandwich check lower <= oracle <= upper on oracle-sized instances."""
    snr_linear = 10.0 ** (snr_dB / 10.0)
    options = SolverOptions()
    rows = []
    for J in j_values:
        for K in k_values:
            tasks = [(J, K, snr_linear, objective, seed, t, t + 1, True, 10**6)
                     for t in range(trials)]
            results = parallel_map(_tightness_block, tasks, threads)
            data = np.asarray([r[0] for r in results])
            upper, lower, oracle = data[:, 0], data[:, 1], data[:, 3]
            tol = 1e-6
            rows.append({
                "J": J, "K": K, "trials": trials,
                "mean_upper": float(upper.mean()),
                "mean_oracle": float(oracle.mean()),
                "mean_lower": float(lower.mean()),
                "sandwich_violations": int(np.sum(
                    (lower > oracle * (1 + tol) + tol)
                    | (oracle > upper * (1 + tol) + tol))),
            })
    columns = ["J", "K", "trials", "mean_upper", "mean_oracle", "mean_lower",
               "sandwich_violations"]
    return rows, columns


# ---------------------------------------------------------------------------
# Cellular comparison (SISO vs MISO vs relay)
# ---------------------------------------------------------------------------

def users_for_radius(config: ScenarioConfig, radius_km: float) -> int:
    """Users in the outer annulus from the configured density (>= 1)."""
    area = math.pi * (radius_km ** 2 - (radius_km / 2.0) ** 2)
    return max(1, int(math.floor(config.user_density_per_km2 * area + 0.5)))


def _cell_set(args):
    config, radius, r_idx, set_idx, fades, seed, objective = args
    cfg = replace(config, cell_radius_km=radius)
    num_users = users_for_radius(cfg, radius)
    num_relays = cfg.num_relays
    rng_set = substream(seed, "cell", r_idx, set_idx)
    placement = Placement(
        relay_xy=place_relays(cfg),
        user_xy=draw_user_positions(rng_set, num_users, radius / 2.0, radius))
    large = draw_large_scale(placement, cfg, rng_set)
    power = cfg.tx_power_mW
    noise = cfg.noise_mW
    k_lin = 10.0 ** (cfg.rician_K_dB / 10.0)
    direct_obj = "sum" if objective == "sum" else "equal_rate"
    pooled = {name: [] for name in _SYSTEMS}
    for f in range(fades):
        rng_f = substream(seed, "cell", r_idx, set_idx, f)
        h_miso = miso_small_scale(rng_f, num_users, num_relays + 1)
        fade_user = np.abs(h_miso[:, 0]) ** 2
        fade_sr = rician_fade_power(rng_f, k_lin, num_relays)
        fade_ru = rayleigh_fade_power(rng_f, (num_relays, num_users))
        g_direct = large.bs_user * fade_user / noise
        pooled["siso"].append(siso_rates(g_direct, power, direct_obj).per_user)
        vectors = np.sqrt(large.bs_user / noise)[:, None] * h_miso
        pooled["miso"].append(miso_rates(vectors, power, direct_obj).per_user)
        inst = instance_from_draws(
            large, SmallScaleFades(fade_user, fade_sr, fade_ru), cfg)
        pooled["relay"].append(relay_system_rates(inst, objective).per_user)
    return {name: np.concatenate(arrs) for name, arrs in pooled.items()}


def run_cell_comparison(config: ScenarioConfig, radii_km, objective: str = "sum",
                        location_sets: int = 50, fades_per_set: int = 500,
                        seed: int | None = None, threads: int = 1,
                        report_bits_per_second: bool = False):
    """Figs. 4/5-style sweep: per radius and system, mean rate or outage rates.

    All three systems consume the same large-scale draw per location set and
    the same direct-link fades, so comparisons are paired.  The sum
    objective reports the per-user mean rate; max_min reports the 10th and
    1st percentiles of the pooled per-user rate distribution.
    """
    seed = config.seed if seed is None else seed
    radii = list(radii_km)
    tasks = [(config, radius, r_idx, s, fades_per_set, seed, objective)
             for r_idx, radius in enumerate(radii)
             for s in range(location_sets)]
    results = parallel_map(_cell_set, tasks, threads)
    unit = config.channel_bandwidth_kHz * 1e3 if report_bits_per_second else 1.0
    rows = []
    for r_idx, radius in enumerate(radii):
        chunks = results[r_idx * location_sets:(r_idx + 1) * location_sets]
        for name in _SYSTEMS:
            rates = np.concatenate([c[name] for c in chunks]) * unit
            row = {"radius_km": radius, "system": name}
            if objective == "sum":
                row["mean_rate"] = float(rates.mean())
            else:
                row["outage10_rate"] = float(np.percentile(rates, 10.0))
                row["outage1_rate"] = float(np.percentile(rates, 1.0))
            rows.append(row)
    if objective == "sum":
        columns = ["radius_km", "system", "mean_rate"]
    else:
        columns = ["radius_km", "system", "outage10_rate", "outage1_rate"]
    audit = {
        "location_sets": location_sets,
        "fades_per_set": fades_per_set,
        "large_scale_draws": len(radii) * location_sets,
        "small_scale_draws": len(radii) * location_sets * fades_per_set,
        "paired_large_scale": True,
    }
    return rows, columns, audit


# ---------------------------------------------------------------------------
# Output files
# ---------------------------------------------------------------------------

def _format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, rows, columns):
    """One header row; shortest round-trip decimals; byte-deterministic."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(_format_value(row[c]) for c in columns) + "\n")


def git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=10)
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def write_manifest(path, experiment: str, config_echo: dict, seed: int,
                   threads: int, wall_time_s: float, extra: dict | None = None):
    payload = {
        "experiment": experiment,
        "config": config_echo,
        "seed": seed,
        "threads": threads,
        "git_describe": git_describe(),
        "wall_time_s": wall_time_s,
    }
    if extra:
        payload.update(extra)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
