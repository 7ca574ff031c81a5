"""Rounding a relaxed solution to a selection-feasible one (the lower bound).

Each user keeps only the relay granting it the most received power; the
surviving column entries already respect every relay budget, so the rounded
allocation is feasible for the original combinatorial problem and its value
lower-bounds the optimum.  Optional per-relay re-optimization never lowers
the rounded objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, InfeasibleLowerBounds, InvalidInstance
from .model import (
    Assignment,
    ChannelInstance,
    PowerAllocation,
    RateReport,
    SolverOptions,
    rates_independent,
    rates_repetition,
)
from .solver import (
    MinRateTargets,
    RelaxedSolution,
    _waterfill,
    solve_max_min,
    solve_sum_rate,
    solve_sum_rate_min,
)


def round_to_selection(instance: ChannelInstance, relaxed: RelaxedSolution,
                       options: SolverOptions | None = None):
    """Assign each user to argmax_j alpha_jk * p_jk and zero the rest.

    Ties break toward the lowest relay index.  Users receiving no relay
    power anywhere are assigned by raw channel strength argmax_j p_jk so
    every user has a defined relay.  Returns (Assignment, PowerAllocation).
    """
    alpha = relaxed.alpha.alpha if isinstance(relaxed, RelaxedSolution) else np.asarray(relaxed)
    p = instance.p
    benefit = alpha * p
    choice = np.argmax(benefit, axis=0)
    unpowered = benefit.max(axis=0) <= 0.0
    if unpowered.any():
        choice = choice.copy()
        choice[unpowered] = np.argmax(p[:, unpowered], axis=0)
    rounded = np.zeros_like(alpha)
    cols = np.arange(instance.num_users)
    rounded[choice, cols] = alpha[choice, cols]
    return Assignment(choice, instance.num_relays), PowerAllocation(rounded)


def _single_relay_maxmin(c_users, p_users):
    """Exact single-relay max-min fill: equalize c_k + p_k a_k at level v.

    Returns (allocation, v).  Users with zero gain cap v at their direct
    SNR; leftover budget stays unspent once the cap binds.
    """
    c_users = np.asarray(c_users, float)
    p_users = np.asarray(p_users, float)
    pos = p_users > 0
    cap = float(c_users[~pos].min()) if (~pos).any() else np.inf
    alloc = np.zeros_like(p_users)
    if not pos.any():
        return alloc, min(cap, float(c_users.min()))
    cs = c_users[pos]
    inv = 1.0 / p_users[pos]
    order = np.argsort(cs, kind="stable")
    cs, inv = cs[order], inv[order]
    # budget spent to raise every active user to level v, at knots v = cs[i]
    cum_inv = np.concatenate([[0.0], np.cumsum(inv)])
    cum_ci = np.concatenate([[0.0], np.cumsum(cs * inv)])
    knot_cost = cs * cum_inv[:-1] - cum_ci[:-1]
    i = int(np.searchsorted(knot_cost, 1.0, side="left"))
    i = max(i, 1)
    v = (1.0 + cum_ci[i]) / cum_inv[i]
    v = min(v, cap)
    idx = np.nonzero(pos)[0]
    lifted = np.maximum(0.0, v - c_users[idx])
    alloc[idx] = lifted / p_users[idx]
    return alloc, float(v)


def refine_selection(instance: ChannelInstance, assignment: Assignment,
                     objective: str = "sum", options: SolverOptions | None = None,
                     targets: MinRateTargets | None = None,
                     codebook: str = "repetition"):
    """Re-optimize each relay's power over its assigned users.

    objective is one of "sum", "sum_min" (requires targets) or "max_min".
    Never decreases the rounded objective; raises Infeasible for "sum_min"
    when a relay's assigned floors exceed its budget.  Returns
    (PowerAllocation, RateReport).
    """
    J, K = instance.num_relays, instance.num_users
    p, c = instance.p, instance.c
    alpha = np.zeros((J, K))
    base_c = c if codebook == "repetition" else np.zeros(K)
    for j in range(J):
        users = np.nonzero(assignment.relay_of == j)[0]
        if users.size == 0:
            continue
        if objective in ("sum", "sum_min"):
            floors = None
            if objective == "sum_min":
                need = np.maximum(0.0, np.exp2(2.0 * targets.r[users]) - 1.0 - c[users])
                floors = np.zeros(users.size)
                ok = p[j, users] > 0
                if np.any(need[~ok] > 0):
                    raise Infeasible(
                        f"relay {j} cannot serve a floored user with zero gain")
                floors[ok] = need[ok] / p[j, users][ok]
            try:
                row, _ = _waterfill(1.0 + base_c[users], p[j, users], 1.0, floors)
            except InfeasibleLowerBounds as exc:
                raise Infeasible(f"relay {j}: {exc}") from exc
        elif objective == "max_min":
            row, _ = _single_relay_maxmin(c[users], p[j, users])
        else:
            raise InvalidInstance(f"unknown objective {objective!r}")
        alpha[j, users] = row
    per_user = (rates_repetition(instance, alpha) if codebook == "repetition"
                else rates_independent(instance, alpha))
    return PowerAllocation(alpha), RateReport.from_rates(per_user)


@dataclass(frozen=True)
class BoundPair:
    """Upper/lower bounds with the artifacts that produced them."""

    upper: float
    lower: float
    gap: float
    relaxed: RelaxedSolution
    assignment: Assignment
    lower_alpha: PowerAllocation
    lower_rates: RateReport


def bound_pair(instance: ChannelInstance, objective: str = "sum",
               options: SolverOptions | None = None,
               targets: MinRateTargets | None = None,
               codebook: str = "repetition",
               refine: bool | None = None) -> BoundPair:
    """Relax, round, optionally refine; report both bounds and relative gap.

    Refinement (per-relay re-optimization of the rounded allocation)
    defaults on for every objective: it never lowers the rounded value, and
    for "sum_min"/"max_min" it also restores feasibility and fairness.  Pass
    refine=False for the plain one-shot heuristic that simply keeps the
    surviving entries.  Propagates Infeasible.
    """
    options = options or SolverOptions()
    if objective == "sum":
        relaxed = solve_sum_rate(instance, options, codebook)
        refine = True if refine is None else refine
    elif objective == "sum_min":
        if targets is None:
            raise InvalidInstance("sum_min requires targets")
        if codebook != "repetition":
            raise InvalidInstance("sum_min is defined for repetition coding")
        relaxed = solve_sum_rate_min(instance, targets, options)
        refine = True if refine is None else refine
    elif objective == "max_min":
        relaxed = solve_max_min(instance, options, codebook)
        refine = True if refine is None else refine
    else:
        raise InvalidInstance(f"unknown objective {objective!r}")
    assignment, rounded = round_to_selection(instance, relaxed, options)
    if refine:
        lower_alpha, lower_rates = refine_selection(
            instance, assignment,
            "sum" if objective == "sum" else objective,
            options, targets=targets, codebook=codebook)
    else:
        lower_alpha = rounded
        per_user = (rates_repetition(instance, rounded.alpha)
                    if codebook == "repetition"
                    else rates_independent(instance, rounded.alpha))
        lower_rates = RateReport.from_rates(per_user)
    lower = lower_rates.sum_rate if objective in ("sum", "sum_min") else lower_rates.min_rate
    upper = relaxed.objective
    gap = (upper - lower) / max(upper, 1e-12)
    return BoundPair(float(upper), float(lower), float(gap),
                     relaxed, assignment, lower_alpha, lower_rates)
