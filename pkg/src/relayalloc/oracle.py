"""Exhaustive ground truth over all J^K relay assignments (small instances)."""

from __future__ import annotations

import itertools

import numpy as np

from .errors import TooLarge
from .model import (
    Assignment,
    ChannelInstance,
    PowerAllocation,
    RateReport,
    SolverOptions,
    rates_repetition,
)
from .selection import _single_relay_maxmin
from .solver import _waterfill


def exhaustive_optimum(instance: ChannelInstance, objective: str = "sum",
                       options: SolverOptions | None = None,
                       limit: int = 10**6):
    """Best assignment by enumerating every J^K possibility.

    For each assignment the per-relay power split is solved exactly
    (water-filling for "sum", the equalizing fill for "max_min").  Ties
    break toward the lexicographically smallest assignment vector, which is
    the first one reached in mixed-radix enumeration order.  Raises TooLarge
    when J^K exceeds ``limit``.

    Returns (Assignment, PowerAllocation, RateReport).
    """
    J, K = instance.num_relays, instance.num_users
    if J ** K > limit:
        raise TooLarge(f"{J}^{K} assignments exceed the limit of {limit}")
    p, c = instance.p, instance.c
    best_value = -np.inf
    best = None
    for combo in itertools.product(range(J), repeat=K):
        a = np.asarray(combo)
        alpha = np.zeros((J, K))
        for j in range(J):
            users = np.nonzero(a == j)[0]
            if users.size == 0:
                continue
            if objective == "sum":
                row, _ = _waterfill(1.0 + c[users], p[j, users], 1.0)
            else:
                row, _ = _single_relay_maxmin(c[users], p[j, users])
            alpha[j, users] = row
        rates = rates_repetition(instance, alpha)
        value = rates.sum() if objective == "sum" else rates.min()
        if value > best_value:
            best_value = value
            best = (a, alpha, rates)
    a, alpha, rates = best
    return (Assignment(a, J), PowerAllocation(alpha),
            RateReport.from_rates(rates))
