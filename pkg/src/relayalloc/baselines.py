"""SISO and MISO reference systems for the cellular comparison.

Direct transmission uses the whole slot, so these rates carry no 1/2 factor;
the bandwidth loss of two-slot relaying is deliberate and shows up only in
the relay system's rates.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInstance
from .model import ChannelInstance, RateReport, SolverOptions
from .selection import bound_pair
from .solver import _waterfill


def siso_rates(gains, total_power: float, objective: str = "sum") -> RateReport:
    """Single-antenna downlink rates over K orthogonal user channels.

    gains are per-unit-power SNRs.  "sum" water-fills the power budget;
    "equal_rate" finds the common rate t with sum_k (2^t - 1)/g_k = P by the
    closed form (any zero-gain user forces rate 0 with the power unused).
    """
    g = np.asarray(gains, float)
    if np.any(g < 0) or not np.all(np.isfinite(g)):
        raise InvalidInstance("gains must be finite and >= 0")
    if total_power <= 0:
        raise InvalidInstance("total power must be positive")
    if objective == "sum":
        q, _ = _waterfill(np.ones_like(g), g, float(total_power))
        rates = np.log2(1.0 + g * q)
    elif objective == "equal_rate":
        if np.any(g <= 0):
            rates = np.zeros_like(g)
        else:
            t = np.log2(1.0 + total_power / np.sum(1.0 / g))
            rates = np.full_like(g, t)
    else:
        raise InvalidInstance(f"unknown objective {objective!r}")
    return RateReport.from_rates(rates)


def miso_rates(channel_vectors, total_power: float, objective: str = "sum") -> RateReport:
    """Matched-beamforming rates: effective gain is the squared channel norm.

    channel_vectors holds one length-(J+1) amplitude vector per user
    (complex or real), already carrying the shared large-scale factor.
    """
    h = np.asarray(channel_vectors)
    if h.ndim != 2:
        raise InvalidInstance("channel_vectors must be K x antennas")
    g = np.sum(np.abs(h) ** 2, axis=1)
    return siso_rates(g, total_power, objective)


def relay_system_rates(instance: ChannelInstance, objective: str = "sum",
                       options: SolverOptions | None = None) -> RateReport:
    """Achievable (selection-feasible) relay-system rates.

    Reports the rounding heuristic's lower bound with per-relay
    re-optimization.  Rates use the compound expression under the decode
    assumption (no source-relay cap).
    """
    if objective not in ("sum", "max_min"):
        raise InvalidInstance(f"unknown objective {objective!r}")
    return bound_pair(instance, objective, options).lower_rates
