"""Domain types and closed-form rate equations for the relay-aided downlink.

All SNR quantities are linear (dimensionless power ratios); dB enters only
at I/O boundaries.  Rates are bits/s/Hz per orthogonal user channel and carry
the 1/2 two-slot factor where the relayed path is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInstance, MissingSourceRelayData

LOG2E_HALF = 0.5 / np.log(2.0)  # d/dx of 0.5*log2(1+x) at x, times (1+x)

ROW_SUM_TOL = 1e-9


def _as_readonly(a, dtype=float):
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ChannelInstance:
    """Per-user direct-link SNRs and per-relay-per-user relay-link SNRs.

    c[k] is the direct BS-to-user SNR, p[j, k] the full-power SNR of relay j
    at user k, and sr[j] (optional) the BS-to-relay SNR.
    """

    c: np.ndarray
    p: np.ndarray
    sr: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "c", _as_readonly(self.c))
        object.__setattr__(self, "p", _as_readonly(self.p))
        if self.sr is not None:
            object.__setattr__(self, "sr", _as_readonly(self.sr))
        if self.c.ndim != 1 or self.p.ndim != 2:
            raise InvalidInstance("c must be a vector and p a J x K matrix")
        if self.p.shape[1] != self.c.shape[0]:
            raise InvalidInstance(
                f"p has {self.p.shape[1]} user columns but c has {self.c.shape[0]}")
        if self.num_relays < 1 or self.num_users < 1:
            raise InvalidInstance("need at least one relay and one user")
        for name, arr in (("c", self.c), ("p", self.p), ("sr", self.sr)):
            if arr is None:
                continue
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                raise InvalidInstance(f"{name} entries must be finite and >= 0")
        if self.sr is not None and self.sr.shape != (self.num_relays,):
            raise InvalidInstance("sr must have one entry per relay")

    @property
    def num_relays(self) -> int:
        return self.p.shape[0]

    @property
    def num_users(self) -> int:
        return self.p.shape[1]


@dataclass(frozen=True)
class PowerAllocation:
    """J x K matrix of relay power fractions with per-relay budget rows.

    ``budget_tight`` marks rows required to sum to exactly 1 (within
    tolerance); other rows only need row sums <= 1.
    """

    alpha: np.ndarray
    budget_tight: np.ndarray | bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_readonly(self.alpha))
        if self.alpha.ndim != 2:
            raise InvalidInstance("alpha must be a J x K matrix")
        tight = np.broadcast_to(np.asarray(self.budget_tight, bool),
                                (self.alpha.shape[0],))
        object.__setattr__(self, "budget_tight", _as_readonly(tight, bool))
        if np.any(self.alpha < 0) or not np.all(np.isfinite(self.alpha)):
            raise InvalidInstance("alpha entries must be finite and >= 0")
        sums = self.alpha.sum(axis=1)
        if np.any(sums > 1.0 + ROW_SUM_TOL):
            raise InvalidInstance("relay budget exceeded: row sum > 1")
        if np.any(self.budget_tight & (np.abs(sums - 1.0) > ROW_SUM_TOL)):
            raise InvalidInstance("budget-tight row does not sum to 1")


@dataclass(frozen=True)
class Assignment:
    """Chosen relay index per user (0-based)."""

    relay_of: np.ndarray
    num_relays: int

    def __post_init__(self):
        object.__setattr__(self, "relay_of", _as_readonly(self.relay_of, int))
        if self.relay_of.ndim != 1:
            raise InvalidInstance("relay_of must be a length-K vector")
        if np.any(self.relay_of < 0) or np.any(self.relay_of >= self.num_relays):
            raise InvalidInstance("relay index out of range")


@dataclass(frozen=True)
class RateReport:
    """Per-user rates plus sum and min aggregates, bits/s/Hz."""

    per_user: np.ndarray
    sum_rate: float
    min_rate: float

    @classmethod
    def from_rates(cls, per_user) -> "RateReport":
        per_user = _as_readonly(per_user)
        return cls(per_user, float(per_user.sum()), float(per_user.min()))


@dataclass(frozen=True)
class SolverOptions:
    """Numerical knobs shared by the solvers."""

    tol: float = 1e-8
    max_iters: int = 10_000
    nonzero_eps: float = 1e-7

    def __post_init__(self):
        if self.tol <= 0:
            raise InvalidInstance("tol must be positive")
        if self.nonzero_eps <= self.tol:
            raise InvalidInstance("nonzero_eps must exceed tol")
        if self.max_iters < 1:
            raise InvalidInstance("max_iters must be >= 1")


def rate_compound(c_k, relay_terms):
    """Rate of the compound source+relay reception: 0.5*log2(1 + c + sum p*a).

    Monotone nondecreasing and concave in ``relay_terms``.
    """
    return 0.5 * np.log2(1.0 + np.asarray(c_k) + np.asarray(relay_terms))


def rate_source_relay(sr_j):
    """Rate of the source-to-relay link: 0.5*log2(1 + sr)."""
    return 0.5 * np.log2(1.0 + np.asarray(sr_j))


def relay_power_terms(instance: ChannelInstance, alpha: np.ndarray) -> np.ndarray:
    """Received relay SNR per user: y_k = sum_j p_jk * alpha_jk."""
    return np.einsum("jk,jk->k", instance.p, np.asarray(alpha))


def rates_repetition(instance: ChannelInstance, alpha, apply_sr_cap: bool = False,
                     serving_eps: float = 0.0) -> np.ndarray:
    """Per-user repetition-coding rates for a full allocation matrix.

    With ``apply_sr_cap`` and source-relay SNRs present, each user's rate is
    capped by the weakest serving relay's decode rate (conservative when a
    user is served by several relays).  Users with no serving relay are not
    capped.
    """
    alpha = np.asarray(alpha)
    y = relay_power_terms(instance, alpha)
    rates = rate_compound(instance.c, y)
    if apply_sr_cap:
        if instance.sr is None:
            raise MissingSourceRelayData("instance has no source-relay SNRs")
        caps = rate_source_relay(instance.sr)
        serving = alpha > serving_eps
        for k in np.nonzero(serving.any(axis=0))[0]:
            rates[k] = min(rates[k], caps[serving[:, k]].min())
    return rates


def rate_user_repetition(instance: ChannelInstance, alpha, k: int) -> float:
    """Repetition-coding rate of user k; sr decode cap applies when sr given."""
    rates = rates_repetition(instance, alpha, apply_sr_cap=instance.sr is not None)
    return float(rates[k])


def rates_independent(instance: ChannelInstance, alpha) -> np.ndarray:
    """Per-user rates with independent codebooks at source and relays."""
    y = relay_power_terms(instance, np.asarray(alpha))
    return 0.5 * np.log2(1.0 + instance.c) + 0.5 * np.log2(1.0 + y)


def rate_user_independent(instance: ChannelInstance, alpha, k: int) -> float:
    return float(rates_independent(instance, alpha)[k])


def assumption_holds(instance: ChannelInstance, alpha: PowerAllocation | None = None) -> bool:
    """Check the decode-bottleneck assumption sr_j > c_k + p_jk * a_jk for all j, k.

    Defaults to the conservative full-power convention a_jk = 1, so every
    relay must out-hear the compound link even when it spends its whole
    budget on a single user.  Ties fail (strict inequality).
    """
    if instance.sr is None:
        raise MissingSourceRelayData("instance has no source-relay SNRs")
    if alpha is None:
        a = np.ones_like(instance.p)
    else:
        a = alpha.alpha
    compound = instance.c[None, :] + instance.p * a
    return bool(np.all(instance.sr[:, None] > compound))
