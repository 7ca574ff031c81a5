"""Relaxed convex programs for joint relay power allocation.

Dropping the one-relay-per-user rule leaves smooth concave maximization over
per-relay budget simplices.  The sum-rate problems are solved by block
coordinate ascent over relays, each block an exact water-filling step; the
max-min problem is a linear program in the SNR domain.  Every solver returns
a :class:`RelaxedSolution` whose objective upper-bounds the
selection-constrained optimum, together with recovered multipliers and a KKT
residual used for certification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import Infeasible, InfeasibleLowerBounds, InvalidInstance
from .model import (
    LOG2E_HALF,
    ChannelInstance,
    PowerAllocation,
    RateReport,
    SolverOptions,
    rates_independent,
    rates_repetition,
    relay_power_terms,
)

_FEAS_TOL = 1e-9
_LP_METHOD = "highs-ds"  # dual simplex: deterministic, returns basic solutions


@dataclass(frozen=True)
class MinRateTargets:
    """Guaranteed per-user rates, bits/s/Hz."""

    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, float)
        r.setflags(write=False)
        object.__setattr__(self, "r", r)
        if r.ndim != 1 or np.any(r < 0) or not np.all(np.isfinite(r)):
            raise InvalidInstance("targets must be a vector of finite rates >= 0")


@dataclass(frozen=True)
class Duals:
    """Multipliers attached to a relaxed solution.

    For the sum-rate problems both vectors live on the bits-domain gradient
    scale: stationarity reads (1 + gamma_k) * g_jk <= nu_j with
    g_jk = p_jk / (2 ln2 (1 + c_k + y_k)).  For the max-min LP they are the
    epigraph multipliers in the linear SNR domain.
    """

    nu: np.ndarray
    gamma: np.ndarray


@dataclass(frozen=True)
class RelaxedSolution:
    alpha: PowerAllocation
    rates: RateReport
    objective: float
    kkt_residual: float
    multi_relay_users: list
    duals: Duals
    certified: bool
    iterations: int
    codebook: str = "repetition"


# ---------------------------------------------------------------------------
# Water-filling kernel
# ---------------------------------------------------------------------------

def _waterfill(base, gains, budget, lower=None):
    """Maximize sum log(base_k + gains_k * a_k) with sum a = budget, a >= lower.

    Returns (allocation, w) where w is the water level in 1/nu units:
    a_k = max(lower_k, w - base_k/gains_k).  Solved exactly by a breakpoint
    scan over the sorted thresholds t_k = lower_k + base_k/gains_k.
    Zero-gain entries always receive lower_k; if no entry has positive gain
    the leftover budget is left unspent and w = inf.
    """
    b = np.asarray(base, float)
    g = np.asarray(gains, float)
    n = b.size
    L = np.zeros(n) if lower is None else np.asarray(lower, float)
    total_L = L.sum()
    if total_L > budget * (1.0 + _FEAS_TOL) + 1e-15:
        raise InfeasibleLowerBounds(
            f"floors sum to {total_L:.6g} but budget is {budget:.6g}")
    alpha = L.copy()
    pos = g > 0.0
    if not pos.any():
        return alpha, np.inf
    idx = np.nonzero(pos)[0]
    bg = b[idx] / g[idx]
    ts = L[idx] + bg
    order = np.argsort(ts, kind="stable")
    idx, bg, ts = idx[order], bg[order], ts[order]
    Ls = L[idx]
    m_count = idx.size
    rest_L = total_L - Ls.sum()  # floors on zero-gain entries

    # Suffix sums of floors among positive-gain entries: tail[i] = sum Ls[i:]
    tail = np.concatenate([np.cumsum(Ls[::-1])[::-1], [0.0]])
    cum_bg = np.concatenate([[0.0], np.cumsum(bg)])
    # Spent budget at knot w = ts[i] with i entries active (continuous in w).
    knot_sum = np.arange(m_count) * ts - cum_bg[:m_count] + tail[:m_count] + rest_L
    i_star = int(np.searchsorted(knot_sum, budget, side="left"))
    if i_star == 0:
        # floors already exhaust the budget; highest dual-feasible level
        return alpha, float(ts[0])
    w = (budget - rest_L - tail[i_star] + cum_bg[i_star]) / i_star
    active = idx[:i_star]
    alpha[active] = np.maximum(L[active], w - bg[:i_star])
    return alpha, float(w)


def waterfill_relay(base, gains, budget, lower_bounds=None):
    """Single-relay power split: maximize sum_k log(b_k + p_k a_k).

    Parameters
    ----------
    base : array
        Effective noise-plus-signal floor per user, b_k >= 1.
    gains : array
        Relay-link SNR per unit power fraction, p_k >= 0.
    budget : float
        Relay power budget, in (0, 1].
    lower_bounds : array, optional
        Per-user floors L_k >= 0 with sum <= budget.

    Returns the length-K allocation with a_k = max(L_k, 1/nu - b_k/p_k) at
    the unique water level nu balancing the budget; entries with p_k = 0
    receive L_k.  Raises InfeasibleLowerBounds when the floors exceed the
    budget.
    """
    b = np.asarray(base, float)
    g = np.asarray(gains, float)
    if not (0.0 < budget <= 1.0):
        raise InvalidInstance("budget must lie in (0, 1]")
    if np.any(b < 1.0 - 1e-12):
        raise InvalidInstance("base entries must be >= 1")
    if np.any(g < 0) or not np.all(np.isfinite(g)):
        raise InvalidInstance("gains must be finite and >= 0")
    if lower_bounds is not None and np.any(np.asarray(lower_bounds) < 0):
        raise InvalidInstance("lower bounds must be >= 0")
    alpha, _ = _waterfill(b, g, budget, lower_bounds)
    return alpha


# ---------------------------------------------------------------------------
# KKT residuals and dual recovery
# ---------------------------------------------------------------------------

def _gradient_matrix(instance, alpha, codebook):
    y = relay_power_terms(instance, alpha)
    if codebook == "repetition":
        denom = 1.0 + instance.c + y
    else:
        denom = 1.0 + y
    return LOG2E_HALF * instance.p / denom, y


def kkt_residual(instance, alpha, duals, targets=None, codebook="repetition"):
    """Maximum violation of the first-order optimality system.

    Measures stationarity (marginal utilities above the water level), the
    complementary slackness of the recovered positivity multipliers
    lambda_jk = max(0, nu_j - (1+gamma_k) g_jk), budget equality on rows with
    any positive gain, nonnegativity, and (with targets) the per-user rate
    floors with their gamma_k complementarity.
    """
    if isinstance(alpha, PowerAllocation):
        alpha = alpha.alpha
    alpha = np.asarray(alpha, float)
    g, _ = _gradient_matrix(instance, alpha, codebook)
    gamma = np.asarray(duals.gamma, float)
    nu = np.asarray(duals.nu, float)
    marg = (1.0 + gamma)[None, :] * g
    lam = np.maximum(0.0, nu[:, None] - marg)
    pieces = [
        float(np.max(np.maximum(0.0, marg - nu[:, None]), initial=0.0)),
        float(np.max(lam * alpha, initial=0.0)),
        float(np.max(np.maximum(0.0, -alpha), initial=0.0)),
        float(np.max(np.maximum(0.0, -gamma), initial=0.0)),
    ]
    row_active = (instance.p > 0).any(axis=1)
    if row_active.any():
        pieces.append(float(np.max(np.abs(alpha[row_active].sum(axis=1) - 1.0))))
    if targets is not None:
        if codebook != "repetition":
            raise InvalidInstance("rate targets are defined for repetition coding")
        rates = rates_repetition(instance, alpha)
        slack = rates - targets.r
        pieces.append(float(np.max(np.maximum(0.0, -slack), initial=0.0)))
        pieces.append(float(np.max(gamma * np.maximum(0.0, slack), initial=0.0)))
    return max(pieces)


def _recover_duals(instance, alpha, codebook, targets=None, active_users=None):
    """Multipliers minimizing the measured residual at a candidate optimum.

    nu_j is the largest weighted marginal on relay j; gamma_k > 0 only for
    users pinned at their rate floor, solved jointly with nu by a short
    monotone fixed-point iteration (the two definitions reference each
    other through multi-relay floor carriers).
    """
    g, _ = _gradient_matrix(instance, alpha, codebook)
    J, K = g.shape
    gamma = np.zeros(K)
    if targets is None or active_users is None or not active_users.any():
        nu = g.max(axis=1, initial=0.0)
        return Duals(nu, gamma)
    served = alpha > 0.0
    for _ in range(60):
        nu = ((1.0 + gamma)[None, :] * g).max(axis=1, initial=0.0)
        gamma_new = np.zeros(K)
        for k in np.nonzero(active_users)[0]:
            rows = np.nonzero(served[:, k] & (g[:, k] > 0))[0]
            if rows.size:
                gamma_new[k] = max(0.0, float(np.max(nu[rows] / g[rows, k])) - 1.0)
        if np.allclose(gamma_new, gamma, rtol=1e-12, atol=1e-15):
            gamma = gamma_new
            break
        gamma = gamma_new
    nu = ((1.0 + gamma)[None, :] * g).max(axis=1, initial=0.0)
    return Duals(nu, gamma)


# ---------------------------------------------------------------------------
# Max sum rate
# ---------------------------------------------------------------------------

def _finalize(instance, alpha, options, codebook, objective_kind,
              targets=None, active_users=None, iterations=0, lp_pieces=None):
    duals = _recover_duals(instance, alpha, codebook, targets, active_users)
    residual = kkt_residual(instance, alpha, duals, targets, codebook)
    if lp_pieces is not None:
        residual = max(residual, lp_pieces)
    if codebook == "repetition":
        per_user = rates_repetition(instance, alpha)
    else:
        per_user = rates_independent(instance, alpha)
    rates = RateReport.from_rates(per_user)
    row_active = (instance.p > 0).any(axis=1)
    allocation = PowerAllocation(alpha, budget_tight=row_active)
    nonzero = (alpha > options.nonzero_eps).sum(axis=0)
    multi = [int(k) for k in np.nonzero(nonzero >= 2)[0]]
    objective = rates.sum_rate if objective_kind == "sum" else rates.min_rate
    return RelaxedSolution(
        alpha=allocation,
        rates=rates,
        objective=float(objective),
        kkt_residual=float(residual),
        multi_relay_users=multi,
        duals=duals,
        certified=bool(residual <= options.tol),
        iterations=iterations,
        codebook=codebook,
    )


def _sum_objective(instance, alpha, codebook):
    y = relay_power_terms(instance, alpha)
    if codebook == "repetition":
        return float(np.sum(0.5 * np.log2(1.0 + instance.c + y)))
    return float(np.sum(0.5 * np.log2(1.0 + instance.c))
                 + np.sum(0.5 * np.log2(1.0 + y)))


def solve_sum_rate(instance: ChannelInstance, options: SolverOptions | None = None,
                   codebook: str = "repetition") -> RelaxedSolution:
    """Upper bound on the selection-constrained max sum rate.

    Block coordinate ascent over relays: with the other rows frozen, relay j
    faces the single-relay water-filling problem with bases
    b_k = 1 + c_k + sum_{l != j} p_lk a_lk (the independent-codebook variant
    drops c_k).  The iteration stops once a sweep improves the objective by
    less than tol and the KKT residual certifies at tol.
    """
    options = options or SolverOptions()
    if codebook not in ("repetition", "independent"):
        raise InvalidInstance(f"unknown codebook {codebook!r}")
    J, K = instance.num_relays, instance.num_users
    p = instance.p
    base_c = instance.c if codebook == "repetition" else np.zeros(K)
    row_active = (p > 0).any(axis=1)
    alpha = np.where(row_active[:, None], 1.0 / K, 0.0) * np.ones((J, K))
    prev_obj = -np.inf
    sweeps = 0
    while sweeps < options.max_iters:
        sweeps += 1
        y = relay_power_terms(instance, alpha)
        for j in range(J):
            if not row_active[j]:
                continue
            others = y - p[j] * alpha[j]
            row, _ = _waterfill(1.0 + base_c + others, p[j], 1.0)
            y = others + p[j] * row
            alpha[j] = row
        obj = _sum_objective(instance, alpha, codebook)
        if obj - prev_obj <= options.tol * max(1.0, abs(obj)):
            sol = _finalize(instance, alpha, options, codebook, "sum",
                            iterations=sweeps)
            if sol.certified:
                return sol
        prev_obj = obj
    return _finalize(instance, alpha, options, codebook, "sum", iterations=sweeps)


# ---------------------------------------------------------------------------
# Max sum rate with minimum-rate guarantees
# ---------------------------------------------------------------------------

def _feasibility_lp(p, required):
    """Maximize the uniform slack m of sum_j p_jk a_jk >= required_k + m.

    Returns (alpha, m).  The requirement set is feasible iff m >= 0.
    """
    J, K = p.shape
    n = J * K
    A = np.zeros((K + J, n + 1))
    jj, kk = np.meshgrid(np.arange(J), np.arange(K), indexing="ij")
    A[kk.ravel(), (jj * K + kk).ravel()] = -p.ravel()
    A[:K, n] = 1.0
    for j in range(J):
        A[K + j, j * K:(j + 1) * K] = 1.0
    b = np.concatenate([-required, np.ones(J)])
    cost = np.zeros(n + 1)
    cost[n] = -1.0
    res = linprog(cost, A_ub=A, b_ub=b,
                  bounds=[(0, None)] * n + [(None, None)], method=_LP_METHOD)
    if res.status != 0:
        raise Infeasible(f"feasibility LP failed with status {res.status}")
    return res.x[:n].reshape(J, K), float(res.x[n])


def _greedy_seed(p, required):
    """Route each user's required relay SNR to the strongest relays in turn.

    Returns a feasible starting allocation or None when the greedy routing
    runs out of budget (the LP seed then takes over).
    """
    J, K = p.shape
    alpha = np.zeros((J, K))
    cap = np.ones(J)
    best = p.max(axis=0)
    order = np.argsort(-(required / np.maximum(best, 1e-300)), kind="stable")
    for k in order:
        rem = required[k]
        if rem <= 0:
            continue
        while rem > 1e-15 * (1.0 + required[k]):
            avail = np.where(cap > 1e-15, p[:, k], 0.0)
            j = int(np.argmax(avail))
            if avail[j] <= 0:
                return None
            take = min(cap[j], rem / p[j, k])
            alpha[j, k] += take
            cap[j] -= take
            rem -= p[j, k] * take
    return alpha


def _floors_for_row(p_row, deficits):
    """Per-user floors a relay must respect so current targets stay covered."""
    L = np.zeros_like(p_row)
    need = deficits > 0
    ok = need & (p_row > 0)
    L[ok] = deficits[ok] / p_row[ok]
    return L


def _attempt_floor_migration(instance, alpha, y, thresholds, duals, options):
    """Move one pinned user's power to the relay with the best p_jk / nu_j.

    At a true optimum a rate floor is carried by relays maximizing that
    ratio; block sweeps alone cannot relocate a floor, so a stalled,
    non-certified iterate gets one targeted transfer (capped so the
    receiving relay's floors still fit its budget).  Returns True when a
    transfer happened.
    """
    p, c = instance.p, instance.c
    s = np.maximum(0.0, thresholds - 1.0 - c)
    active = (s > 0) & (y <= s * (1.0 + 1e-7) + 1e-9)
    if not active.any():
        return False
    nu = duals.nu
    candidates = []
    for k in np.nonzero(active)[0]:
        rows = np.nonzero((p[:, k] > 0) & (nu > 0))[0]
        if rows.size < 2:
            continue
        ratio = p[rows, k] / nu[rows]
        jstar = rows[int(np.argmax(ratio))]
        for l in np.nonzero(alpha[:, k] > 0)[0]:
            if l == jstar or nu[l] <= 0:
                continue
            gain = (p[jstar, k] / nu[jstar]) / (p[l, k] / nu[l])
            if gain > 1.0 + 1e-9:
                candidates.append((gain, int(k), int(l), int(jstar)))
    candidates.sort(key=lambda t: (-t[0], t[1], t[2]))
    for _, k, l, jstar in candidates:
        o_base = c + y - p[jstar] * alpha[jstar]
        defic = thresholds - 1.0 - o_base
        L = _floors_for_row(p[jstar], defic)
        others = L.sum() - L[k]
        z_allow = (1.0 - others) * p[jstar, k] - max(defic[k], 0.0)
        z = min(p[l, k] * alpha[l, k], z_allow)
        if z <= 1e-13 * (1.0 + y[k]):
            continue
        alpha[l, k] = max(0.0, alpha[l, k] - z / p[l, k])
        y_new = relay_power_terms(instance, alpha)
        o_base = c + y_new - p[jstar] * alpha[jstar]
        defic = thresholds - 1.0 - o_base
        L = _floors_for_row(p[jstar], defic)
        row, _ = _waterfill(1.0 + o_base, p[jstar], 1.0, L)
        alpha[jstar] = row
        return True
    return False


def solve_sum_rate_min(instance: ChannelInstance, targets: MinRateTargets,
                       options: SolverOptions | None = None) -> RelaxedSolution:
    """Max sum rate subject to per-user rate floors (repetition coding).

    The rate floors are linear in the received relay SNR, so feasibility is
    settled by an LP after a cheap necessary check.  The search itself is
    block coordinate ascent where each relay's water-fill carries per-user
    lower bounds equal to the user's residual deficit given all other relays
    (users already at target elsewhere get a zero floor), seeded greedily
    toward feasibility.   Since a floor pinned to the wrong relay is a fixed
    point of the sweeps, stalled non-certified iterates trigger dual-guided
    floor migrations before the solver gives up.

    Raises Infeasible when no allocation meets the targets.
    """
    options = options or SolverOptions()
    J, K = instance.num_relays, instance.num_users
    p, c = instance.p, instance.c
    if targets.r.shape != (K,):
        raise InvalidInstance("targets must have one rate per user")
    thresholds = np.exp2(2.0 * targets.r)
    s = np.maximum(0.0, thresholds - 1.0 - c)
    if not np.any(s > 0):
        return solve_sum_rate(instance, options)
    room = p.sum(axis=0)
    if np.any(s > room * (1.0 + _FEAS_TOL)):
        k = int(np.argmax(s - room))
        raise Infeasible(
            f"user {k} needs relay SNR {s[k]:.6g} but at most {room[k]:.6g} is reachable")
    alpha = _greedy_seed(p, s)
    if alpha is None:
        alpha, margin = _feasibility_lp(p, s)
        if margin < -_FEAS_TOL * (1.0 + float(s.max())):
            raise Infeasible(f"rate targets unreachable (LP margin {margin:.3g})")
    active_mask = s > 0
    row_active = (p > 0).any(axis=1)
    prev_obj = -np.inf
    sweeps = 0
    migrations = 0
    migration_cap = 10 * K + 50
    best = None
    while sweeps < options.max_iters:
        sweeps += 1
        y = relay_power_terms(instance, alpha)
        for j in range(J):
            if not row_active[j]:
                continue
            others = y - p[j] * alpha[j]
            defic = thresholds - 1.0 - (c + others)
            L = _floors_for_row(p[j], defic)
            row, _ = _waterfill(1.0 + c + others, p[j], 1.0, L)
            y = others + p[j] * row
            alpha[j] = row
        obj = _sum_objective(instance, alpha, "repetition")
        if best is None or obj > best[0]:
            best = (obj, alpha.copy())
        if obj - prev_obj <= options.tol * max(1.0, abs(obj)):
            pinned = active_mask & (y <= s * (1.0 + 1e-7) + 1e-9)
            duals = _recover_duals(instance, alpha, "repetition", targets, pinned)
            residual = kkt_residual(instance, alpha, duals, targets, "repetition")
            if residual <= options.tol:
                return _finalize(instance, alpha, options, "repetition", "sum",
                                 targets, pinned, iterations=sweeps)
            if migrations < migration_cap and _attempt_floor_migration(
                    instance, alpha, y, thresholds, duals, options):
                migrations += 1
                prev_obj = -np.inf
                continue
            break
        prev_obj = obj
    obj = _sum_objective(instance, alpha, "repetition")
    if best is not None and best[0] > obj:
        alpha = best[1]
    y = relay_power_terms(instance, alpha)
    pinned = active_mask & (y <= s * (1.0 + 1e-7) + 1e-9)
    return _finalize(instance, alpha, options, "repetition", "sum",
                     targets, pinned, iterations=sweeps)


# ---------------------------------------------------------------------------
# Max-min rate
# ---------------------------------------------------------------------------

def _maxmin_lp(p, c):
    """Epigraph LP: maximize u with c_k + sum_j p_jk a_jk >= u per user."""
    J, K = p.shape
    n = J * K
    A = np.zeros((K + J, n + 1))
    jj, kk = np.meshgrid(np.arange(J), np.arange(K), indexing="ij")
    A[kk.ravel(), (jj * K + kk).ravel()] = -p.ravel()
    A[:K, n] = 1.0
    for j in range(J):
        A[K + j, j * K:(j + 1) * K] = 1.0
    b = np.concatenate([c, np.ones(J)])
    cost = np.zeros(n + 1)
    cost[n] = -1.0
    res = linprog(cost, A_ub=A, b_ub=b,
                  bounds=[(0, None)] * n + [(0, None)], method=_LP_METHOD)
    if res.status != 0:
        raise Infeasible(f"max-min LP failed with status {res.status}")
    lam = np.maximum(0.0, -res.ineqlin.marginals[:K])
    mu = np.maximum(0.0, -res.ineqlin.marginals[K:])
    return res.x[:n].reshape(J, K), float(res.x[n]), lam, mu


def _min_power_lp(p, required):
    """Cheapest allocation meeting per-user received-SNR requirements.

    A plain LP optimum may park unused budget on users already above the
    minimum; re-solving for minimum total power removes every such surplus,
    which is what makes the equalization and sparsity properties hold for
    the returned allocation.  Entries of ``required`` may be negative
    (trivially slack constraints).
    """
    J, K = p.shape
    n = J * K
    A = np.zeros((K + J, n))
    jj, kk = np.meshgrid(np.arange(J), np.arange(K), indexing="ij")
    A[kk.ravel(), (jj * K + kk).ravel()] = -p.ravel()
    for j in range(J):
        A[K + j, j * K:(j + 1) * K] = 1.0
    b = np.concatenate([-required, np.ones(J)])
    res = linprog(np.ones(n), A_ub=A, b_ub=b,
                  bounds=[(0, None)] * n, method=_LP_METHOD)
    if res.status != 0:
        return None
    return res.x.reshape(J, K)


def _maxmin_lp_residual(p, c, alpha, u, lam, mu):
    y = np.einsum("jk,jk->k", p, alpha)
    pieces = [
        float(np.max(np.maximum(0.0, u - (c + y)), initial=0.0)),
        float(np.max(np.maximum(0.0, alpha.sum(axis=1) - 1.0), initial=0.0)),
        float(np.max(np.maximum(0.0, -alpha), initial=0.0)),
        abs(float(lam.sum()) - 1.0),
        float(np.max(np.maximum(0.0, lam[None, :] * p - mu[:, None]), initial=0.0)),
        float(np.max(alpha * (mu[:, None] - lam[None, :] * p), initial=0.0)),
        float(np.max(mu * (1.0 - alpha.sum(axis=1)), initial=0.0)),
        float(np.max(lam * (c + y - u), initial=0.0)),
    ]
    return max(pieces)


def solve_max_min(instance: ChannelInstance, options: SolverOptions | None = None,
                  codebook: str = "repetition") -> RelaxedSolution:
    """Upper bound on the selection-constrained max-min rate.

    Repetition coding: one epigraph LP in the linear SNR domain followed by
    a minimum-power re-solve at the optimal level (see _min_power_lp).
    Independent codebooks: bisection on the target rate, each step an LP
    feasibility check on the per-user required relay SNR.
    """
    options = options or SolverOptions()
    p, c = instance.p, instance.c
    J, K = p.shape
    if codebook == "repetition":
        alpha1, u, lam, mu = _maxmin_lp(p, c)
        u_req = u - 1e-11 * (1.0 + abs(u))
        alpha = _min_power_lp(p, u_req - c)
        if alpha is None:
            alpha = alpha1
        residual = _maxmin_lp_residual(p, c, alpha, u, lam, mu)
        duals = Duals(nu=mu, gamma=lam)
        per_user = rates_repetition(instance, alpha)
        iterations = 1
    elif codebook == "independent":
        r_direct = 0.5 * np.log2(1.0 + c)
        lo = float(r_direct.min())
        hi = float((r_direct + 0.5 * np.log2(1.0 + p.sum(axis=0))).min())
        alpha = np.zeros((J, K))
        if hi - lo > options.tol:
            iterations = 0
            while hi - lo > options.tol and iterations < 200:
                iterations += 1
                mid = 0.5 * (lo + hi)
                req = np.maximum(0.0, np.exp2(2.0 * mid) / (1.0 + c) - 1.0)
                cand, margin = _feasibility_lp(p, req)
                if margin >= 0.0:
                    lo, alpha = mid, cand
                else:
                    hi = mid
        else:
            iterations = 1
        req = np.maximum(0.0, np.exp2(2.0 * lo) / (1.0 + c) - 1.0)
        refined = _min_power_lp(p, req)
        if refined is not None:
            alpha = refined
        y = relay_power_terms(instance, alpha)
        residual = float(np.max(np.maximum(0.0, req - y), initial=0.0))
        duals = Duals(nu=np.zeros(J), gamma=np.zeros(K))
        per_user = rates_independent(instance, alpha)
    else:
        raise InvalidInstance(f"unknown codebook {codebook!r}")
    rates = RateReport.from_rates(per_user)
    allocation = PowerAllocation(alpha)
    nonzero = (alpha > options.nonzero_eps).sum(axis=0)
    multi = [int(k) for k in np.nonzero(nonzero >= 2)[0]]
    return RelaxedSolution(
        alpha=allocation,
        rates=rates,
        objective=float(rates.min_rate),
        kkt_residual=float(residual),
        multi_relay_users=multi,
        duals=duals,
        certified=bool(residual <= max(options.tol, 1e-8)),
        iterations=iterations,
        codebook=codebook,
    )
