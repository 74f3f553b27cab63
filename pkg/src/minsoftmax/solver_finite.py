"""Backward value iteration with a closed-form softmax adversary.

Each stage reduces the inner maximization over disturbance distributions to
a log-sum-exp of the score

    alpha_w = gamma_h * log r(w|x,u) + J_next(f(x,u,w)),

so the stage value is Q = gamma_e * logsumexp(alpha / gamma_e) for
gamma_e > 0 and Q = max_w alpha_w for gamma_e = 0, and the maximizing
distribution is softmax(alpha / gamma_e). Zero-probability disturbances are
excluded (alpha = -inf) whenever gamma_h > 0; with gamma_h = 0 the
likelihood term is defined as 0 and they stay eligible.

All log-sum-exps use the max-shift form; nothing here exponentiates
unshifted scores. Argmin/argmax tie-breaking is smallest index everywhere.
Per-state work within a stage is independent given J_next, so the stage
loops are expressed as whole-array numpy operations.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .core import FiniteSystem, Penalties, SolveResult
from .errors import AllAlphasInfinite, TemperatureZero, ValidationError, Violation, BAD_VALUE

REGIMES = ("minimax", "ml_ce", "risk_sensitive", "sdp")


def alpha_row(empirical_row: np.ndarray, next_values: np.ndarray, gamma_h: float) -> np.ndarray:
    """Score vector alpha_w for one (x, u): gamma_h*log r + continuation cost.

    next_values[w] is J_next(f(x,u,w)) already gathered through the dynamics.
    Entries are -inf exactly where the empirical row is 0 and gamma_h > 0.
    """
    r = np.asarray(empirical_row, dtype=np.float64)
    j = np.asarray(next_values, dtype=np.float64)
    if gamma_h == 0.0:
        return j.copy()
    with np.errstate(divide="ignore"):
        return gamma_h * np.log(r) + j


def q_value(alphas: np.ndarray, pen: Penalties) -> float:
    """Stage value of the regularized inner maximization for one (x, u).

    gamma_e > 0: m + gamma_e * log sum_w exp((alpha_w - m)/gamma_e) with
    m = max_w alpha_w; entries at -inf contribute zero mass.
    gamma_e = 0: max_w alpha_w.
    """
    a = np.asarray(alphas, dtype=np.float64)
    m = a.max()
    if np.isneginf(m):
        raise AllAlphasInfinite()
    if pen.max_branch:
        return float(m)
    return float(m + pen.gamma_e * np.log(np.exp((a - m) / pen.gamma_e).sum()))


def softmax_adversary(alphas: np.ndarray, pen: Penalties) -> np.ndarray:
    """Maximizing distribution p*_w proportional to exp(alpha_w / gamma_e).

    Requires gamma_e > 0; sums to 1 within 1e-12 and is exactly 0 where
    alpha_w = -inf.
    """
    if pen.max_branch:
        raise TemperatureZero("softmax adversary undefined at gamma_e = 0; use worst_case_index")
    a = np.asarray(alphas, dtype=np.float64)
    m = a.max()
    if np.isneginf(m):
        raise AllAlphasInfinite()
    p = np.exp((a - m) / pen.gamma_e)
    return p / p.sum()


def worst_case_index(alphas: np.ndarray) -> int:
    """Smallest index attaining max_w alpha_w."""
    a = np.asarray(alphas, dtype=np.float64)
    if np.isneginf(a.max()):
        raise AllAlphasInfinite()
    return int(a.argmax())


def _stage_alphas(sys: FiniteSystem, j_next: np.ndarray, gamma_h: float, k: int) -> np.ndarray:
    """Alpha scores for every (x, u, w) at stage k."""
    cont = j_next[sys.transition]
    if gamma_h == 0.0:
        return cont
    with np.errstate(divide="ignore"):
        log_r = np.log(sys.empirical_at(k))
    return gamma_h * log_r + cont


def _q_table(alpha: np.ndarray, pen: Penalties, k: int) -> np.ndarray:
    """Q(x, u) over the whole stage, with defensive all--inf detection."""
    m = alpha.max(axis=-1)
    if np.isneginf(m).any():
        x, u = np.argwhere(np.isneginf(m))[0]
        raise AllAlphasInfinite(stage=k, state=int(x), inp=int(u))
    if pen.max_branch:
        return m
    s = np.exp((alpha - m[..., None]) / pen.gamma_e).sum(axis=-1)
    return m + pen.gamma_e * np.log(s)


def solve_backward(
    sys: FiniteSystem, pen: Penalties, keep_all_inputs: bool = False
) -> SolveResult:
    """Backward minsoftmax value iteration over the full horizon.

    J_h = terminal cost; for k = h-1..0 each state takes the input
    minimizing g(x,u) + Q_k(x,u) (smallest index on ties). The adversary
    table is stored at the chosen input only; pass keep_all_inputs=True to
    also keep the per-input tables (memory h*n_states*n_inputs*n_dist).
    """
    h, n_x = sys.horizon, sys.n_states
    values = np.empty((h + 1, n_x))
    policy = np.empty((h, n_x), dtype=np.int64)
    values[h] = sys.terminal_cost
    xs = np.arange(n_x)

    adversary = None if pen.max_branch else np.empty((h, n_x, sys.n_dist))
    worst = np.empty((h, n_x), dtype=np.int64) if pen.max_branch else None
    adv_all = np.empty((h, n_x, sys.n_inputs, sys.n_dist)) if (keep_all_inputs and not pen.max_branch) else None

    for k in range(h - 1, -1, -1):
        alpha = _stage_alphas(sys, values[k + 1], pen.gamma_h, k)
        total = sys.stage_cost + _q_table(alpha, pen, k)
        mu = total.argmin(axis=1)
        policy[k] = mu
        values[k] = total[xs, mu]
        chosen = alpha[xs, mu, :]
        if pen.max_branch:
            worst[k] = chosen.argmax(axis=1)
        else:
            m = chosen.max(axis=1, keepdims=True)
            p = np.exp((chosen - m) / pen.gamma_e)
            adversary[k] = p / p.sum(axis=1, keepdims=True)
            if adv_all is not None:
                ma = alpha.max(axis=-1, keepdims=True)
                pa = np.exp((alpha - ma) / pen.gamma_e)
                adv_all[k] = pa / pa.sum(axis=-1, keepdims=True)

    return SolveResult(
        values=values,
        policy=policy,
        penalties=pen,
        adversary=adversary,
        worst_index=worst,
        adversary_all=adv_all,
    )


def solve_limit(
    sys: FiniteSystem, regime: str, gamma: Optional[float] = None
) -> SolveResult:
    """Direct implementation of a limiting regime, used as a comparator.

    regime is one of:
      minimax        J_k(x) = min_u max over all w of g + J_next
      ml_ce          propagate the modal disturbance (smallest index on ties)
      risk_sensitive min_u g + (1/gamma) log E_r exp(gamma * J_next), gamma > 0
      sdp            min_u g + E_r J_next

    These recursions share no code with solve_backward's softmax path beyond
    elementary numpy, so they serve as independent ground truth for the
    limit-behavior checks.
    """
    if regime not in REGIMES:
        raise ValidationError([Violation(BAD_VALUE, ("regime",), f"unknown regime {regime!r}")], context="solve_limit")
    if regime == "risk_sensitive":
        if gamma is None or not gamma > 0:
            raise ValidationError(
                [Violation(BAD_VALUE, ("gamma",), "risk_sensitive requires gamma > 0")], context="solve_limit"
            )
    h, n_x = sys.horizon, sys.n_states
    values = np.empty((h + 1, n_x))
    policy = np.empty((h, n_x), dtype=np.int64)
    values[h] = sys.terminal_cost
    xs = np.arange(n_x)

    dist_table = np.empty((h, n_x, sys.n_dist)) if regime in ("risk_sensitive", "sdp") else None
    index_table = np.empty((h, n_x), dtype=np.int64) if regime in ("minimax", "ml_ce") else None

    for k in range(h - 1, -1, -1):
        cont = values[k + 1][sys.transition]
        r = sys.empirical_at(k)
        if regime == "minimax":
            q = cont.max(axis=-1)
        elif regime == "ml_ce":
            w_star = r.argmax(axis=-1)
            q = np.take_along_axis(cont, w_star[..., None], axis=-1)[..., 0]
        elif regime == "sdp":
            q = (r * cont).sum(axis=-1)
        else:  # risk_sensitive
            with np.errstate(divide="ignore"):
                s = gamma * cont + np.log(r)
            m = s.max(axis=-1)
            q = (m + np.log(np.exp(s - m[..., None]).sum(axis=-1))) / gamma

        total = sys.stage_cost + q
        mu = total.argmin(axis=1)
        policy[k] = mu
        values[k] = total[xs, mu]

        if regime == "minimax":
            index_table[k] = cont[xs, mu, :].argmax(axis=-1)
        elif regime == "ml_ce":
            index_table[k] = r[xs, mu, :].argmax(axis=-1)
        elif regime == "sdp":
            dist_table[k] = r[xs, mu, :]
        else:
            with np.errstate(divide="ignore"):
                s = gamma * cont[xs, mu, :] + np.log(r[xs, mu, :])
            m = s.max(axis=-1, keepdims=True)
            p = np.exp(s - m)
            dist_table[k] = p / p.sum(axis=-1, keepdims=True)

    pen = _regime_penalties(regime, gamma)
    return SolveResult(
        values=values, policy=policy, penalties=pen,
        adversary=dist_table, worst_index=index_table,
    )


def _regime_penalties(regime: str, gamma: Optional[float]) -> Penalties:
    """Nominal penalty pair each regime corresponds to (for provenance only)."""
    if regime == "minimax":
        return Penalties(0.0, 0.0)
    if regime == "ml_ce":
        return Penalties(1e18, 0.0)
    if regime == "risk_sensitive":
        return Penalties(1.0 / gamma, 1.0 / gamma)
    return Penalties(1e18, 1e18)
