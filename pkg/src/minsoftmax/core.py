"""Domain types shared by the solvers.

All types validate their probabilistic and dimensional invariants at
construction and are immutable afterwards (arrays are marked read-only),
so instances can be shared freely across parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    BAD_SHAPE,
    BAD_VALUE,
    NON_FINITE_COST,
    NON_STOCHASTIC_ROW,
    OUT_OF_RANGE_TRANSITION,
    ValidationError,
    Violation,
)

# Row sums may deviate from 1 by at most this much on input; rows are then
# renormalized exactly so downstream log-sum-exp sees sums of exactly 1.
PROBABILITY_TOL = 1e-12

# Temperatures below this are treated as exactly 0 (max branch) to avoid
# catastrophic exp scaling.
TEMPERATURE_FLOOR = 1e-12

# Symmetry / definiteness tolerance for quadratic-cost matrices.
MATRIX_TOL = 1e-10


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Penalties:
    """Regularization weights steering the adversary.

    gamma_h is the likelihood factor (weight on the negative cross-entropy
    between adversarial and empirical distributions); gamma_e is the
    temperature (weight on the adversary's entropy). Both nonnegative.
    A temperature below TEMPERATURE_FLOOR is coerced to exactly 0.
    """

    gamma_h: float
    gamma_e: float

    def __post_init__(self):
        bad = []
        for name in ("gamma_h", "gamma_e"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0.0:
                bad.append(Violation(BAD_VALUE, (name,), f"{name} must be a finite nonnegative real, got {v!r}"))
        if bad:
            raise ValidationError(bad, context="Penalties")
        object.__setattr__(self, "gamma_h", float(self.gamma_h))
        ge = float(self.gamma_e)
        object.__setattr__(self, "gamma_e", 0.0 if ge < TEMPERATURE_FLOOR else ge)

    @property
    def max_branch(self) -> bool:
        """True when the adversary degenerates to a worst-case pick."""
        return self.gamma_e == 0.0


@dataclass(frozen=True, eq=False)
class FiniteSystem:
    """Deterministic finite-space control system with empirical disturbances.

    Attributes:
        transition: (n_states, n_inputs, n_dist) int array; next-state index.
        stage_cost: (n_states, n_inputs) array g(x, u).
        terminal_cost: (n_states,) array.
        empirical: (n_states, n_inputs, n_dist) probability rows, or the
            stage-dependent variant (horizon, n_states, n_inputs, n_dist).
        horizon: number of stages h >= 1.

    Empirical rows are validated to sum to 1 within PROBABILITY_TOL and are
    then renormalized exactly.
    """

    transition: np.ndarray
    stage_cost: np.ndarray
    terminal_cost: np.ndarray
    empirical: np.ndarray
    horizon: int

    def __post_init__(self):
        tr = np.asarray(self.transition)
        g = np.asarray(self.stage_cost, dtype=np.float64)
        gh = np.asarray(self.terminal_cost, dtype=np.float64)
        emp = np.asarray(self.empirical, dtype=np.float64)

        violations = _check_shapes(tr, g, gh, emp, self.horizon)
        if violations:
            raise ValidationError(violations, context="FiniteSystem")

        if not np.issubdtype(tr.dtype, np.integer):
            rounded = np.rint(tr)
            if not np.array_equal(rounded, tr):
                raise ValidationError(
                    [Violation(BAD_VALUE, (), "transition entries must be integers")],
                    context="FiniteSystem",
                )
            tr = rounded
        tr = tr.astype(np.int64)

        violations = _check_values(tr, g, gh, emp)
        if violations:
            raise ValidationError(violations, context="FiniteSystem")

        emp = _renormalize_exact(emp)

        object.__setattr__(self, "transition", _freeze(tr))
        object.__setattr__(self, "stage_cost", _freeze(g))
        object.__setattr__(self, "terminal_cost", _freeze(gh))
        object.__setattr__(self, "empirical", _freeze(emp))
        object.__setattr__(self, "horizon", int(self.horizon))

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.transition.shape[1]

    @property
    def n_dist(self) -> int:
        return self.transition.shape[2]

    @property
    def stage_dependent_empirical(self) -> bool:
        return self.empirical.ndim == 4

    def empirical_at(self, k: int) -> np.ndarray:
        """Empirical table r_k(.|x,u) for stage k, shape (n_states, n_inputs, n_dist)."""
        if self.stage_dependent_empirical:
            return self.empirical[k]
        return self.empirical


def _renormalize_exact(emp: np.ndarray) -> np.ndarray:
    """Scale each row to sum to 1, absorbing the last ulp into its largest entry."""
    emp = emp / emp.sum(axis=-1, keepdims=True)
    flat = emp.reshape(-1, emp.shape[-1])
    for _ in range(3):
        residual = 1.0 - flat.sum(axis=-1)
        if not residual.any():
            break
        flat[np.arange(flat.shape[0]), flat.argmax(axis=-1)] += residual
    return emp


def _check_shapes(tr, g, gh, emp, horizon) -> list[Violation]:
    out = []
    if tr.ndim != 3:
        out.append(Violation(BAD_SHAPE, (), f"transition must be 3-d (x,u,w), got ndim={tr.ndim}"))
        return out
    n_x, n_u, n_w = tr.shape
    if min(n_x, n_u, n_w) < 1:
        out.append(Violation(BAD_SHAPE, tr.shape, "all cardinalities must be positive"))
    if g.shape != (n_x, n_u):
        out.append(Violation(BAD_SHAPE, g.shape, f"stage_cost must have shape {(n_x, n_u)}"))
    if gh.shape != (n_x,):
        out.append(Violation(BAD_SHAPE, gh.shape, f"terminal_cost must have shape {(n_x,)}"))
    if not (isinstance(horizon, (int, np.integer)) and horizon >= 1):
        out.append(Violation(BAD_VALUE, ("horizon",), f"horizon must be a positive integer, got {horizon!r}"))
    if emp.ndim == 3:
        if emp.shape != (n_x, n_u, n_w):
            out.append(Violation(BAD_SHAPE, emp.shape, f"empirical must have shape {(n_x, n_u, n_w)}"))
    elif emp.ndim == 4:
        if emp.shape != (horizon, n_x, n_u, n_w):
            out.append(Violation(BAD_SHAPE, emp.shape, f"per-stage empirical must have shape {(horizon, n_x, n_u, n_w)}"))
    else:
        out.append(Violation(BAD_SHAPE, emp.shape, "empirical must be 3-d or 4-d"))
    return out


def _check_values(tr, g, gh, emp) -> list[Violation]:
    out = []
    n_x = tr.shape[0]
    bad_t = (tr < 0) | (tr >= n_x)
    for idx in np.argwhere(bad_t)[:50]:
        out.append(Violation(OUT_OF_RANGE_TRANSITION, tuple(int(i) for i in idx),
                             f"target {int(tr[tuple(idx)])} outside [0, {n_x})"))
    if bad_t.sum() > 50:
        out.append(Violation(OUT_OF_RANGE_TRANSITION, (), f"{int(bad_t.sum()) - 50} further out-of-range targets"))

    for name, arr in (("stage_cost", g), ("terminal_cost", gh)):
        bad_c = ~np.isfinite(arr)
        for idx in np.argwhere(bad_c)[:50]:
            out.append(Violation(NON_FINITE_COST, (name,) + tuple(int(i) for i in idx), "cost is not finite"))

    rows = emp.reshape(-1, emp.shape[-1])
    sums = rows.sum(axis=-1)
    bad_rows = (np.abs(sums - 1.0) > PROBABILITY_TOL) | (rows < 0).any(axis=-1) | ~np.isfinite(rows).all(axis=-1)
    lead_shape = emp.shape[:-1]
    for flat in np.flatnonzero(bad_rows)[:50]:
        where = tuple(int(i) for i in np.unravel_index(flat, lead_shape))
        out.append(Violation(NON_STOCHASTIC_ROW, where,
                             f"row sum {sums[flat]!r} (must be 1 within {PROBABILITY_TOL}) or negative/non-finite entry"))
    n_bad = int(bad_rows.sum())
    if n_bad > 50:
        out.append(Violation(NON_STOCHASTIC_ROW, (), f"{n_bad - 50} further bad rows"))
    return out


def validate_finite_system(
    transition, stage_cost, terminal_cost, empirical, horizon
) -> FiniteSystem:
    """Validate raw tables and return the constructed system.

    Raises ValidationError listing every violation with indices. This is the
    same check FiniteSystem runs at construction, exposed for callers that
    want to validate loaded payloads explicitly.
    """
    return FiniteSystem(
        transition=np.asarray(transition),
        stage_cost=np.asarray(stage_cost),
        terminal_cost=np.asarray(terminal_cost),
        empirical=np.asarray(empirical),
        horizon=horizon,
    )


@dataclass(frozen=True, eq=False)
class SolveResult:
    """Backward-recursion output on a finite system.

    values has shape (h+1, n_states); policy has shape (h, n_states).
    For gamma_e > 0 the adversary table holds p*_k(.|x, mu_k(x)) with shape
    (h, n_states, n_dist); for gamma_e = 0 worst_index holds the chosen
    worst-case disturbance index instead, shape (h, n_states).
    adversary_all is populated only when the solver is asked to keep the
    per-input tables (shape (h, n_states, n_inputs, n_dist)).
    """

    values: np.ndarray
    policy: np.ndarray
    penalties: Penalties
    adversary: Optional[np.ndarray] = None
    worst_index: Optional[np.ndarray] = None
    adversary_all: Optional[np.ndarray] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        p = np.asarray(self.policy)
        bad = []
        if v.ndim != 2 or p.ndim != 2 or v.shape[0] != p.shape[0] + 1 or v.shape[1] != p.shape[1]:
            bad.append(Violation(BAD_SHAPE, (v.shape, p.shape), "values must be (h+1, n) and policy (h, n)"))
        if self.adversary is None and self.worst_index is None:
            bad.append(Violation(BAD_VALUE, (), "one of adversary / worst_index must be present"))
        if self.adversary is not None:
            rows = np.asarray(self.adversary)
            sums = rows.sum(axis=-1)
            if np.abs(sums - 1.0).max() > 1e-9 or (rows < 0).any():
                bad.append(Violation(NON_STOCHASTIC_ROW, (), "adversary rows must sum to 1 within 1e-9"))
        if bad:
            raise ValidationError(bad, context="SolveResult")
        object.__setattr__(self, "values", _freeze(v))
        object.__setattr__(self, "policy", _freeze(p.astype(np.int64)))
        for name in ("adversary", "worst_index", "adversary_all"):
            a = getattr(self, name)
            if a is not None:
                object.__setattr__(self, name, _freeze(np.asarray(a)))

    @property
    def horizon(self) -> int:
        return self.policy.shape[0]


@dataclass(frozen=True, eq=False)
class LqSystem:
    """Linear dynamics x' = Ax + Bu + Dw with quadratic stage costs.

    Q and Q_h must be symmetric PSD, R symmetric PD (within MATRIX_TOL).
    The empirical disturbance is standard Gaussian N(0, I); any other
    covariance must be absorbed into D by the caller. horizon is a positive
    integer, or None for the infinite-horizon problem.
    """

    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    q: np.ndarray
    r: np.ndarray
    q_h: np.ndarray
    horizon: Optional[int] = None

    def __post_init__(self):
        mats = {}
        for name in ("a", "b", "d", "q", "r", "q_h"):
            mats[name] = np.atleast_2d(np.asarray(getattr(self, name), dtype=np.float64))
        bad = []
        n = mats["a"].shape[0]
        if mats["a"].shape != (n, n):
            bad.append(Violation(BAD_SHAPE, mats["a"].shape, "A must be square"))
        n_u = mats["b"].shape[1]
        n_w = mats["d"].shape[1]
        for name, shape in (("b", (n, n_u)), ("d", (n, n_w)), ("q", (n, n)), ("q_h", (n, n)), ("r", (n_u, n_u))):
            if mats[name].shape != shape:
                bad.append(Violation(BAD_SHAPE, mats[name].shape, f"{name.upper()} must have shape {shape}"))
        if not all(np.isfinite(m).all() for m in mats.values()):
            bad.append(Violation(BAD_VALUE, (), "all matrices must be finite"))
        if bad:
            raise ValidationError(bad, context="LqSystem")

        for name, pd in (("q", False), ("q_h", False), ("r", True)):
            m = mats[name]
            if np.abs(m - m.T).max() > MATRIX_TOL:
                bad.append(Violation(BAD_VALUE, (name,), f"{name.upper()} not symmetric within {MATRIX_TOL}"))
                continue
            m = 0.5 * (m + m.T)
            ev = np.linalg.eigvalsh(m).min()
            if pd and ev <= 0.0:
                bad.append(Violation(BAD_VALUE, (name,), f"{name.upper()} must be positive definite (min eig {ev:.3g})"))
            if not pd and ev < -MATRIX_TOL:
                bad.append(Violation(BAD_VALUE, (name,), f"{name.upper()} must be PSD within {MATRIX_TOL} (min eig {ev:.3g})"))
            mats[name] = m
        h = self.horizon
        if h is not None and not (isinstance(h, (int, np.integer)) and h >= 1):
            bad.append(Violation(BAD_VALUE, ("horizon",), f"horizon must be a positive integer or None, got {h!r}"))
        if bad:
            raise ValidationError(bad, context="LqSystem")

        for name, m in mats.items():
            object.__setattr__(self, name, _freeze(m))
        object.__setattr__(self, "horizon", None if h is None else int(h))

    @property
    def n_states(self) -> int:
        return self.a.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.b.shape[1]

    @property
    def n_dist(self) -> int:
        return self.d.shape[1]


@dataclass(frozen=True)
class RiccatiConfig:
    """Convergence control for fixed-point Riccati iteration."""

    fixed_point_tol: float = 1e-10
    max_iters: int = 100_000
    psd_tol: float = 1e-10

    def __post_init__(self):
        bad = [
            Violation(BAD_VALUE, (name,), f"{name} must be positive")
            for name in ("fixed_point_tol", "max_iters", "psd_tol")
            if not getattr(self, name) > 0
        ]
        if bad:
            raise ValidationError(bad, context="RiccatiConfig")


@dataclass(frozen=True, eq=False)
class LqSolution:
    """Finite-horizon solution of the linear-quadratic adversarial game.

    p_mats[k] and zetas[k] give the cost-to-go J_k(x) = x'P_k x + zeta_k for
    k = 0..h. gains[k] is the feedback matrix (u_k = -gains[k] x_k),
    m_mats[k] = gamma_h*I - 2*D'P_k D, adversary_mean_maps[k] maps x_k to the
    mean of the adversarial Gaussian at stage k, and adversary_covs[k] is its
    covariance gamma_e * M_{k+1}^{-1} (zero matrix when gamma_e = 0).
    """

    p_mats: np.ndarray
    zetas: np.ndarray
    gains: np.ndarray
    m_mats: np.ndarray
    adversary_mean_maps: np.ndarray
    adversary_covs: np.ndarray
    penalties: Penalties

    def __post_init__(self):
        for name in ("p_mats", "zetas", "gains", "m_mats", "adversary_mean_maps", "adversary_covs"):
            object.__setattr__(self, name, _freeze(np.asarray(getattr(self, name), dtype=np.float64)))

    @property
    def horizon(self) -> int:
        return self.gains.shape[0]
