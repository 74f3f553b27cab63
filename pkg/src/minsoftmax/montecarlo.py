"""Policy rollouts on finite systems with reproducible statistics.

Draws are produced by counter-based Philox streams keyed by
(seed, rollout index), with stage k consuming the k-th counter of its
stream, so results do not depend on scheduling or thread count and are
bit-identical across runs for the same (system, result, spec).
Disturbances are sampled by inverse CDF over the cumulative empirical
vector in index order.

Per-stage bands are mean +/- k*std over rollouts (not empirical
quantiles), in mapped physical units when a state map is supplied.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import FiniteSystem, SolveResult
from .errors import BAD_VALUE, ModelMismatch, ValidationError, Violation

DISTURBANCE_MODELS = ("empirical", "adversarial", "fixed_table")

# Above this many stored state visits, raw trajectories are spilled to a
# columnar text file instead of being held in memory.
DEFAULT_SPILL_THRESHOLD = 1_000_000


@dataclass(frozen=True)
class RolloutSpec:
    """What to simulate: how many rollouts, from where, under which model.

    initial_state is a state index or a probability vector over states.
    fixed_table must be a stochastic (n_states, n_inputs, n_dist) table and
    is only consulted for the fixed_table model.
    """

    n_rollouts: int
    seed: int
    disturbance_model: str = "empirical"
    initial_state: Union[int, np.ndarray] = 0
    fixed_table: Optional[np.ndarray] = None
    spill_threshold: int = DEFAULT_SPILL_THRESHOLD
    spill_dir: Optional[str] = None

    def __post_init__(self):
        bad = []
        if not (isinstance(self.n_rollouts, (int, np.integer)) and self.n_rollouts >= 1):
            bad.append(Violation(BAD_VALUE, ("n_rollouts",), f"n_rollouts must be >= 1, got {self.n_rollouts!r}"))
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            bad.append(Violation(BAD_VALUE, ("seed",), "seed must be a 64-bit unsigned integer"))
        if self.disturbance_model not in DISTURBANCE_MODELS:
            bad.append(Violation(BAD_VALUE, ("disturbance_model",),
                                 f"must be one of {DISTURBANCE_MODELS}, got {self.disturbance_model!r}"))
        if self.disturbance_model == "fixed_table":
            t = self.fixed_table
            if t is None:
                bad.append(Violation(BAD_VALUE, ("fixed_table",), "fixed_table model needs a table"))
            else:
                t = np.asarray(t, dtype=np.float64)
                if t.ndim != 3 or (t < 0).any() or np.abs(t.sum(axis=-1) - 1.0).max() > 1e-9:
                    bad.append(Violation(BAD_VALUE, ("fixed_table",), "rows must be stochastic"))
                else:
                    object.__setattr__(self, "fixed_table", t)
        if bad:
            raise ValidationError(bad, context="RolloutSpec")


@dataclass(frozen=True)
class TrajectoryStats:
    """Per-stage mean and banded spread plus cumulative-cost moments.

    sigma_band / two_sigma_band are (h+1, 2) arrays of (low, high); the one
    sigma band is contained in the two sigma band at every stage by
    construction.
    """

    mean_state: np.ndarray
    sigma_band: np.ndarray
    two_sigma_band: np.ndarray
    mean_cost: float
    cost_std: float


@dataclass(frozen=True)
class TrajectoryStore:
    """Raw rollout output: state paths in memory or spilled to disk."""

    states: Optional[np.ndarray]  # (n_rollouts, h+1) int, None when spilled
    path: Optional[str]
    costs: np.ndarray  # (n_rollouts,) cumulative cost per rollout


def _stage_uniforms(spec: RolloutSpec, n_draws: int) -> np.ndarray:
    """Uniform draws, row i from the Philox stream keyed (seed, rollout i)."""
    out = np.empty((spec.n_rollouts, n_draws))
    for i in range(spec.n_rollouts):
        bits = np.random.Philox(key=np.array([spec.seed, i], dtype=np.uint64))
        out[i] = np.random.Generator(bits).random(n_draws)
    return out


def _sample_rows(cum_rows: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Inverse-CDF sample per row: smallest w with cum[w] > u."""
    idx = (cum_rows <= uniforms[:, None]).sum(axis=1)
    return np.minimum(idx, cum_rows.shape[1] - 1)


def rollout(
    sys: FiniteSystem,
    result: SolveResult,
    spec: RolloutSpec,
    state_map: Optional[np.ndarray] = None,
) -> tuple[TrajectoryStats, TrajectoryStore]:
    """Simulate the solved policy and aggregate per-stage statistics.

    The chain is x_{k+1} = f(x_k, mu_k(x_k), w_k) with w_k drawn from the
    requested model. Under the adversarial model, a gamma_e = 0 result has a
    deterministic worst-case table, so trajectories are deterministic given
    the initial state. state_map (n_states,) converts indices to physical
    units for the statistics.
    """
    if result.horizon != sys.horizon or result.values.shape[1] != sys.n_states:
        raise ModelMismatch("solve result does not match the system dimensions")
    model = spec.disturbance_model
    if model == "adversarial" and result.adversary is None and result.worst_index is None:
        raise ModelMismatch("adversarial model requested but the result carries no adversary")

    h, n = sys.horizon, sys.n_states
    n_rollouts = spec.n_rollouts
    init_is_dist = not isinstance(spec.initial_state, (int, np.integer))
    uniforms = _stage_uniforms(spec, h + (1 if init_is_dist else 0))

    if init_is_dist:
        p0 = np.asarray(spec.initial_state, dtype=np.float64)
        if p0.shape != (n,) or (p0 < 0).any() or abs(p0.sum() - 1.0) > 1e-9:
            raise ValidationError([Violation(BAD_VALUE, ("initial_state",), "must be an index or a stochastic vector")],
                                  context="RolloutSpec")
        cum0 = np.cumsum(p0)
        states0 = _sample_rows(np.broadcast_to(cum0, (n_rollouts, n)), uniforms[:, 0])
        stage_uniforms = uniforms[:, 1:]
    else:
        x0 = int(spec.initial_state)
        if not (0 <= x0 < n):
            raise ValidationError([Violation(BAD_VALUE, ("initial_state",), f"index {x0} outside [0, {n})")],
                                  context="RolloutSpec")
        states0 = np.full(n_rollouts, x0, dtype=np.int64)
        stage_uniforms = uniforms

    deterministic_adversary = model == "adversarial" and result.adversary is None

    paths = np.empty((n_rollouts, h + 1), dtype=np.int64)
    paths[:, 0] = states0
    costs = np.zeros(n_rollouts)
    for k in range(h):
        s = paths[:, k]
        u = result.policy[k, s]
        costs += sys.stage_cost[s, u]
        if deterministic_adversary:
            w = result.worst_index[k, s]
        else:
            if model == "empirical":
                cum = np.cumsum(sys.empirical_at(k), axis=-1)[s, u]
            elif model == "adversarial":
                cum = np.cumsum(result.adversary[k], axis=-1)[s]
            else:
                cum = np.cumsum(spec.fixed_table, axis=-1)[s, u]
            w = _sample_rows(cum, stage_uniforms[:, k])
        paths[:, k + 1] = sys.transition[s, u, w]
    costs += sys.terminal_cost[paths[:, h]]

    mapped = paths.astype(np.float64) if state_map is None else np.asarray(state_map, dtype=np.float64)[paths]
    mean = mapped.mean(axis=0)
    std = mapped.std(axis=0)
    stats = TrajectoryStats(
        mean_state=mean,
        sigma_band=np.stack([mean - std, mean + std], axis=1),
        two_sigma_band=np.stack([mean - 2.0 * std, mean + 2.0 * std], axis=1),
        mean_cost=float(costs.mean()),
        cost_std=float(costs.std()),
    )

    if paths.size > spec.spill_threshold:
        store = TrajectoryStore(states=None, path=_spill(paths, spec.spill_dir), costs=costs)
    else:
        store = TrajectoryStore(states=paths, path=None, costs=costs)
    return stats, store


def _spill(paths: np.ndarray, spill_dir: Optional[str]) -> str:
    fd, name = tempfile.mkstemp(suffix=".txt", prefix="trajectories-", dir=spill_dir)
    with os.fdopen(fd, "w") as fh:
        fh.write("rollout " + " ".join(f"x{k}" for k in range(paths.shape[1])) + "\n")
        for i, row in enumerate(paths):
            fh.write(f"{i} " + " ".join(str(int(v)) for v in row) + "\n")
    return name


def empirical_cost_estimate(
    sys: FiniteSystem, result: SolveResult, spec: RolloutSpec
) -> tuple[float, float]:
    """Monte-Carlo estimate of the cumulative cost under the spec's model.

    Returns (mean, standard error), std_error = sample std / sqrt(n).
    """
    _, store = rollout(sys, result, spec)
    n = spec.n_rollouts
    return float(store.costs.mean()), float(store.costs.std() / np.sqrt(n))


def write_stats(stats: TrajectoryStats, path: str) -> None:
    """Columnar text for external plotting: one row per stage."""
    lines = ["stage mean sigma_low sigma_high two_sigma_low two_sigma_high"]
    for k in range(stats.mean_state.shape[0]):
        vals = (stats.mean_state[k], stats.sigma_band[k, 0], stats.sigma_band[k, 1],
                stats.two_sigma_band[k, 0], stats.two_sigma_band[k, 1])
        lines.append(str(k) + " " + " ".join(f"{v:.12g}" for v in vals))
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)
