import numpy as np
import pytest

from minsoftmax.core import FiniteSystem


def random_finite_system(
    rng,
    n_x=5,
    n_u=3,
    n_w=4,
    horizon=4,
    cost_scale=1.0,
    shared_empirical=False,
    unique_mode=False,
    zero_fraction=0.0,
):
    """Garnet-style random instance with controllable empirical structure.

    shared_empirical uses one disturbance row for every (x, u), the shape
    the certainty-equivalence limit assumes; unique_mode guarantees a
    strict modal disturbance per row; zero_fraction knocks out that share
    of entries (keeping at least one alive per row).
    """
    transition = rng.integers(0, n_x, size=(n_x, n_u, n_w))
    stage_cost = cost_scale * rng.uniform(0.0, 1.0, size=(n_x, n_u))
    terminal = cost_scale * rng.uniform(0.0, 1.0, size=n_x)

    lead = () if shared_empirical else (n_x, n_u)
    rows = rng.dirichlet(np.ones(n_w), size=lead if lead else 1)
    if not lead:
        rows = rows[0]
    if zero_fraction > 0.0:
        kill = rng.random(rows.shape) < zero_fraction
        keep = rng.integers(0, n_w, size=lead if lead else None)
        kill[(*np.indices(lead),) + (keep,)] = False
        rows = np.where(kill, 0.0, rows)
        rows = rows / rows.sum(axis=-1, keepdims=True)
    if unique_mode:
        top = rows.argmax(axis=-1)
        bump = np.zeros_like(rows)
        bump[(*np.indices(lead),) + (top,)] = 0.25
        rows = (rows + bump) / (rows + bump).sum(axis=-1, keepdims=True)
    empirical = np.broadcast_to(rows, (n_x, n_u, n_w)).copy() if shared_empirical else rows
    return FiniteSystem(transition, stage_cost, terminal, empirical, horizon)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
