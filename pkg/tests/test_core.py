import numpy as np
import pytest

from minsoftmax.core import FiniteSystem, LqSystem, Penalties, RiccatiConfig
from minsoftmax.errors import (
    NON_FINITE_COST,
    NON_STOCHASTIC_ROW,
    OUT_OF_RANGE_TRANSITION,
    ValidationError,
)

from conftest import random_finite_system


def two_state_tables():
    transition = np.zeros((2, 1, 2), dtype=np.int64)
    transition[0, 0] = [0, 1]
    transition[1, 0] = [1, 1]
    stage_cost = np.zeros((2, 1))
    terminal = np.array([0.0, 1.0])
    empirical = np.broadcast_to([0.5, 0.5], (2, 1, 2)).copy()
    return transition, stage_cost, terminal, empirical


def test_valid_uniform_system_constructs():
    tr, g, gh, emp = two_state_tables()
    sys_ = FiniteSystem(tr, g, gh, emp, 1)
    assert sys_.n_states == 2 and sys_.n_inputs == 1 and sys_.n_dist == 2
    assert not sys_.stage_dependent_empirical


def test_non_stochastic_row_reported_with_indices():
    tr, g, gh, emp = two_state_tables()
    emp[0, 0] = [0.5, 0.6]
    with pytest.raises(ValidationError) as exc:
        FiniteSystem(tr, g, gh, emp, 1)
    kinds = {(v.kind, v.where) for v in exc.value.violations}
    assert (NON_STOCHASTIC_ROW, (0, 0)) in kinds


def test_out_of_range_transition_reported():
    tr, g, gh, emp = two_state_tables()
    tr = tr.copy()
    tr[0, 0, 1] = 2  # == n_states
    with pytest.raises(ValidationError) as exc:
        FiniteSystem(tr, g, gh, emp, 1)
    assert any(v.kind == OUT_OF_RANGE_TRANSITION and v.where == (0, 0, 1) for v in exc.value.violations)


def test_non_finite_cost_reported():
    tr, g, gh, emp = two_state_tables()
    g = g.copy()
    g[1, 0] = np.inf
    with pytest.raises(ValidationError) as exc:
        FiniteSystem(tr, g, gh, emp, 1)
    assert any(v.kind == NON_FINITE_COST for v in exc.value.violations)


def test_all_violations_reported_at_once():
    tr, g, gh, emp = two_state_tables()
    tr = tr.copy(); tr[0, 0, 0] = -1
    g = g.copy(); g[0, 0] = np.nan
    emp = emp.copy(); emp[1, 0] = [0.2, 0.2]
    with pytest.raises(ValidationError) as exc:
        FiniteSystem(tr, g, gh, emp, 1)
    kinds = {v.kind for v in exc.value.violations}
    assert {OUT_OF_RANGE_TRANSITION, NON_FINITE_COST, NON_STOCHASTIC_ROW} <= kinds


def test_rows_renormalized_exactly():
    tr, g, gh, emp = two_state_tables()
    emp[0, 0] = [0.5 + 4e-13, 0.5]  # inside tolerance, off exact 1
    sys_ = FiniteSystem(tr, g, gh, emp, 1)
    assert sys_.empirical.sum(axis=-1).max() == 1.0
    assert sys_.empirical.sum(axis=-1).min() == 1.0


def test_arrays_frozen_after_construction(rng):
    sys_ = random_finite_system(rng)
    with pytest.raises(ValueError):
        sys_.transition[0, 0, 0] = 0
    with pytest.raises(ValueError):
        sys_.empirical[0, 0, 0] = 0.3


def test_per_stage_empirical_accepted(rng):
    base = random_finite_system(rng, horizon=3)
    per_stage = np.stack([base.empirical_at(0)] * 3)
    sys_ = FiniteSystem(base.transition, base.stage_cost, base.terminal_cost, per_stage, 3)
    assert sys_.stage_dependent_empirical
    assert sys_.empirical_at(2).shape == (5, 3, 4)


def test_per_stage_empirical_wrong_horizon_rejected(rng):
    base = random_finite_system(rng, horizon=3)
    per_stage = np.stack([base.empirical_at(0)] * 2)
    with pytest.raises(ValidationError):
        FiniteSystem(base.transition, base.stage_cost, base.terminal_cost, per_stage, 3)


def test_penalties_validation_and_temperature_floor():
    assert Penalties(1.0, 5e-13).gamma_e == 0.0
    assert Penalties(1.0, 5e-13).max_branch
    assert Penalties(0.0, 1.0).gamma_e == 1.0
    for bad in ((-1.0, 0.0), (0.0, -2.0), (np.nan, 1.0)):
        with pytest.raises(ValidationError):
            Penalties(*bad)


def test_lq_system_validation():
    one = [[1.0]]
    lq = LqSystem(a=one, b=one, d=one, q=one, r=one, q_h=one, horizon=2)
    assert lq.n_states == lq.n_inputs == lq.n_dist == 1

    with pytest.raises(ValidationError):  # non-symmetric Q
        LqSystem(a=np.eye(2), b=np.eye(2), d=np.eye(2),
                 q=[[1.0, 0.3], [0.0, 1.0]], r=np.eye(2), q_h=np.eye(2), horizon=1)
    with pytest.raises(ValidationError):  # R not PD
        LqSystem(a=one, b=one, d=one, q=one, r=[[0.0]], q_h=one, horizon=1)
    with pytest.raises(ValidationError):  # Q not PSD
        LqSystem(a=one, b=one, d=one, q=[[-1.0]], r=one, q_h=one, horizon=1)
    with pytest.raises(ValidationError):  # inconsistent shapes
        LqSystem(a=np.eye(2), b=one, d=one, q=one, r=one, q_h=one, horizon=1)


def test_lq_infinite_horizon_marker():
    one = [[1.0]]
    assert LqSystem(a=one, b=one, d=one, q=one, r=one, q_h=one, horizon=None).horizon is None
    with pytest.raises(ValidationError):
        LqSystem(a=one, b=one, d=one, q=one, r=one, q_h=one, horizon=0)


def test_riccati_config_rejects_nonpositive():
    RiccatiConfig()
    with pytest.raises(ValidationError):
        RiccatiConfig(fixed_point_tol=0.0)
