import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minsoftmax.core import FiniteSystem, Penalties
from minsoftmax.errors import AllAlphasInfinite, TemperatureZero
from minsoftmax.solver_finite import (
    alpha_row,
    q_value,
    softmax_adversary,
    solve_backward,
    solve_limit,
    worst_case_index,
)

from conftest import random_finite_system


def one_shot_system():
    """Single live state, two disturbances landing on terminal costs 0 and 1."""
    transition = np.zeros((2, 1, 2), dtype=np.int64)
    transition[0, 0] = [0, 1]
    transition[1, 0] = [1, 1]
    return FiniteSystem(
        transition=transition,
        stage_cost=np.zeros((2, 1)),
        terminal_cost=np.array([0.0, 1.0]),
        empirical=np.broadcast_to([0.5, 0.5], (2, 1, 2)).copy(),
        horizon=1,
    )


class TestAlphaRow:
    def test_zero_probability_excluded_when_gamma_h_positive(self):
        a = alpha_row(np.array([0.0, 1.0]), np.array([5.0, 5.0]), gamma_h=2.0)
        assert np.isneginf(a[0]) and a[1] == 5.0

    def test_gamma_h_zero_keeps_zero_probability_eligible(self):
        a = alpha_row(np.array([0.0, 1.0]), np.array([5.0, 7.0]), gamma_h=0.0)
        assert np.array_equal(a, [5.0, 7.0])


class TestQValue:
    def test_logsumexp_branch(self):
        assert q_value(np.array([0.0, 1.0]), Penalties(0.0, 1.0)) == pytest.approx(np.log(1 + np.e), abs=1e-12)

    def test_max_branch(self):
        assert q_value(np.array([0.0, 1.0]), Penalties(0.0, 0.0)) == 1.0

    def test_uniform_alpha_closed_form(self):
        assert q_value(np.array([5.0, 5.0, 5.0]), Penalties(0.0, 2.0)) == pytest.approx(5 + 2 * np.log(3), abs=1e-12)

    def test_neg_inf_entries_contribute_zero_mass(self):
        a = np.array([-np.inf, 0.0, 1.0])
        assert q_value(a, Penalties(1.0, 1.0)) == q_value(a[1:], Penalties(1.0, 1.0))

    def test_all_neg_inf_raises(self):
        with pytest.raises(AllAlphasInfinite):
            q_value(np.array([-np.inf, -np.inf]), Penalties(1.0, 1.0))
        with pytest.raises(AllAlphasInfinite):
            q_value(np.array([-np.inf]), Penalties(1.0, 0.0))

    def test_extreme_scale_does_not_overflow(self):
        a = np.array([1e4, -1e4])
        v = q_value(a, Penalties(0.0, 1e-6))
        assert np.isfinite(v) and v == pytest.approx(1e4)


class TestSoftmaxAdversary:
    def test_hand_example(self):
        a = alpha_row(np.array([0.5, 0.5]), np.array([0.0, 1.0]), 1.0)
        p = softmax_adversary(a, Penalties(1.0, 1.0))
        assert p == pytest.approx([1 / (1 + np.e), np.e / (1 + np.e)], abs=1e-12)

    def test_uniform_alpha_gives_uniform(self):
        p = softmax_adversary(np.full(5, 2.5), Penalties(0.0, 3.0))
        assert p == pytest.approx(np.full(5, 0.2), abs=1e-15)

    def test_high_temperature_near_uniform_and_matches_direct_formula(self):
        rng = np.random.default_rng(5)
        a = rng.uniform(-0.1, 0.1, 4)
        pen = Penalties(0.0, 100.0)
        p = softmax_adversary(a, pen)
        direct = np.exp(a / 100.0) / np.exp(a / 100.0).sum()
        assert p == pytest.approx(direct, abs=1e-14)
        assert np.abs(p - 0.25).max() < 1e-3

    def test_zero_probability_entries_exactly_zero(self):
        a = np.array([-np.inf, 0.0, 2.0])
        p = softmax_adversary(a, Penalties(1.0, 1.0))
        assert p[0] == 0.0 and p.sum() == pytest.approx(1.0, abs=1e-12)

    def test_temperature_zero_rejected(self):
        with pytest.raises(TemperatureZero):
            softmax_adversary(np.array([0.0, 1.0]), Penalties(1.0, 0.0))


class TestWorstCaseIndex:
    def test_tie_broken_low(self):
        assert worst_case_index(np.array([3.0, 7.0, 7.0])) == 1

    def test_pure_minimax_when_gamma_h_zero(self):
        a = alpha_row(np.array([0.9, 0.1]), np.array([0.0, 10.0]), 0.0)
        assert worst_case_index(a) == 1

    def test_most_likely_wins_at_huge_gamma_h(self):
        a = alpha_row(np.array([0.9, 0.1]), np.array([0.0, 1e6]), 1e9)
        assert worst_case_index(a) == 0


@settings(max_examples=200, deadline=None)
@given(
    alphas=st.lists(st.floats(min_value=-8.0, max_value=8.0), min_size=2, max_size=6),
    shift=st.floats(min_value=-8.0, max_value=8.0),
    gamma_e=st.floats(min_value=0.5, max_value=10.0),
)
def test_shift_invariance(alphas, shift, gamma_e):
    a = np.asarray(alphas)
    pen = Penalties(0.0, gamma_e)
    p0 = softmax_adversary(a, pen)
    p1 = softmax_adversary(a + shift, pen)
    assert np.abs(p0 - p1).max() <= 1e-14
    assert abs(q_value(a + shift, pen) - q_value(a, pen) - shift) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(
    alphas=st.lists(st.floats(min_value=-50.0, max_value=50.0), min_size=2, max_size=6),
    gamma_e=st.floats(min_value=1e-3, max_value=1e3),
    dead=st.integers(min_value=0, max_value=5),
)
def test_softmax_normalization_property(alphas, gamma_e, dead):
    a = np.asarray(alphas)
    a[: min(dead, a.shape[0] - 1)] = -np.inf
    p = softmax_adversary(a, Penalties(1.0, gamma_e))
    assert abs(p.sum() - 1.0) <= 1e-12
    assert (p[np.isneginf(a)] == 0.0).all()


class TestSolveBackward:
    def test_one_shot_values_across_regimes(self):
        sys_ = one_shot_system()
        assert solve_backward(sys_, Penalties(1.0, 1.0)).values[0, 0] == pytest.approx(
            np.log(0.5 + 0.5 * np.e), abs=1e-12
        )
        assert solve_backward(sys_, Penalties(1e6, 1e6)).values[0, 0] == pytest.approx(0.5, abs=1e-5)
        assert solve_backward(sys_, Penalties(0.0, 0.0)).values[0, 0] == 1.0

    def test_terminal_row_is_exact_copy(self, rng):
        sys_ = random_finite_system(rng)
        res = solve_backward(sys_, Penalties(1.0, 2.0))
        assert np.array_equal(res.values[-1], sys_.terminal_cost)

    def test_adversary_rows_normalized(self, rng):
        sys_ = random_finite_system(rng, zero_fraction=0.3)
        res = solve_backward(sys_, Penalties(2.0, 0.7))
        sums = res.adversary.sum(axis=-1)
        assert np.abs(sums - 1.0).max() <= 1e-12

    def test_max_branch_records_worst_indices(self, rng):
        sys_ = random_finite_system(rng)
        res = solve_backward(sys_, Penalties(1.0, 0.0))
        assert res.adversary is None and res.worst_index is not None
        k, x = 1, 2
        u = res.policy[k, x]
        a = alpha_row(sys_.empirical_at(k)[x, u], res.values[k + 1][sys_.transition[x, u]], 1.0)
        assert res.worst_index[k, x] == worst_case_index(a)

    def test_keep_all_inputs_tables(self, rng):
        sys_ = random_finite_system(rng)
        res = solve_backward(sys_, Penalties(1.0, 1.0), keep_all_inputs=True)
        assert res.adversary_all.shape == (sys_.horizon, sys_.n_states, sys_.n_inputs, sys_.n_dist)
        xs = np.arange(sys_.n_states)
        for k in range(sys_.horizon):
            chosen = res.adversary_all[k][xs, res.policy[k]]
            assert np.abs(chosen - res.adversary[k]).max() <= 1e-15

    def test_stage_dependent_empirical_used_per_stage(self, rng):
        base = random_finite_system(rng, horizon=2)
        r0 = base.empirical_at(0)
        r1 = np.roll(r0, 1, axis=-1)
        sys_ = FiniteSystem(base.transition, base.stage_cost, base.terminal_cost, np.stack([r0, r1]), 2)
        res = solve_backward(sys_, Penalties(1.0, 1.0))
        flat = FiniteSystem(base.transition, base.stage_cost, base.terminal_cost, r0, 2)
        res_flat = solve_backward(flat, Penalties(1.0, 1.0))
        assert not np.allclose(res.values[0], res_flat.values[0])


class TestSolveLimit:
    def test_one_shot_examples(self):
        sys_ = one_shot_system()
        assert solve_limit(sys_, "sdp").values[0, 0] == 0.5
        assert solve_limit(sys_, "risk_sensitive", gamma=1.0).values[0, 0] == pytest.approx(
            np.log(0.5 + 0.5 * np.e), abs=1e-12
        )
        assert solve_limit(sys_, "minimax").values[0, 0] == 1.0

    def test_risk_sensitive_needs_positive_gamma(self):
        with pytest.raises(Exception):
            solve_limit(one_shot_system(), "risk_sensitive")

    def test_exact_regime_agreement(self, rng):
        for _ in range(10):
            sys_ = random_finite_system(rng, n_x=6, n_u=3, n_w=4, horizon=4)
            for t in (0.5, 1.0, 2.0):
                back = solve_backward(sys_, Penalties(t, t))
                lim = solve_limit(sys_, "risk_sensitive", gamma=1.0 / t)
                assert np.abs(back.values - lim.values).max() <= 1e-10

    def test_minimax_corner_exact(self, rng):
        for _ in range(10):
            sys_ = random_finite_system(rng)
            back = solve_backward(sys_, Penalties(0.0, 0.0))
            lim = solve_limit(sys_, "minimax")
            assert np.array_equal(back.values, lim.values)
            assert np.array_equal(back.policy, lim.policy)

    def test_sdp_limit_convergence_trend(self, rng):
        sys_ = random_finite_system(rng, n_x=6, n_w=5)
        lim = solve_limit(sys_, "sdp")
        errs = [np.abs(solve_backward(sys_, Penalties(t, t)).values - lim.values).max()
                for t in (1e2, 1e4, 1e6)]
        assert errs[2] <= 1e-4
        assert errs[0] > errs[1] > errs[2]

    def test_ml_ce_policy_match_with_unique_modes(self, rng):
        # The certainty-equivalence limit needs one empirical row shared by
        # every (x, u): with per-state rows the accumulated modal
        # log-likelihoods enter the value function at gamma_h scale and the
        # adversary stops picking the per-row mode.
        for _ in range(10):
            sys_ = random_finite_system(rng, shared_empirical=True, unique_mode=True)
            back = solve_backward(sys_, Penalties(1e9, 0.0))
            lim = solve_limit(sys_, "ml_ce")
            assert np.array_equal(back.policy, lim.policy)


class TestMonotonicity:
    GRID = (0.0, 1.0, 10.0, 100.0)

    def test_value_monotone_in_penalties(self, rng):
        for _ in range(10):
            sys_ = random_finite_system(rng, n_x=6)
            j0 = {
                (gh, ge): solve_backward(sys_, Penalties(gh, ge)).values[0]
                for gh in self.GRID for ge in self.GRID
            }
            for ge in self.GRID:
                for lo, hi in zip(self.GRID, self.GRID[1:]):
                    assert (j0[(hi, ge)] <= j0[(lo, ge)] + 1e-9).all()
            for gh in self.GRID:
                for lo, hi in zip(self.GRID, self.GRID[1:]):
                    assert (j0[(gh, hi)] >= j0[(gh, lo)] - 1e-9).all()
