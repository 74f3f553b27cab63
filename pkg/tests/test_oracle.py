import numpy as np
import pytest

from minsoftmax.core import Penalties
from minsoftmax.errors import DimensionTooLarge, DivergentIntegrand, SupportViolation
from minsoftmax.lq_gauss import f_a
from minsoftmax.oracle import (
    gaussian_quadrature_q,
    regularized_objective,
    simplex_search,
)
from minsoftmax.scenarios import scalar_lq_benchmark
from minsoftmax.solver_finite import alpha_row, q_value


class TestRegularizedObjective:
    def test_kl_term_vanishes_at_p_equals_r(self):
        r = np.array([0.2, 0.3, 0.5])
        j = np.array([1.0, -2.0, 4.0])
        # equal weights turn the regularizer into -gamma*KL(p||r), zero at p=r
        val = regularized_objective(r, r, j, Penalties(3.0, 3.0))
        assert val == pytest.approx(float(r @ j), abs=1e-12)

    def test_point_mass_hand_value(self):
        val = regularized_objective([1.0, 0.0], [0.5, 0.5], [0.0, 1.0], Penalties(1.0, 0.0))
        assert val == pytest.approx(np.log(0.5), abs=1e-12)

    def test_entropy_only_hand_value(self):
        val = regularized_objective([0.5, 0.5], [0.5, 0.5], [0.0, 1.0], Penalties(0.0, 1.0))
        assert val == pytest.approx(0.5 + np.log(2), abs=1e-12)

    def test_support_violation(self):
        with pytest.raises(SupportViolation):
            regularized_objective([0.5, 0.5], [1.0, 0.0], [0.0, 0.0], Penalties(1.0, 0.0))
        # gamma_h = 0 ignores the support
        regularized_objective([0.5, 0.5], [1.0, 0.0], [0.0, 0.0], Penalties(0.0, 1.0))

    def test_vertex_evaluable_with_zero_log_zero(self):
        val = regularized_objective([0.0, 1.0], [0.5, 0.5], [3.0, 7.0], Penalties(0.0, 2.0))
        assert val == pytest.approx(7.0, abs=1e-12)


class TestSimplexSearch:
    def test_matches_closed_form_two_atoms(self):
        r = np.array([0.5, 0.5])
        j = np.array([0.0, 1.0])
        pen = Penalties(1.0, 1.0)
        p, best = simplex_search(r, j, pen, 0.001)
        assert best == pytest.approx(np.log(0.5 + 0.5 * np.e), abs=1e-3)
        assert p == pytest.approx([1 / (1 + np.e), np.e / (1 + np.e)], abs=2e-3)

    def test_unregularized_optimum_is_vertex(self):
        p, best = simplex_search(np.array([0.6, 0.4]), np.array([2.0, 5.0]), Penalties(0.0, 0.0), 0.01)
        assert np.array_equal(p, [0.0, 1.0]) and best == 5.0

    def test_max_entropy_case(self):
        p, best = simplex_search(np.array([0.9, 0.1]), np.zeros(2), Penalties(0.0, 1.0), 0.001)
        assert p == pytest.approx([0.5, 0.5], abs=1e-3)
        assert best == pytest.approx(np.log(2), abs=1e-6)

    def test_never_exceeds_closed_form_and_gets_close(self, rng):
        worst_gap, worst_over = 0.0, 0.0
        for _ in range(25):
            r = rng.dirichlet(np.ones(3))
            j = rng.uniform(-10, 10, 3)
            for gh, ge in ((0.5, 0.5), (5.0, 1.0), (1.0, 5.0)):
                pen = Penalties(gh, ge)
                q = q_value(alpha_row(r, j, gh), pen)
                _, best = simplex_search(r, j, pen, 0.001)
                worst_over = max(worst_over, best - q)
                worst_gap = max(worst_gap, q - best)
        assert worst_over <= 1e-9
        assert worst_gap <= 1e-3

    def test_respects_empirical_support(self):
        r = np.array([0.0, 0.4, 0.6])
        j = np.array([100.0, 0.0, 1.0])
        p, _ = simplex_search(r, j, Penalties(2.0, 1.0), 0.01)
        assert p[0] == 0.0

    def test_dimension_cap(self):
        with pytest.raises(DimensionTooLarge):
            simplex_search(np.full(5, 0.2), np.zeros(5), Penalties(1.0, 1.0), 0.1)

    def test_bad_step_rejected(self):
        with pytest.raises(ValueError):
            simplex_search(np.array([0.5, 0.5]), np.zeros(2), Penalties(1.0, 1.0), 0.7)


class TestGaussianQuadrature:
    def setup_method(self):
        self.lq = scalar_lq_benchmark(horizon=1)
        self.pen = Penalties(4.0, 1.0)
        self.p_next = np.array([[1.0]])

    def closed_form(self, x, u, zeta_next=0.0):
        xi = x + u
        inflated = f_a(self.p_next, self.lq, self.pen.gamma_h)[0, 0]
        m = self.pen.gamma_h - 2.0
        zeta_inc = (self.pen.gamma_e - self.pen.gamma_h) * 0.5 * np.log(2 * np.pi) \
            - 0.5 * self.pen.gamma_e * np.log(m / self.pen.gamma_e)
        return inflated * xi * xi + zeta_inc + zeta_next

    def test_benchmark_point_matches_closed_form(self):
        q = gaussian_quadrature_q(self.lq, self.p_next, 0.0, [1.0], [0.0], self.pen)
        assert q == pytest.approx(self.closed_form(1.0, 0.0), abs=1e-6)

    def test_origin_gives_offset_increment_alone(self):
        q = gaussian_quadrature_q(self.lq, self.p_next, 0.0, [0.0], [0.0], self.pen)
        assert q == pytest.approx(self.closed_form(0.0, 0.0), abs=1e-9)

    def test_zeta_next_carried_through(self):
        q = gaussian_quadrature_q(self.lq, self.p_next, 2.5, [1.0], [1.0], self.pen)
        assert q == pytest.approx(self.closed_form(1.0, 1.0, zeta_next=2.5), abs=1e-6)

    def test_divergent_integrand_below_critical(self):
        with pytest.raises(DivergentIntegrand):
            gaussian_quadrature_q(self.lq, self.p_next, 0.0, [1.0], [0.0], Penalties(1.0, 1.0))

    def test_convergence_rate_in_points(self):
        # The trapezoid rule is spectrally accurate on these decayed
        # integrands; at 1e4 points the error already sits at the
        # double-precision floor, so the rate is only resolvable on coarse
        # grids. Doubling a coarse grid must still cut the error >= 3x.
        exact = self.closed_form(1.0, 0.0)

        def err(n):
            return abs(gaussian_quadrature_q(self.lq, self.p_next, 0.0, [1.0], [0.0], self.pen,
                                             half_width=12.0, n_points=n) - exact)

        assert err(40) / err(80) >= 3.0
        assert err(10_000) <= 1e-9
