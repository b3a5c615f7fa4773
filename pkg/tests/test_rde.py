import math
from fractions import Fraction

import numpy as np
import pytest

from weierpath import (
    BilinearField,
    ParameterError,
    PathSample,
    RdeProblem,
    ScalarLinearField,
    TruncationPolicy,
    VectorWeierstrass,
    ZeroField,
    approximation_gap,
    default_ode_step,
    eval_truncated,
    solve_ode_truncated,
    solve_rough,
    validate_component,
)
import weierpath.rde as rde_mod


@pytest.fixture(scope="module")
def fig_problem(figure_pair):
    return RdeProblem(BilinearField(), figure_pair, np.array([1.0, 0.0]))


class TestProblemValidation:
    def test_dimension_mismatch(self, figure_pair):
        with pytest.raises(ParameterError, match="dimensions"):
            RdeProblem(BilinearField(), figure_pair, np.array([1.0, 0.0, 0.0]))

    def test_step_bounds(self, figure_pair):
        with pytest.raises(ParameterError, match="step"):
            RdeProblem(BilinearField(), figure_pair, np.array([1.0, 0.0]), step=Fraction(2))

    def test_t_end_range(self, figure_pair):
        with pytest.raises(ParameterError):
            RdeProblem(BilinearField(), figure_pair, np.array([1.0, 0.0]), t_end=Fraction(0))

    def test_path_sample_invariants(self):
        with pytest.raises(ParameterError, match="increase"):
            PathSample(np.array([0.0, 0.5, 0.5]), np.zeros((3, 2)))
        with pytest.raises(ParameterError, match="align"):
            PathSample(np.array([0.0, 0.5]), np.zeros((3, 2)))


class TestBilinearField:
    def test_matrix_shape(self):
        f = BilinearField()
        m = f.matrix(np.array([2.0, 3.0]))
        assert np.array_equal(m, np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_jacobians_constant(self):
        f = BilinearField()
        jac = f.jacobian(np.array([5.0, -1.0]))
        assert np.array_equal(jac[0], np.array([[0.0, 0.0], [0.5, 0.0]]))
        assert np.array_equal(jac[1], np.array([[0.0, 1 / 3], [0.0, 0.0]]))


class TestOdeSolver:
    def test_zero_field_constant(self, figure_pair):
        p = RdeProblem(ZeroField(2), figure_pair, np.array([1.0, 0.0]))
        path = solve_ode_truncated(p, 4, output_points=33)
        assert np.max(np.abs(path.values - np.array([1.0, 0.0]))) == 0.0

    def test_manufactured_single_cosine_order_four(self, comp_b2):
        # one cosine per component: dY = M(Y) d cos(pi t) has the closed
        # solution exp(A (cos(pi t) - 1)) y0 with A^2 = I/6
        v = VectorWeierstrass([comp_b2, comp_b2])
        y0 = np.array([1.0, 0.0])
        A = np.array([[0.0, 1 / 3], [0.5, 0.0]])
        lam = 1 / math.sqrt(6)

        def exact(t):
            u = math.cos(math.pi * t) - 1.0
            return (math.cosh(lam * u) * np.eye(2) + math.sinh(lam * u) / lam * A) @ y0

        errs = []
        for k in (7, 8, 9):
            p = RdeProblem(BilinearField(), v, y0, step=Fraction(1, 2**k))
            path = solve_ode_truncated(p, 0, output_points=65)
            ref = np.array([exact(t) for t in path.times])
            errs.append(np.max(np.abs(path.values - ref)))
        assert errs[0] / errs[1] == pytest.approx(16.0, rel=0.3)
        assert errs[1] / errs[2] == pytest.approx(16.0, rel=0.3)

    def test_richardson_order_check_on_truncated_driver(self, fig_problem):
        paths = {}
        for k in (11, 12, 13):
            p = RdeProblem(BilinearField(), fig_problem.driver, fig_problem.y0,
                           step=Fraction(1, 2**k))
            paths[k] = solve_ode_truncated(p, 4, output_points=513)
        d1 = np.max(np.abs(paths[11].values - paths[12].values))
        d2 = np.max(np.abs(paths[12].values - paths[13].values))
        assert d1 / d2 == pytest.approx(16.0, rel=0.3)

    def test_step_guard_prescribes_bound(self, figure_pair):
        p = RdeProblem(BilinearField(), figure_pair, np.array([1.0, 0.0]),
                       step=Fraction(1, 64))
        with pytest.raises(ParameterError, match="decrease step"):
            solve_ode_truncated(p, 8)

    def test_propagator_matches_plain_loop(self, fig_problem):
        p = RdeProblem(BilinearField(), fig_problem.driver, fig_problem.y0,
                       step=Fraction(1, 2**13))
        fast = solve_ode_truncated(p, 3, output_points=65)
        old = rde_mod._PROPAGATOR_MIN_STEPS
        rde_mod._PROPAGATOR_MIN_STEPS = 10**9
        try:
            slow = solve_ode_truncated(p, 3, output_points=65)
        finally:
            rde_mod._PROPAGATOR_MIN_STEPS = old
        assert np.max(np.abs(fast.values - slow.values)) <= 1e-12

    def test_default_step_resolves_fastest_mode(self, figure_pair):
        for N in (4, 8, 12):
            h = default_ode_step(figure_pair, N)
            assert float(h) * 3.0**N <= 0.1
            assert h.numerator == 1 and (h.denominator & (h.denominator - 1)) == 0

    def test_dense_output_grid(self, fig_problem):
        path = solve_ode_truncated(fig_problem, 4, output_points=129)
        assert path.times[0] == 0.0 and path.times[-1] == 1.0
        assert path.times.size == 129
        assert np.allclose(np.diff(path.times), 1 / 128)


class TestRoughSolver:
    def test_euler_reduction_for_zero_second_level(self):
        # constant-speed smooth driver: rough step = Euler + half-square
        # correction; with the zero field nothing moves at all
        c = validate_component(2, a="18/25")
        v = VectorWeierstrass([c])
        p = RdeProblem(ZeroField(1), v, np.array([2.5]))
        path = solve_rough(p, 4, step=Fraction(1, 64), output_points=17)
        assert np.max(np.abs(path.values - 2.5)) == 0.0

    def test_chain_rule_solution_scalar(self, comp_b2):
        # dY = Y dW has solution y0 exp(W_N(t) - W_N(0)) for smooth drivers
        v = VectorWeierstrass([comp_b2])
        p = RdeProblem(ScalarLinearField(), v, np.array([1.0]))
        errs = []
        for k in (8, 9):
            path = solve_rough(p, 3, step=Fraction(1, 2**k), output_points=257)
            exact = np.array([
                math.exp(
                    eval_truncated(comp_b2, 3, Fraction(i, 256)) - eval_truncated(comp_b2, 3, 0)
                )
                for i in range(257)
            ])
            errs.append(np.max(np.abs(path.values[:, 0] - exact)))
        assert errs[1] <= errs[0] / 1.8  # at least first order in the step
        assert errs[0] <= 5e-3

    def test_gap_to_ode_shrinks_when_halving(self, fig_problem):
        ref = solve_ode_truncated(
            RdeProblem(BilinearField(), fig_problem.driver, fig_problem.y0,
                       step=Fraction(1, 2**14)),
            4, output_points=257,
        )
        gaps = []
        for k in (8, 9, 10, 11):
            rough = solve_rough(fig_problem, 4, step=Fraction(1, 2**k), output_points=257)
            gaps.append(np.max(np.abs(rough.values - ref.values)))
        for lo, hi in zip(gaps[1:], gaps[:-1]):
            assert hi / lo >= 1.8

    def test_limit_lift_self_convergence(self, fig_problem):
        pol = TruncationPolicy.tolerance(1e-6, 0.1)
        paths = {
            k: solve_rough(fig_problem, pol, step=Fraction(1, 2**k), output_points=129)
            for k in (11, 12, 13)
        }
        g1 = np.max(np.abs(paths[11].values - paths[12].values))
        g2 = np.max(np.abs(paths[12].values - paths[13].values))
        # successive gaps shrink roughly like the step; allow a wide band
        assert g2 <= 10.0 * 0.5 * g1
        # regression baseline computed by this implementation (not external truth)
        endpoint = paths[13].values[-1]
        assert endpoint == pytest.approx([3.381153206554035, 0.7303091898054921], rel=1e-6)

    def test_lift_table_matches_direct_lift(self, fig_problem):
        from weierpath.rde import _lift_table
        from weierpath import lift_truncated

        h = Fraction(1, 32)
        first, second = _lift_table(fig_problem.driver, 5, h, 32)
        for k in (0, 7, 31):
            inc = lift_truncated(fig_problem.driver, 5, h * k, h * (k + 1))
            assert np.allclose(first[k], inc.first, atol=1e-13)
            assert np.allclose(second[k], inc.second, atol=1e-13)


class TestApproximationGap:
    def test_single_level_empty(self, fig_problem):
        assert approximation_gap(fig_problem, [4]) == []

    def test_zero_field_all_zero(self, figure_pair):
        p = RdeProblem(ZeroField(2), figure_pair, np.array([1.0, 0.0]))
        rows = approximation_gap(p, [2, 4, 6], output_points=65)
        assert all(gap == 0.0 for (_, _, gap) in rows)

    def test_gaps_decrease_with_level(self, fig_problem):
        rows = approximation_gap(fig_problem, [2, 4, 6], output_points=257)
        assert rows[0][2] > rows[1][2] > 0
