from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from weierpath import (
    ParameterError,
    ToleranceUnreachable,
    TruncationPolicy,
    VectorWeierstrass,
    area_holder_sup,
    chen_residual,
    convergence_report,
    levy_area,
    lift_limit,
    lift_truncated,
    polyline_signed_area,
    rough_norm,
    validate_component,
)
from weierpath.phase import TrigTable
from weierpath.weierstrass import eval_truncated_grid, eval_vector


class TestLiftTruncated:
    def test_empty_interval_zeros(self, figure_pair):
        inc = lift_truncated(figure_pair, 5, Fraction(1, 3), Fraction(1, 3))
        assert np.all(inc.first == 0.0) and np.all(inc.second == 0.0)

    def test_first_level_is_vector_increment(self, figure_pair):
        s, t = Fraction(1, 7), Fraction(6, 7)
        inc = lift_truncated(figure_pair, 8, s, t)
        want = eval_vector(figure_pair, 8, t) - eval_vector(figure_pair, 8, s)
        assert np.array_equal(inc.first, want)

    def test_scalar_diagonal_is_half_square(self, comp_b2):
        v1 = VectorWeierstrass([comp_b2])
        inc = lift_truncated(v1, 8, 0, Fraction(3, 5))
        assert inc.second[0, 0] == pytest.approx(0.5 * inc.first[0] ** 2, abs=1e-10)

    def test_symmetric_part_outer_product(self, figure_pair):
        inc = lift_truncated(figure_pair, 8, 0, 1)
        sym = inc.second + inc.second.T - np.outer(inc.first, inc.first)
        assert np.abs(sym).max() <= 1e-10

    def test_increment_is_immutable(self, figure_pair):
        inc = lift_truncated(figure_pair, 3, 0, 1)
        with pytest.raises(ValueError):
            inc.first[0] = 0.0


class TestLiftLimit:
    def test_empty_interval(self, figure_pair):
        pol = TruncationPolicy.tolerance(1e-6, 0.1)
        inc = lift_limit(figure_pair, pol, Fraction(2, 5), Fraction(2, 5))
        assert np.all(inc.first == 0.0) and np.all(inc.second == 0.0)

    def test_against_deep_truncation(self, figure_pair):
        pol = TruncationPolicy.tolerance(1e-7, 0.1)
        inc = lift_limit(figure_pair, pol, 0, 1)
        deep = lift_truncated(figure_pair, 60, 0, 1)
        assert np.abs(inc.second - deep.second).max() <= 1e-6
        assert np.abs(inc.first - deep.first).max() <= 1e-9

    def test_identical_components_reduce_to_scalar_case(self, comp_b2):
        v = VectorWeierstrass([comp_b2, comp_b2])
        pol = TruncationPolicy.tolerance(1e-8, 0.1)
        inc = lift_limit(v, pol, 0, Fraction(1, 2))
        half_sq = 0.5 * inc.first[0] ** 2
        assert inc.second[0, 1] == pytest.approx(half_sq, abs=1e-8)
        assert inc.second[1, 0] == pytest.approx(half_sq, abs=1e-8)

    def test_low_exponent_rejected_by_name(self, comp_b2):
        rough = validate_component(2, alpha=0.25)
        v = VectorWeierstrass([comp_b2, rough])
        with pytest.raises(ParameterError, match="component 1"):
            lift_limit(v, TruncationPolicy.tolerance(1e-6, 0.1), 0, 1)

    def test_fixed_policy_delegates(self, figure_pair):
        inc_pol = lift_limit(figure_pair, TruncationPolicy.fixed(6), 0, Fraction(1, 2))
        inc_dir = lift_truncated(figure_pair, 6, 0, Fraction(1, 2))
        assert np.array_equal(inc_pol.second, inc_dir.second)

    def test_unreachable_tolerance_propagates(self, figure_pair):
        with pytest.raises(ToleranceUnreachable):
            lift_limit(figure_pair, TruncationPolicy.tolerance(1e-30, 0.1), 0, 1)


class TestChen:
    def test_degenerate_midpoint_exact_zero(self, figure_pair):
        for u in (Fraction(0), Fraction(1)):
            res = chen_residual(figure_pair, 10, 0, u, 1)
            assert np.all(res == 0.0)

    def test_interior_midpoint(self, figure_pair):
        res = chen_residual(figure_pair, 10, 0, Fraction(1, 3), 1)
        assert np.abs(res).max() <= 1e-10

    def test_ordering_rejected(self, figure_pair):
        with pytest.raises(ParameterError, match="s <= u <= t"):
            chen_residual(figure_pair, 5, 0, Fraction(3, 4), Fraction(1, 2))

    @given(
        triple=st.tuples(
            st.fractions(min_value=0, max_value=1, max_denominator=512),
            st.fractions(min_value=0, max_value=1, max_denominator=512),
            st.fractions(min_value=0, max_value=1, max_denominator=512),
        ),
        N=st.integers(0, 12),
    )
    def test_random_rational_triples(self, figure_pair, triple, N):
        s, u, t = sorted(triple)
        res = chen_residual(figure_pair, N, s, u, t)
        assert np.abs(res).max() <= 1e-9


class TestLevyArea:
    def test_diagonal_zero(self, figure_pair):
        inc = lift_truncated(figure_pair, 6, 0, 1)
        assert levy_area(inc, 0, 0) == 0.0

    def test_equal_components_zero(self, comp_b2):
        v = VectorWeierstrass([comp_b2, comp_b2])
        inc = lift_truncated(v, 8, 0, Fraction(2, 3))
        assert abs(levy_area(inc, 0, 1)) <= 1e-10

    def test_index_validation(self, figure_pair):
        inc = lift_truncated(figure_pair, 3, 0, 1)
        with pytest.raises(ParameterError, match="indices"):
            levy_area(inc, 0, 2)

    def test_green_stokes_shoelace_oracle(self, figure_pair, comp_b2, comp_b3):
        # antisymmetric part = closed-curve shoelace area times two
        inc = lift_truncated(figure_pair, 8, 0, 1)
        la = levy_area(inc, 0, 1)
        den = 1 << 18
        table = TrigTable(den)
        idx = np.arange(den + 1, dtype=np.int64)
        x = eval_truncated_grid(comp_b2, 8, table, idx)
        y = eval_truncated_grid(comp_b3, 8, table, idx)
        area = polyline_signed_area(x, y)
        assert abs(la - 2 * area) <= 1e-6 * (1 + abs(la))


class TestRoughNorm:
    def test_alpha_range_enforced(self, figure_pair):
        with pytest.raises(ParameterError, match="alpha"):
            rough_norm(figure_pair, 10, 0.5, 8)
        with pytest.raises(ParameterError, match="alpha"):
            rough_norm(figure_pair, 10, 0.2, 8)

    def test_depth_guard(self, figure_pair):
        with pytest.raises(ParameterError, match="depth"):
            rough_norm(figure_pair, 10, 0.46, 15)

    def test_scalar_component_stability_in_level(self, comp_b2):
        v = VectorWeierstrass([comp_b2])
        e12 = rough_norm(v, 12, 0.47, 10)
        e16 = rough_norm(v, 16, 0.47, 10)
        assert 1.0 <= e12.holder_part <= 50.0
        assert abs(e16.holder_part - e12.holder_part) <= 0.2 * e12.holder_part

    def test_monotone_refinement_in_depth(self, figure_pair):
        parts = [rough_norm(figure_pair, 10, 0.46, d) for d in (4, 6, 8)]
        assert parts[0].holder_part <= parts[1].holder_part <= parts[2].holder_part
        assert parts[0].area_part <= parts[1].area_part <= parts[2].area_part

    def test_subsampled_depth_not_below_full_depth(self, figure_pair):
        full = rough_norm(figure_pair, 10, 0.46, 11)
        sub = rough_norm(figure_pair, 10, 0.46, 12)
        assert sub.area_part >= full.area_part - 1e-12
        assert "subsampled" in sub.grid_spec

    def test_invalid_alpha_growth_flagged(self, figure_pair):
        bad = rough_norm(figure_pair, 12, 0.55, 10, enforce_alpha_range=False, flag_growth=True)
        good = rough_norm(figure_pair, 12, 0.46, 10, enforce_alpha_range=False, flag_growth=True)
        assert bad.growth_flagged is True
        assert good.growth_flagged is False

    def test_tolerance_policy_resolves_level(self, figure_pair):
        est = rough_norm(figure_pair, TruncationPolicy.tolerance(1e-4, 0.1), 0.46, 6)
        assert est.area_part > 0
        assert "level N=" in est.grid_spec

    def test_json_keys(self, figure_pair):
        est = rough_norm(figure_pair, 8, 0.46, 6)
        d = est.to_json_dict()
        assert set(d) >= {"holderPart", "areaPart", "alphaUsed", "gridSpec"}


class TestAreaHolderSup:
    def test_stability_across_levels(self, figure_pair):
        eps = 0.02
        expo = sum(c.alpha for c in figure_pair.components) - 2 * eps
        sups = area_holder_sup(figure_pair, [8, 16], eps, 8, exponent=expo)
        vals = list(sups.values())
        assert min(vals) > 0
        assert (max(vals) - min(vals)) / min(vals) < 0.25

    def test_per_entry_exponents_default(self, figure_pair):
        sups = area_holder_sup(figure_pair, [8], 0.02, 6)
        assert sups[8] > 0


class TestConvergenceReport:
    def test_requires_two_levels(self, figure_pair):
        with pytest.raises(ParameterError, match="insufficient"):
            convergence_report(figure_pair, [4])

    def test_scalar_first_level_rate(self, comp_b2):
        # per-step ratio over Delta N = 2 stays below a^2 with 10% margin
        v = VectorWeierstrass([comp_b2])
        rep = convergence_report(v, [2, 4, 6, 8], depth=10)
        assert rep.monotone
        for lo, hi in zip(rep.sup_first, rep.sup_first[1:]):
            assert hi / lo <= comp_b2.a**2 * 1.1

    def test_two_component_rates_and_rho(self, figure_pair):
        rep = convergence_report(figure_pair, list(range(4, 13)), depth=10, eps_prime=0.1)
        assert rep.monotone
        assert rep.rate_ok is True
        assert 0 < rep.kappa < 1
        assert 0 < rep.theoretical_rho < 1
        # measured second-level rate obeys the single-base bound implied by
        # the L-shaped tail (the region n > N alone carries b1^-alpha1)
        corrected = max(
            c.b ** (-c.alpha + rep.eps_prime) for c in figure_pair.components
        )
        assert rep.fitted_ratio_second <= corrected * 1.25
        assert rep.fitted_ratio_first <= max(c.a for c in figure_pair.components) * 1.25

    def test_parameter_validation(self, figure_pair):
        with pytest.raises(ParameterError, match="beta"):
            convergence_report(figure_pair, [4, 6], beta=0.5)
        with pytest.raises(ParameterError, match="eps_prime"):
            convergence_report(figure_pair, [4, 6], eps_prime=0.9)
        with pytest.raises(ParameterError, match="eps"):
            convergence_report(figure_pair, [4, 6], eps=0.7)

    def test_json_keys_exact(self, figure_pair):
        rep = convergence_report(figure_pair, [4, 6], depth=6)
        d = rep.to_json_dict()
        assert set(d) >= {
            "Ns", "supFirst", "supSecond", "fittedRatio", "theoreticalRho",
            "kappa", "beta", "eps", "epsPrime",
        }
        assert d["Ns"] == [4, 6]

    def test_strict_mode_accepts_valid_rate(self, figure_pair):
        rep = convergence_report(figure_pair, [4, 6, 8], depth=8, strict=True)
        assert rep.rate_ok is True

    def test_csv_rows(self, figure_pair):
        rep = convergence_report(figure_pair, [4, 6], depth=6)
        rows = rep.csv_rows()
        assert len(rows) == 2 and len(rows[0]) == 3


class TestShoelace:
    def test_unit_square(self):
        x = np.array([0.0, 1.0, 1.0, 0.0])
        y = np.array([0.0, 0.0, 1.0, 1.0])
        assert polyline_signed_area(x, y) == pytest.approx(1.0)
        assert polyline_signed_area(x[::-1], y[::-1]) == pytest.approx(-1.0)

    def test_validation(self):
        with pytest.raises(ParameterError):
            polyline_signed_area(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
