"""Tests for the Monte-Carlo quantile bound, safe variant, and tables."""
import math

import numpy as np
import pytest

from meanbound.classical import anderson_ucb, clopper_pearson_ucb
from meanbound.core import Envelope, Sample, SupportInterval, quantile_index
from meanbound.envelopes import anderson_envelope, estimate_beta_n
from meanbound.newbound import (
    BoundRequest,
    bound_table,
    check_superset_monotonicity,
    new_bound,
    safe_plan,
    table_from_csv,
)
from meanbound.ordering import AndersonT, L2T, MeanT

UNIT = SupportInterval(0.0, 1.0)


def request(x, T, alpha=0.05, mc=20_000, seed=0, support=UNIT, **kw):
    return BoundRequest(x=Sample(x), support=support, alpha=alpha,
                        ordering=T, mc_samples=mc, seed=seed, **kw)


class TestClosedForms:
    def test_one_dim_mean_closed_form(self):
        # per-draw supremum is 1 - U (1 - x), so the 0.95 quantile of the
        # bound is 1 - q_{0.05}(U) (1 - x) with q the uniform quantile
        res = new_bound(request([0.5], MeanT(), mc=100_000))
        assert res.value == pytest.approx(0.975, abs=0.002)

    def test_all_ones_is_exact_for_every_kind(self):
        env = Envelope([0.1, 0.4, 0.7])
        for T in (MeanT(), L2T(), AndersonT(env)):
            res = new_bound(request([1.0, 1.0, 1.0], T, mc=500))
            assert res.value == 1.0

    def test_matches_clopper_pearson_on_binary_data(self):
        for values, alpha in [((0.0, 0.0), 0.05), ((0.0, 1.0), 0.05),
                              ((0.0, 0.0, 1.0), 0.1), ((1.0, 1.0), 0.05)]:
            cp = clopper_pearson_ucb(Sample(values), alpha).value
            res = new_bound(request(list(values), MeanT(), alpha=alpha,
                                    mc=100_000))
            assert res.value == pytest.approx(cp, abs=0.005)

    def test_two_zeros_value(self):
        res = new_bound(request([0.0, 0.0], MeanT(), mc=100_000))
        assert res.value == pytest.approx(1.0 - math.sqrt(0.05), abs=0.005)


class TestRequestValidation:
    def test_alpha_out_of_range(self):
        with pytest.raises(ValueError):
            new_bound(request([0.5], MeanT(), alpha=1.5))

    def test_mc_samples_positive(self):
        with pytest.raises(ValueError):
            new_bound(request([0.5], MeanT(), mc=0))

    def test_sample_outside_support(self):
        with pytest.raises(ValueError):
            new_bound(request([1.5], MeanT()))

    def test_lower_side_needs_finite_lower_end(self):
        req = BoundRequest(x=Sample([0.2]), support=SupportInterval(None, 1.0),
                           alpha=0.05, ordering=MeanT(), side="lower")
        with pytest.raises(ValueError):
            new_bound(req)

    def test_unknown_side(self):
        with pytest.raises(ValueError):
            new_bound(request([0.5], MeanT(), side="sideways"))


class TestDeterminismAndMonotonicity:
    def test_identical_requests_identical_results(self):
        r1 = new_bound(request([0.2, 0.5, 0.7], L2T(), mc=4_000, seed=11))
        r2 = new_bound(request([0.2, 0.5, 0.7], L2T(), mc=4_000, seed=11))
        assert r1.value == r2.value
        assert r1.diagnostics == r2.diagnostics

    def test_seed_changes_value(self):
        r1 = new_bound(request([0.2, 0.5, 0.7], L2T(), mc=2_000, seed=1))
        r2 = new_bound(request([0.2, 0.5, 0.7], L2T(), mc=2_000, seed=2))
        assert r1.value != r2.value

    def test_alpha_monotone_on_shared_draws(self):
        x = [0.2, 0.4, 0.9]
        vals = [new_bound(request(x, L2T(), alpha=a, mc=3_000, seed=3)).value
                for a in (0.01, 0.05, 0.1, 0.25)]
        assert vals == sorted(vals, reverse=True)

    def test_quantile_index_recorded(self):
        res = new_bound(request([0.5, 0.6], MeanT(), alpha=0.05, mc=20))
        assert res.diagnostics["quantile_index"] == 19
        assert res.diagnostics["mc_samples"] == 20
        assert res.method == "new-mean"
        assert res.diagnostics["t_value"] == pytest.approx(0.55)


class TestLowerBounds:
    def test_negation_identity(self):
        x = [0.2, 0.45, 0.8]
        lo = new_bound(request(x, MeanT(), side="lower", mc=5_000, seed=4))
        up_neg = new_bound(BoundRequest(
            x=Sample([-v for v in x]), support=UNIT.negate(), alpha=0.05,
            ordering=MeanT(), mc_samples=5_000, seed=4))
        assert lo.value == -up_neg.value
        assert lo.side == "lower"
        assert lo.diagnostics["negated"] is True

    def test_lower_below_upper(self):
        x = [0.3, 0.5, 0.6, 0.7]
        for T in (MeanT(), L2T()):
            lo = new_bound(request(x, T, side="lower", mc=3_000)).value
            up = new_bound(request(x, T, side="upper", mc=3_000)).value
            assert lo < up

    def test_all_zeros_lower_is_exactly_zero(self):
        res = new_bound(request([0.0, 0.0], MeanT(), side="lower", mc=500))
        assert res.value == 0.0


class TestSafeVariant:
    def test_worked_plan(self):
        plan = safe_plan(Sample([0.0]), UNIT, MeanT(), 0.05, 0.3)
        assert plan.gamma == pytest.approx(0.05)
        assert plan.required_samples == 19
        assert plan.phi == pytest.approx(0.0)

    def test_degenerate_plan_at_upper_end(self):
        plan = safe_plan(Sample([1.0, 1.0]), UNIT, MeanT(), 0.05, 0.1)
        assert plan.required_samples == 1
        assert plan.gamma == 0.05
        assert plan.phi == 1.0

    def test_large_epsilon_keeps_alpha(self):
        # epsilon >= 3 spread makes the ratio >= 1, so gamma = alpha
        plan = safe_plan(Sample([0.5]), UNIT, MeanT(), 0.05, 3.0)
        assert plan.gamma == 0.05

    def test_epsilon_must_be_positive(self):
        with pytest.raises(ValueError):
            safe_plan(Sample([0.5]), UNIT, MeanT(), 0.05, 0.0)

    def test_auto_raise_and_padding(self):
        res = new_bound(request([0.0], MeanT(), mc=5, safe_epsilon=0.3))
        assert res.diagnostics["mc_samples"] == 19
        assert res.diagnostics["safe_raised"] is True
        assert res.diagnostics["safe_gamma"] == pytest.approx(0.05)
        # index ceil((1 - 0.05 + 0.05) * 19) = 19 and the value carries
        # the epsilon/3 padding above the raw order statistic
        assert res.diagnostics["quantile_index"] == 19

    def test_safe_value_is_padded_quantile(self):
        mc = 1_000
        plain = new_bound(request([0.0], MeanT(), mc=mc, seed=9))
        safe = new_bound(request([0.0], MeanT(), mc=mc, seed=9,
                                 safe_epsilon=0.3))
        # same draws; the safe index is higher or equal and the value adds
        # epsilon/3 on top of that order statistic
        assert safe.value >= plain.value + 0.3 / 3.0 - 1e-12

    def test_budget_ceiling_errors(self):
        with pytest.raises(ValueError, match="budget"):
            new_bound(request([0.0, 0.1, 0.2], MeanT(), mc=10,
                              safe_epsilon=1e-4, safe_budget=10_000))

    def test_safe_mode_brackets_plain_bound(self):
        # with enough draws the safe value must cover the plain value: the
        # widened index only moves up and the padding only adds
        res_plain = new_bound(request([0.3], MeanT(), mc=2_000, seed=5))
        res_safe = new_bound(request([0.3], MeanT(), mc=2_000, seed=5,
                                     safe_epsilon=0.6))
        assert res_safe.value >= res_plain.value


class TestAndersonDominance:
    def test_shared_draw_envelope_dominates_deterministically(self):
        # envelope estimated from the same seed and draw count as the bound
        # shares its uniform stream, so at least ceil((1-alpha)*l) draws sit
        # above the envelope pointwise and the dominance is deterministic
        rng = np.random.default_rng(14)
        mc, alpha = 3_000, 0.05
        for n in (2, 4, 7):
            beta = estimate_beta_n(n, alpha, mc, seed=77).value
            env = anderson_envelope(n, beta, alpha)
            for rep in range(5):
                x = Sample(np.sort(rng.random(n)))
                anderson = anderson_ucb(x, UNIT, env).value
                res = new_bound(request(list(x.values), AndersonT(env),
                                        alpha=alpha, mc=mc, seed=77))
                assert res.value <= anderson + 1e-9


class TestReductionToEnvelopeBound:
    """Behavior of the envelope-ordered bound as the lower end varies.

    Below the threshold a* = b - (b - T(x)) / l_(i0) the bound collapses to
    the classical envelope bound exactly; with the lower end well above a*
    it is strictly smaller, deterministically so because the envelope is
    estimated from the same draw stream.
    """

    def setup_method(self):
        self.alpha, self.mc, self.n = 0.05, 20_000, 6
        beta = estimate_beta_n(self.n, self.alpha, self.mc, seed=42).value
        self.env = anderson_envelope(self.n, beta, self.alpha)
        rng = np.random.default_rng(0)
        self.x = Sample(np.sort(rng.random(self.n)) * 0.6 + 0.2)
        self.anderson = anderson_ucb(self.x, UNIT, self.env).value

    def bound_at(self, lower):
        sup = SupportInterval(lower, 1.0)
        return new_bound(BoundRequest(
            x=self.x, support=sup, alpha=self.alpha,
            ordering=AndersonT(self.env), mc_samples=self.mc, seed=42)).value

    def test_below_threshold_equals_envelope_bound(self):
        i0 = int(np.argmax(self.env.levels > 0))
        t = self.anderson
        a_star = 1.0 - (1.0 - t) / self.env.levels[i0]
        assert self.bound_at(a_star - 1.0) == pytest.approx(
            self.anderson, abs=1e-12)
        assert self.bound_at(a_star) == pytest.approx(
            self.anderson, abs=1e-12)

    def test_above_threshold_is_strictly_tighter(self):
        val0 = self.bound_at(0.0)
        assert val0 < self.anderson
        val15 = self.bound_at(0.15)
        assert self.anderson - val15 > 1e-4
        assert val15 <= val0


class TestBoundTable:
    def grid_table(self, **kw):
        grid = np.linspace(0.05, 0.95, 10)
        return bound_table(grid, 3, UNIT, 0.05, kind="mean",
                           mc_samples=2_000, seed=6, **kw)

    def test_bounds_nondecreasing_in_level(self):
        table = self.grid_table()
        assert np.all(np.diff(table.bounds) >= -1e-12)

    def test_lookup_at_grid_point(self):
        table = self.grid_table()
        for t, b in zip(table.t_values, table.bounds):
            assert table.lookup(float(t)) == b

    def test_lookup_between_points_is_conservative(self):
        table = self.grid_table()
        mid = (table.t_values[3] + table.t_values[4]) / 2.0
        assert table.lookup(float(mid)) == table.bounds[4]

    def test_lookup_above_grid_errors(self):
        table = self.grid_table()
        with pytest.raises(ValueError):
            table.lookup(0.96)

    def test_lookup_matches_direct_bound(self):
        table = self.grid_table()
        t = float(table.t_values[5])
        x = Sample([t, t, t])  # mean exactly at the grid level
        direct = new_bound(request([t, t, t], MeanT(), mc=2_000, seed=6))
        assert table.lookup(t) == pytest.approx(direct.value, abs=1e-12)

    def test_binary_table_reproduces_clopper_pearson(self):
        n = 4
        lattice = np.arange(n + 1) / n
        table = bound_table(lattice, n, UNIT, 0.05, kind="mean",
                            mc_samples=100_000, seed=8, binary=True)
        for k in range(n + 1):
            x = Sample([1.0] * k + [0.0] * (n - k))
            cp = clopper_pearson_ucb(x, 0.05).value
            assert table.lookup(k / n) == pytest.approx(cp, abs=0.005)

    def test_binary_requires_mean_kind(self):
        with pytest.raises(ValueError):
            bound_table(np.array([0.0, 1.0]), 2, UNIT, 0.05, kind="l2",
                        binary=True)

    def test_csv_round_trip(self):
        table = self.grid_table()
        text = table.to_csv()
        assert text.splitlines()[0] == "t_value,bound,alpha,n,method,l,seed"
        back = table_from_csv(text)
        np.testing.assert_array_equal(back.t_values, table.t_values)
        np.testing.assert_array_equal(back.bounds, table.bounds)
        assert back.alpha == table.alpha
        assert back.n == table.n
        assert back.method == "new-mean"
        assert back.mc_samples == table.mc_samples
        assert back.seed == table.seed

    def test_rejects_unsorted_grid(self):
        with pytest.raises(ValueError):
            bound_table(np.array([0.5, 0.2]), 2, UNIT, 0.05, kind="mean")

    def test_anderson_kind_needs_envelope(self):
        with pytest.raises(ValueError):
            bound_table(np.array([0.2, 0.5]), 2, UNIT, 0.05, kind="anderson")


class TestSupersetMonotonicity:
    def test_unit_inside_wider_interval(self):
        rng = np.random.default_rng(15)
        wider = SupportInterval(-1.0, 1.0)
        for rep in range(8):
            x = Sample(rng.random(4))
            for T in (MeanT(), L2T(), AndersonT(
                    Envelope([0.05, 0.2, 0.45, 0.7]))):
                assert check_superset_monotonicity(x, UNIT, wider, T,
                                                   mc_samples=400, seed=16)

    def test_equal_supports(self):
        x = Sample([0.2, 0.8])
        assert check_superset_monotonicity(x, UNIT, UNIT, MeanT(),
                                           mc_samples=200, seed=17)

    def test_rejects_non_subset(self):
        x = Sample([0.2, 0.8])
        with pytest.raises(ValueError):
            check_superset_monotonicity(x, SupportInterval(-2.0, 1.0),
                                        SupportInterval(-1.0, 1.0), MeanT())

    def test_constant_sample_bounds_are_the_upper_ends(self):
        x = Sample([1.0, 1.0])
        wide = SupportInterval(0.0, 2.0)
        assert check_superset_monotonicity(x, UNIT, wide, MeanT(),
                                           mc_samples=300, seed=18)
        res_inner = new_bound(request([1.0, 1.0], MeanT(), mc=300, seed=18))
        res_outer = new_bound(request([1.0, 1.0], MeanT(), mc=300, seed=18,
                                      support=wide))
        assert res_inner.value == 1.0
        assert res_inner.value <= res_outer.value


class TestOneEndedSupport:
    def test_upper_bound_with_unbounded_below(self):
        sup = SupportInterval(None, 1.0)
        x = [-3.0, 0.2, 0.9]
        for T in (MeanT(), L2T()):
            res = new_bound(request(x, T, support=sup, mc=2_000))
            assert res.diagnostics["status"] == "clamped_one_ended"
            assert res.value <= 1.0 + 1e-12

    def test_one_ended_matches_wide_box(self):
        x = [-2.0, 0.5]
        res_one = new_bound(request(x, MeanT(),
                                    support=SupportInterval(None, 1.0),
                                    mc=2_000, seed=19))
        res_wide = new_bound(request(x, MeanT(),
                                     support=SupportInterval(-50.0, 1.0),
                                     mc=2_000, seed=19))
        assert res_one.value == pytest.approx(res_wide.value, abs=1e-8)
