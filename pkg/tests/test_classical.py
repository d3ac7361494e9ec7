"""Baseline bounds against hand-evaluated and independently tabulated values.

Quantile routines are checked two ways: against literature constants and by
round-tripping through the regularized incomplete beta function, so the
implementation cannot certify itself.
"""
import math

import numpy as np
import pytest
from scipy.special import betainc

from meanbound.classical import (
    anderson_ucb,
    clopper_pearson_ucb,
    hoeffding_ucb,
    lower_bound_via_negation,
    maurer_pontil_ucb,
    student_t_ucb,
    student_t_quantile,
)
from meanbound.core import Envelope, Sample, SupportInterval
from meanbound.envelopes import dkw_envelope

UNIT = SupportInterval(0.0, 1.0)


class TestHoeffding:
    def test_worked_example(self):
        res = hoeffding_ucb(Sample([0.2, 0.4, 0.6, 0.8]), UNIT, 0.05)
        assert res.value == pytest.approx(1.111937, abs=1e-6)
        assert res.side == "upper" and res.method == "hoeffding"

    def test_degenerate_support(self):
        res = hoeffding_ucb(Sample([1.0, 1.0]), SupportInterval(1.0, 1.0), 0.05)
        assert res.value == 1.0

    def test_sqrt_n_scaling(self):
        m4 = hoeffding_ucb(Sample([0.5] * 4), UNIT, 0.05).value - 0.5
        m8 = hoeffding_ucb(Sample([0.5] * 8), UNIT, 0.05).value - 0.5
        assert m8 == pytest.approx(m4 / math.sqrt(2), rel=1e-12)

    def test_rejects_one_ended(self):
        with pytest.raises(ValueError):
            hoeffding_ucb(Sample([0.5]), SupportInterval(None, 1.0), 0.05)

    def test_rejects_sample_outside_support(self):
        with pytest.raises(ValueError):
            hoeffding_ucb(Sample([1.5]), UNIT, 0.05)

    def test_strictly_decreasing_in_alpha(self):
        x = Sample([0.2, 0.7, 0.4])
        vals = [hoeffding_ucb(x, UNIT, a).value for a in (0.01, 0.05, 0.2, 0.5, 0.9)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_clamp_opt_in(self):
        x = Sample([0.2, 0.4, 0.6, 0.8])
        assert hoeffding_ucb(x, UNIT, 0.05).value > 1.0
        assert hoeffding_ucb(x, UNIT, 0.05, clamp=True).value == 1.0


class TestMaurerPontil:
    def test_worked_example(self):
        res = maurer_pontil_ucb(Sample([0.0, 1.0]), UNIT, 0.05)
        # 0.5 + 7*ln(40)/3 + sqrt(2*0.5*ln(40)/2)
        assert res.value == pytest.approx(10.46548, abs=2e-5)

    def test_constant_sample_keeps_support_term(self):
        res = maurer_pontil_ucb(Sample([0.3, 0.3, 0.3]), UNIT, 0.05)
        want = 0.3 + 7.0 * math.log(40.0) / (3.0 * 2.0)
        assert res.value == pytest.approx(want, rel=1e-12)

    def test_rejects_n1(self):
        with pytest.raises(ValueError):
            maurer_pontil_ucb(Sample([0.5]), UNIT, 0.05)

    def test_strictly_decreasing_in_alpha(self):
        x = Sample([0.1, 0.9, 0.5])
        vals = [maurer_pontil_ucb(x, UNIT, a).value for a in (0.02, 0.1, 0.4, 0.8)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestStudentT:
    def test_quantile_against_tabulated(self):
        assert student_t_quantile(0.95, 1) == pytest.approx(6.3137515, abs=1e-6)
        assert student_t_quantile(0.95, 4) == pytest.approx(2.1318468, abs=1e-6)

    def test_quantile_round_trip_through_incomplete_beta(self):
        # CDF(t, df) = 1 - 0.5 * I_{df/(df+t^2)}(df/2, 1/2) for t > 0.
        for df, p in [(1, 0.95), (4, 0.95), (9, 0.9), (2, 0.99)]:
            t = student_t_quantile(p, df)
            cdf = 1.0 - 0.5 * betainc(df / 2.0, 0.5, df / (df + t * t))
            assert cdf == pytest.approx(p, abs=1e-10)

    def test_worked_example(self):
        res = student_t_ucb(Sample([0.0, 1.0]), 0.05)
        assert res.value == pytest.approx(3.6569, abs=2e-4)

    def test_constant_sample(self):
        # 0.5 is exact in binary, so the sample variance is exactly zero
        assert student_t_ucb(Sample([0.5, 0.5, 0.5]), 0.05).value == 0.5

    def test_n5_uses_df4(self):
        x = Sample([0.1, 0.3, 0.5, 0.7, 0.9])
        sd = np.std(x.values, ddof=1)
        want = 0.5 + sd / math.sqrt(5) * 2.1318468
        assert student_t_ucb(x, 0.05).value == pytest.approx(want, rel=1e-6)

    def test_rejects_n1(self):
        with pytest.raises(ValueError):
            student_t_ucb(Sample([0.5]), 0.05)


class TestAnderson:
    def test_worked_example(self):
        res = anderson_ucb(Sample([0.5]), UNIT, Envelope([0.05]))
        assert res.value == pytest.approx(0.975, rel=1e-12)

    def test_zero_envelope(self):
        res = anderson_ucb(Sample([0.2, 0.8]), SupportInterval(None, 2.0),
                           Envelope([0.0, 0.0]))
        assert res.value == 2.0

    def test_unit_envelope(self):
        res = anderson_ucb(Sample([0.2, 0.8]), UNIT, Envelope([1.0, 1.0]))
        assert res.value == pytest.approx(0.2, rel=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            anderson_ucb(Sample([0.2, 0.8]), UNIT, Envelope([0.5]))

    def test_dkw_dominated_by_hoeffding(self):
        rng = np.random.default_rng(5)
        for n in (1, 2, 3, 5, 10, 25):
            for _ in range(20):
                x = Sample(rng.uniform(0, 1, n))
                a = anderson_ucb(x, UNIT, dkw_envelope(n, 0.05)).value
                h = hoeffding_ucb(x, UNIT, 0.05).value
                assert a <= h + 1e-12
                if n >= 3:
                    assert a < h - 1e-9

    def test_larger_envelope_gives_smaller_bound(self):
        rng = np.random.default_rng(6)
        x = Sample(rng.uniform(0, 1, 8))
        small = dkw_envelope(8, 0.05)
        big = Envelope(np.minimum(1.0, small.levels + 0.05))
        assert anderson_ucb(x, UNIT, big).value <= anderson_ucb(x, UNIT, small).value


class TestClopperPearson:
    def test_no_zeros_degenerate(self):
        assert clopper_pearson_ucb(Sample([1.0, 1.0]), 0.05).value == 1.0

    def test_all_zeros_n2(self):
        res = clopper_pearson_ucb(Sample([0.0, 0.0]), 0.05)
        assert res.value == pytest.approx(1.0 - math.sqrt(0.05), abs=1e-9)

    def test_single_zero(self):
        res = clopper_pearson_ucb(Sample([0.0]), 0.05)
        assert res.value == pytest.approx(0.95, abs=1e-12)

    def test_depends_only_on_zero_count(self):
        a = clopper_pearson_ucb(Sample([0.0, 1.0, 1.0, 0.0]), 0.05).value
        b = clopper_pearson_ucb(Sample([1.0, 0.0, 0.0, 1.0]), 0.05).value
        assert a == b

    def test_beta_quantile_closed_forms(self):
        # p zeros out of n: bound is the 1-alpha quantile of Beta(n-p+1, p).
        # For n=p (all zeros) the CDF is 1-(1-x)^n.
        for n in (1, 2, 3, 5):
            res = clopper_pearson_ucb(Sample([0.0] * n), 0.05)
            assert res.value == pytest.approx(1.0 - 0.05 ** (1.0 / n), abs=1e-9)

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            clopper_pearson_ucb(Sample([0.0, 0.5]), 0.05)


class TestLowerBounds:
    def test_hoeffding_worked_example(self):
        res = lower_bound_via_negation(
            "hoeffding", Sample([0.2, 0.4, 0.6, 0.8]), UNIT, 0.05)
        assert res.value == pytest.approx(-0.111937, abs=1e-6)
        assert res.side == "lower"

    def test_equals_negated_upper_of_negated_sample(self):
        x = Sample([0.1, 0.5, 0.7])
        lo = lower_bound_via_negation("hoeffding", x, UNIT, 0.05).value
        up = hoeffding_ucb(Sample(-x.values), SupportInterval(-1.0, 0.0), 0.05).value
        assert lo == pytest.approx(-up, rel=1e-12)

    def test_student_t_constant(self):
        res = lower_bound_via_negation("student-t", Sample([0.5, 0.5]), None, 0.05)
        assert res.value == 0.5

    def test_student_t_symmetric_margin(self):
        x = Sample([0.2, 0.6, 0.7])
        up = student_t_ucb(x, 0.05).value
        lo = lower_bound_via_negation("student-t", x, None, 0.05).value
        mean = float(np.mean(x.values))
        assert lo == pytest.approx(2 * mean - up, rel=1e-10)

    def test_anderson_lower_needs_finite_lower(self):
        x = Sample([0.3, 0.9])
        with pytest.raises(ValueError):
            lower_bound_via_negation(
                "anderson", x, SupportInterval(None, 1.0), 0.05,
                envelope=Envelope([0.1, 0.4]))

    def test_anderson_lower(self):
        x = Sample([0.3, 0.9])
        env = Envelope([0.1, 0.4])
        lo = lower_bound_via_negation("anderson", x, UNIT, 0.05, envelope=env).value
        up = anderson_ucb(Sample(-x.values), SupportInterval(-1.0, 0.0), env).value
        assert lo == pytest.approx(-up, rel=1e-12)
        assert lo <= float(np.mean(x.values))

    def test_clopper_pearson_lower_complement(self):
        x = Sample([1.0, 1.0, 0.0])
        lo = lower_bound_via_negation("clopper-pearson", x, None, 0.05).value
        up = clopper_pearson_ucb(Sample(1.0 - x.values), 0.05).value
        assert lo == pytest.approx(1.0 - up, rel=1e-12)

    def test_clopper_pearson_lower_all_ones(self):
        lo = lower_bound_via_negation(
            "clopper-pearson", Sample([1.0, 1.0]), None, 0.05).value
        assert lo == pytest.approx(math.sqrt(0.05), abs=1e-9)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            lower_bound_via_negation("nope", Sample([0.5, 0.6]), UNIT, 0.05)


class TestEquivariance:
    def test_affine_equivariance_upper(self):
        rng = np.random.default_rng(12)
        xs = rng.uniform(0, 1, 6)
        c, d = 3.0, -1.5
        moved = Sample(c * xs + d)
        support = SupportInterval(c * 0 + d, c * 1 + d)
        for fn in (hoeffding_ucb, maurer_pontil_ucb):
            base = fn(Sample(xs), UNIT, 0.05).value
            assert fn(moved, support, 0.05).value == pytest.approx(
                c * base + d, rel=1e-10)
        base = student_t_ucb(Sample(xs), 0.05).value
        assert student_t_ucb(moved, 0.05).value == pytest.approx(
            c * base + d, rel=1e-10)
        env = dkw_envelope(6, 0.05)
        base = anderson_ucb(Sample(xs), UNIT, env).value
        assert anderson_ucb(moved, support, env).value == pytest.approx(
            c * base + d, rel=1e-10)
