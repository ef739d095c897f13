import random
from fractions import Fraction

import pytest

from beattylab import (CertifiedReal, GuardViolation, IntervalSet,
                       ParameterError, best_convergent_denominator,
                       continued_fraction, farey_union, fractional_hits,
                       fractional_hits_report, lemma1_set, sandwich_check,
                       scaling_preimage_bound)
from beattylab.diophantine import euler_phi

F = Fraction
R = CertifiedReal.rational
SQRT2 = CertifiedReal.sqrt(2)
PHI = CertifiedReal.phi()
ZERO = R(0)


class TestLemma1Set:
    def test_full_interval(self):
        J = lemma1_set(IntervalSet.single(0, 1), 1, F(1, 2))
        assert J == IntervalSet.single(0, 1)
        assert J.measure() == 1

    def test_spec_enumeration_case(self):
        I = IntervalSet.single(F(1, 4), F(1, 2))
        J = lemma1_set(I, 1, F(1, 2))
        assert J == IntervalSet([(F(1, 8), F(1, 4)), (F(5, 8), F(3, 4))])
        assert J.measure() == F(1, 4)
        assert J.measure() <= scaling_preimage_bound(I, 1, F(1, 2)) == F(3, 8)

    def test_l_greater_than_b(self):
        I = IntervalSet.single(0, F(1, 2))
        J = lemma1_set(I, F(1, 3), 1)
        assert J == IntervalSet.single(0, F(1, 3))
        assert J.measure() == F(1, 3) <= scaling_preimage_bound(I, F(1, 3), 1) == F(1, 2)

    def test_membership_semantics(self):
        # alpha in J iff {alpha / l} in I, spot-checked on a rational grid
        I = IntervalSet([(F(1, 5), F(2, 5)), (F(3, 5), F(7, 10))])
        b, l = F(3, 2), F(2, 5)
        J = lemma1_set(I, b, l)
        for k in range(1, 90):
            alpha = F(k, 60)
            if alpha >= b:
                break
            frac = (alpha / l) % 1
            assert J.contains_point(alpha) == I.contains_point(frac), alpha

    def test_random_bounds(self):
        rng = random.Random(2024)
        for _ in range(60):
            c1 = F(rng.randint(0, 19), 20)
            c2 = F(rng.randint(int(c1 * 20) + 1, 20), 20)
            I = IntervalSet.single(c1, c2)
            b = F(rng.randint(1, 40), rng.randint(1, 10))
            l = F(rng.randint(1, 40), rng.randint(1, 10))
            J = lemma1_set(I, b, l)
            assert J.measure() <= scaling_preimage_bound(I, b, l)

    def test_parameter_errors(self):
        with pytest.raises(ParameterError):
            lemma1_set(IntervalSet.single(0, 1), 0, 1)


class TestContinuedFraction:
    def test_sqrt2(self):
        cf = continued_fraction(SQRT2, 5)
        assert cf.quotients == (1, 2, 2, 2, 2)
        assert cf.convergents[:4] == ((1, 1), (3, 2), (7, 5), (17, 12))
        assert not cf.exact

    def test_phi_fibonacci(self):
        cf = continued_fraction(PHI, 8)
        assert cf.quotients == (1,) * 8
        ks = [k for _, k in cf.convergents]
        assert ks == [1, 1, 2, 3, 5, 8, 13, 21]

    def test_rational_terminates(self):
        cf = continued_fraction(R(7, 5), 10)
        assert cf.quotients == (1, 2, 2)
        assert cf.exact
        assert cf.convergents[-1] == (7, 5)

    def test_convergent_quality_exact(self):
        # |alpha - h/k| < 1/(k * k_next), certified by exact comparisons
        for alpha in (SQRT2, CertifiedReal.sqrt(3), PHI):
            cf = continued_fraction(alpha, 21)
            for i in range(20):
                h, k = cf.convergents[i]
                k_next = cf.convergents[i + 1][1]
                eps = F(1, k * k_next)
                assert alpha.compare_fraction(F(h, k) - eps) > 0
                assert alpha.compare_fraction(F(h, k) + eps) < 0

    def test_denominators_increase(self):
        cf = continued_fraction(SQRT2, 15)
        ks = [k for _, k in cf.convergents]
        assert all(a < b for a, b in zip(ks[1:], ks[2:]))

    def test_cf_generator_replays_prefix(self):
        cr = CertifiedReal.from_partial_quotients([1, 2, 2, 2])
        cf = continued_fraction(cr, 3)
        assert cf.quotients == (1, 2, 2)

    def test_requires_positive_alpha(self):
        with pytest.raises(ParameterError):
            continued_fraction(R(-7, 5), 4)
        with pytest.raises(ParameterError):
            continued_fraction(SQRT2, 0)

    def test_best_convergent(self):
        assert best_convergent_denominator(SQRT2, 10 ** 4) == (8119, 5741)
        assert best_convergent_denominator(PHI, 8)[1] == 8


class TestFareyUnion:
    def test_qmax1_wraps(self):
        fu = farey_union(1, 1, F(1, 100))
        assert fu.set == IntervalSet([(0, F(1, 100)), (F(99, 100), 1)])
        assert fu.measure == F(1, 50) == fu.subadditive_bound

    def test_zero_halfwidth(self):
        assert farey_union(1, 5, 0).measure == 0

    def test_subadditivity_exact(self):
        fu = farey_union(2, 8, F(1, 40))
        expected = sum(euler_phi(q) * 2 * F(1, 40) / q for q in range(1, 9))
        assert fu.subadditive_bound == expected
        assert fu.measure <= expected

    def test_hand_enumerated_qmax2(self):
        # q=1: wrap pieces [0,1/10) u [9/10,1); q=2, a=1: [9/20, 11/20)
        fu = farey_union(1, 2, F(1, 10))
        assert fu.set == IntervalSet([(0, F(1, 10)), (F(9, 20), F(11, 20)),
                                      (F(9, 10), 1)])
        assert fu.measure == F(3, 10)

    def test_guards(self):
        with pytest.raises(GuardViolation):
            farey_union(1, 20_000, F(1, 10))
        with pytest.raises(ParameterError):
            farey_union(0, 5, F(1, 10))


class TestFractionalHits:
    def test_width_one(self):
        assert fractional_hits(SQRT2, ZERO, 500, 1) == 500

    def test_rational_exact(self):
        assert fractional_hits(R(1, 3), ZERO, 9, F(1, 3)) == 3

    def test_monotone_in_width(self):
        prev = 0
        for w in (F(1, 10), F(1, 4), F(1, 2), F(3, 4), 1):
            c = fractional_hits(SQRT2, ZERO, 300, w)
            assert c >= prev
            prev = c

    def test_report_bound_sqrt2(self):
        rep = fractional_hits_report(SQRT2, ZERO, 10_000, F(1, 10))
        assert rep.count == 1001  # pre-registered
        assert rep.conv_q == 5741
        assert rep.bound_ok

    def test_report_bound_phi(self):
        rep = fractional_hits_report(PHI, ZERO, 1000, F(1, 7))
        assert rep.bound_ok

    def test_report_bound_battery(self):
        # |count - y*width| <= q*width + 2y/q + 2 across alphas and widths
        for alpha in (SQRT2, PHI, CertifiedReal.sqrt(3)):
            for y in (200, 1500):
                for width in (F(1, 3), F(1, 10), F(7, 13)):
                    rep = fractional_hits_report(alpha, ZERO, y, width)
                    assert 4 <= rep.conv_q <= y or rep.conv_q < 4
                    assert rep.bound_ok, (alpha, y, width)


class TestSandwich:
    @pytest.mark.parametrize("alpha,a,q", [(SQRT2, 17, 12), (PHI, 13, 8)])
    @pytest.mark.parametrize("width", [F(1, 5), F(1, 7)])
    def test_holds(self, alpha, a, q, width):
        rep = sandwich_check(alpha, ZERO, 1000, width, a, q)
        assert rep.ok
        assert rep.lower <= rep.middle <= rep.upper

    def test_known_counts(self):
        rep = sandwich_check(SQRT2, ZERO, 1000, F(1, 5), 17, 12)
        assert (rep.lower, rep.middle, rep.upper) == (83, 199, 416)

    def test_empty_lower_window(self):
        rep = sandwich_check(PHI, ZERO, 1000, F(1, 7), 13, 8)
        assert rep.lower == 0  # 1/7 - 1/8 < 1/8: window vanishes

    def test_precondition_rejected(self):
        with pytest.raises(ParameterError):
            sandwich_check(SQRT2, ZERO, 100, F(1, 5), 1, 2)
        with pytest.raises(ParameterError):
            sandwich_check(SQRT2, ZERO, 100, F(1, 5), 6, 4)  # gcd != 1

    def test_width_one_saturates(self):
        rep = sandwich_check(SQRT2, ZERO, 500, 1, 17, 12)
        assert rep.middle == rep.upper == 500
        assert rep.lower <= 500
        assert rep.ok


def test_farey_halfwidth_covers_circle():
    fu = farey_union(1, 4, F(3, 2))
    assert fu.set == IntervalSet.single(0, 1)
    assert fu.measure == 1 <= fu.subadditive_bound
