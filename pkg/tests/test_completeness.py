import math
import random
from fractions import Fraction

import pytest

from sumlab.completeness import (
    BinomialPolynomial,
    SequencePrefix,
    eps_necessary_check,
    gen_F,
    gen_friendly,
    graham_complete_test,
    interlace_sample,
    parse_polynomial,
    prefix_completeness_window,
)


class TestPolynomial:
    def test_parse(self):
        p = parse_polynomial("1/2x^2 + 1/2x")
        assert p(4) == 10
        assert parse_polynomial("x^2 - x + 1")(3) == 7
        assert parse_polynomial("2")(100) == 2
        with pytest.raises(ValueError):
            parse_polynomial("y + 1")

    def test_binomial_basis(self):
        p = parse_polynomial("x^2")
        assert p.alphas == (Fraction(0), Fraction(1), Fraction(2))

    def test_roundtrip_random(self):
        rnd = random.Random(4)
        for _ in range(1000):
            k = rnd.randint(0, 6)
            coeffs = [Fraction(rnd.randint(-9, 9), rnd.randint(1, 9)) for _ in range(k + 1)]
            if all(c == 0 for c in coeffs):
                coeffs[-1] = Fraction(1)
            if coeffs[-1] == 0:
                coeffs[-1] = Fraction(1, 3)
            p = BinomialPolynomial.from_monomial(coeffs)
            again = BinomialPolynomial.from_monomial(p.to_monomial())
            assert again.alphas == p.alphas
            x = rnd.randint(-20, 20)
            direct = sum(c * x**j for j, c in enumerate(coeffs))
            assert p(x) == direct

    def test_graham_examples(self):
        assert graham_complete_test(parse_polynomial("x")).complete
        v = graham_complete_test(parse_polynomial("2x"))
        assert not v.complete and v.failing_condition == "coprime-numerators"
        assert graham_complete_test(parse_polynomial("x^2")).complete
        v2 = graham_complete_test(parse_polynomial("0x^3 - x"))
        assert not v2.complete and v2.failing_condition == "leading-positive"

    def test_LP_verdict_invariance(self):
        rnd = random.Random(19)
        for _ in range(200):
            k = rnd.randint(1, 4)
            coeffs = [Fraction(rnd.randint(-6, 6), rnd.randint(1, 6)) for _ in range(k + 1)]
            if coeffs[-1] == 0:
                coeffs[-1] = Fraction(2, 3)
            p = BinomialPolynomial.from_monomial(coeffs)
            v = graham_complete_test(p)
            v2 = graham_complete_test(v.integer_form)
            assert v.complete == v2.complete
            assert all(a.denominator == 1 for a in v.integer_form.alphas)


class TestWindows:
    def test_birch_prefix(self):
        birch = sorted(
            2**a * 3**b for a in range(8) for b in range(5) if 2**a * 3**b <= 100
        )
        lo, hi = prefix_completeness_window(SequencePrefix(tuple(birch)))
        assert (lo, hi) == (0, sum(birch))

    def test_powers_of_two(self):
        prefix = SequencePrefix(tuple(2**k for k in range(11)))
        assert prefix_completeness_window(prefix) == (0, 2047)

    def test_powers_of_three(self):
        prefix = SequencePrefix(tuple(3**k for k in range(6)))
        lo, hi = prefix_completeness_window(prefix)
        assert hi - lo == 1

    def test_squares_window(self):
        squares = SequencePrefix(tuple(k * k for k in range(1, 71)))
        lo, hi = prefix_completeness_window(squares)
        assert hi - lo >= 4871


class TestGenF:
    def test_hand_recursion(self):
        assert gen_F(Fraction(1, 2), [1], 8).terms == (1, 1, 1, 2, 2, 3, 3, 5)

    def test_initial_unchanged(self):
        assert gen_F(Fraction(1, 3), [2, 7, 9], 3).terms == (2, 7, 9)

    def test_bad_initial(self):
        with pytest.raises(ValueError):
            gen_F(Fraction(1, 10), [1], 5)  # eps*n < 1 at first extension

    def test_pure_recursion_recompute(self):
        a = gen_F(Fraction(1, 3), [1, 1, 2], 500)
        b = gen_F(Fraction(1, 3), [1, 1, 2], 500)
        assert a.terms == b.terms
        # independent re-evaluation of each extension
        f = list(a.terms)
        for n in range(4, 501):
            assert f[n - 1] == sum(f[: math.floor(n / 3)])

    def test_growth_band_1e5(self):
        seq = gen_F(Fraction(1, 2), [1], 10**5)
        ratio = seq.params["growth_ratio"]
        target = seq.params["growth_target"]
        assert 0.5 * target <= ratio <= 1.5 * target


class TestFriendly:
    def test_hand_recursion(self):
        seq, _ = gen_friendly(Fraction(1, 2), [1, 2], 6)
        assert seq.terms == (1, 2, 2, 3, 4, 5)
        # recompute each extension independently
        b = list(seq.terms)
        for n in range(3, 7):
            en = Fraction(n, 2)
            lo = math.floor(en)
            frac = en - lo
            interp = math.floor(frac * b[math.ceil(en) - 1]) if frac else 0
            assert b[n - 1] == interp + sum(b[:lo])

    def test_non_strict_initial_rejected(self):
        with pytest.raises(ValueError):
            gen_friendly(Fraction(1, 2), [2, 2], 5)

    def test_report_fields(self):
        _, rep = gen_friendly(Fraction(1, 2), [1, 2], 120)
        assert rep.best_C >= 0
        assert 0 < rep.best_c <= 1
        assert rep.strict_from >= 1
        # Claim: b_{2n/c+1} >= 2 b_{n+1} for all testable n past the report index
        assert rep.doubleclaim_from is not None


class TestEpsCheck:
    def test_linear_holds(self):
        seq = SequencePrefix(tuple(range(1, 200)))
        res = eps_necessary_check(seq, Fraction(1, 2))
        assert res.holds and res.best_C <= 3

    def test_geometric_violates(self):
        seq = SequencePrefix(tuple(2**n for n in range(1, 41)))
        res = eps_necessary_check(seq, Fraction(1, 2), c_max=6)
        assert not res.holds
        assert res.witness in seq.terms
        assert res.certificate_ok
        assert res.dropped_windows

    def test_eps_one(self):
        seq = SequencePrefix(tuple(2**n for n in range(1, 21)))
        res = eps_necessary_check(seq, 1, c_max=0)
        assert res.holds and res.best_C == 0


class TestInterlace:
    def test_determinism(self):
        B = SequencePrefix((10, 20, 30))
        assert interlace_sample(B, 3, 42).terms == interlace_sample(B, 3, 42).terms

    def test_filters(self):
        # [10, 20): {11, 13, 17, 19}; [20, 30): {23, 25, 29} (25 has no factor <= 3)
        B = SequencePrefix((10, 20, 30))
        for seed in range(10):
            s = interlace_sample(B, 3, seed)
            assert s.terms[0] in (11, 13, 17, 19)
            assert s.terms[1] in (23, 25, 29)

    def test_w_zero_uniform(self):
        B = SequencePrefix((5, 8, 13))
        seen = set()
        for seed in range(40):
            s = interlace_sample(B, 0, seed)
            assert 5 <= s.terms[0] < 8 and 8 <= s.terms[1] < 13
            seen.add(s.terms[0])
        assert seen == {5, 6, 7}

    def test_fallback_when_empty(self):
        B = SequencePrefix((8, 9))  # no 7-rough number in [8, 9)
        s = interlace_sample(B, 7, 0)
        assert s.terms == (8,)
