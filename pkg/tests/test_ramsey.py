import math
import random
from fractions import Fraction

import pytest

from sumlab.completeness import SequencePrefix, parse_polynomial
from sumlab.core import ElementSet, IntervalWitness, subset_sums
from sumlab.ramsey import (
    adversary_coloring,
    concat_prefix,
    cool_bound,
    iterated_growth_check,
    poly_block,
    sample_block,
    verify_subsequences,
)

from oracles import naive_subset_sums


class TestSampleBlock:
    def test_size_formula(self):
        b = sample_block(256, Fraction(1, 2), 2, seed=0)
        assert len(b.elements) == math.ceil(2 * 2 * math.log(256)) == 23

    def test_deterministic(self):
        assert sample_block(256, Fraction(1, 2), 2, seed=5) == sample_block(
            256, Fraction(1, 2), 2, seed=5
        )

    def test_sampler_contract(self):
        b = sample_block(300, Fraction(1, 2), 2, seed=1)
        from sumlab.numtheory import primes

        for a in b.elements:
            assert 300 <= a < 600
            assert all(a % p for p in primes.upto(int(b.w)))

    def test_empty_pool_errors(self):
        with pytest.raises(ValueError):
            sample_block(4, Fraction(1, 2), 2, w_override=10, seed=0)


class TestVerify:
    def test_exact_pass(self):
        cert = verify_subsequences(ElementSet.of(range(1, 11)), 9, IntervalWitness(3, 7), "exact")
        assert cert.passed and cert.checked == 10
        # removing any one element keeps [3, 9] achievable: cross-check one case
        assert all(v in naive_subset_sums(range(2, 11)) for v in range(3, 10))

    def test_exact_fail_parity(self):
        cert = verify_subsequences(ElementSet.of([2, 4, 6, 8]), 3, IntervalWitness(1, 2), "exact")
        assert not cert.passed
        assert cert.witness["missing"] == 1

    def test_fail_witness_reverifies(self):
        cert = verify_subsequences(ElementSet.of([2, 4, 6, 8]), 3, IntervalWitness(1, 2), "exact")
        subset = cert.witness["subset"]
        assert cert.witness["missing"] not in naive_subset_sums(subset)

    def test_vacuous_montecarlo(self):
        cert = verify_subsequences(
            ElementSet.of([2, 4, 6]), 2, IntervalWitness(1, 2), "montecarlo", trials=0
        )
        assert cert.passed and cert.mode == "montecarlo-vacuous" and cert.checked == 0

    def test_budget_guard(self):
        with pytest.raises(ValueError, match="montecarlo"):
            verify_subsequences(
                ElementSet.of(range(1, 41)), 20, IntervalWitness(1, 2), "exact"
            )

    def test_replay_byte_identical(self):
        b = sample_block(256, Fraction(1, 2), 2, seed=3)
        s = b.subsequence_size
        c1 = verify_subsequences(b, s, b.target, "montecarlo", trials=50, seed=3)
        c2 = verify_subsequences(b, s, b.target, "montecarlo", trials=50, seed=3)
        assert c1.dumps() == c2.dumps()


class TestConcat:
    def test_overlap_and_sizes(self):
        r = concat_prefix(2, 256, 3, 2, seed=7)
        assert r.overlap_ok
        assert [len(b.elements) for b in r.blocks] == [
            math.ceil(2 * 2 * math.log(256 * 2**i)) for i in range(3)
        ]

    def test_density_reported(self):
        r = concat_prefix(2, 256, 3, 2, seed=7)
        assert len(r.density) == 3
        assert all(ratio > 0 for _, ratio in r.density)

    def test_deterministic(self):
        assert concat_prefix(2, 256, 2, 2, seed=9) == concat_prefix(2, 256, 2, 2, seed=9)


class TestPolyBlock:
    def test_identity_reduces_to_block(self):
        p = parse_polynomial("x")
        b = poly_block(p, 256, Fraction(1, 2), 2, w_override=math.log(256) / 2, seed=0)
        assert b.values == b.arguments  # P(y) = y

    def test_square_parity(self):
        b = poly_block(parse_polynomial("x^2"), 50, Fraction(1, 2), 2, w_override=2, seed=0)
        assert all(y % 2 for y in b.arguments)
        assert b.pool_size == sum(1 for y in range(50, 75) if y % 2)

    def test_pool_nonempty_at_scale(self):
        b = poly_block(parse_polynomial("x^2"), 10**4, Fraction(1, 2), 2, w_override=3, seed=0)
        assert b.pool_size > 0

    def test_incomplete_rejected(self):
        with pytest.raises(ValueError, match="not complete"):
            poly_block(parse_polynomial("2x"), 100, Fraction(1, 2), 2, seed=0)


class TestGrowthCheck:
    def test_difference_set_floor(self):
        got = iterated_growth_check(parse_polynomial("x"), ElementSet.of([10, 11, 13]), 12)
        assert got.count >= 2 * 3 - 1

    def test_full_range_squares(self):
        got = iterated_growth_check(parse_polynomial("x^2"), ElementSet.of(range(10, 20)), 10)
        assert got.modulus == 100 and got.count == 100

    def test_singleton(self):
        got = iterated_growth_check(parse_polynomial("x^2"), ElementSet.of([15]), 10)
        assert got.count == 1

    def test_degree_guard(self):
        with pytest.raises(ValueError):
            iterated_growth_check(parse_polynomial("x^4"), ElementSet.of([2, 3]), 2)


def test_cool_inequality_random():
    rnd = random.Random(123)
    for _ in range(100):
        S = sorted(rnd.sample(range(1, 80), rnd.randint(1, 12)))
        m = rnd.randint(5, 100)
        q = rnd.randint(1, 40)
        mask = subset_sums(ElementSet.of(S), cap=min(m, sum(S)))
        exact = sum(1 for v in range(1, min(m, sum(S)) + 1) if v in mask)
        assert math.log2(max(exact, 1)) <= cool_bound(S, m, q) + 1e-9


class TestAdversary:
    def test_powers_of_two_hue_classes(self):
        pows = SequencePrefix(tuple(2**k for k in range(15)))
        res = adversary_coloring(pows, 4)
        cls = res.coloring.classes()
        hue1 = sorted(x for (h, c), v in cls.items() if h == 1 for x in v)
        hue0 = sorted(x for (h, c), v in cls.items() if h == 0 for x in v)
        assert hue1 == [4**k for k in range(8)]  # indices 1, 3, 5, ...
        assert hue0 == [2 * 4**k for k in range(7)]

    def test_missed_integers_exist_and_reverify(self):
        pows = SequencePrefix(tuple(2**k for k in range(15)))
        res = adversary_coloring(pows, 4)
        assert res.status == "ok"
        total_missed = sum(len(v) for _, v in res.missed)
        assert total_missed > 0
        # independent full-range DP over every class of the final coloring
        classes = res.coloring.classes()
        for j, gone in res.missed:
            for v in gone[:20]:
                for members in classes.values():
                    small = [a for a in members if a <= v]
                    assert v not in naive_subset_sums(small)

    def test_no_witness_status(self):
        dense = SequencePrefix(tuple(range(1, 40)))
        res = adversary_coloring(dense, 2, j_max=4)
        if not res.chosen:
            assert res.status == "no witness at this scale"

    def test_requires_even_r(self):
        with pytest.raises(ValueError):
            adversary_coloring(SequencePrefix((1, 2, 4)), 3)
