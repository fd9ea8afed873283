import math
import random
from fractions import Fraction

import pytest

from sumlab.mono import (
    ColorClass,
    Coloring,
    build_avoiding_coloring,
    exact_f,
    find_y,
    verify_coloring,
)
from sumlab.numtheory import euler_phi, tau

from oracles import naive_subset_sums, partition_oracle_f


class TestExactF:
    def test_spec_values(self):
        assert exact_f(1, 1) == 0
        assert exact_f(2, 2) == 1
        assert exact_f(3, 3) == 2
        assert exact_f(4, 4) == 2

    def test_partition_oracle_cross_check(self):
        for n in range(1, 9):
            assert exact_f(n, n) == partition_oracle_f(n, n), n

    def test_m_in_ground_set_unreachable(self):
        assert exact_f(5, 3) is None  # {3} alone reaches 3

    def test_monotone_degenerate(self):
        # m beyond the total sum: a single class suffices
        for n in range(2, 8):
            m = n * (n - 1) // 2 + 1
            assert exact_f(n, m) == 1

    def test_guard(self):
        with pytest.raises(ValueError):
            exact_f(15, 15)


class TestVerify:
    def test_trivial_singletons(self):
        n, m = 6, 9
        classes = tuple(ColorClass("trivial", j, (j,)) for j in range(1, n))
        cert = verify_coloring(Coloring(n=n, m=m, r=n - 1, d=1, regime="exact", classes=classes))
        assert cert.passed and cert.checked == n - 1

    def test_spec_pair_examples(self):
        good = Coloring(
            n=4, m=4, r=2, d=1, regime="exact",
            classes=(ColorClass("trivial", 0, (1, 2)), ColorClass("trivial", 1, (3,))),
        )
        assert verify_coloring(good).passed
        bad = Coloring(
            n=4, m=4, r=2, d=1, regime="exact",
            classes=(ColorClass("trivial", 0, (1, 3)), ColorClass("trivial", 1, (2,))),
        )
        assert not verify_coloring(bad).passed

    def test_partition_violations(self):
        with pytest.raises(ValueError):
            verify_coloring(
                Coloring(n=4, m=9, r=1, d=1, regime="exact",
                         classes=(ColorClass("trivial", 0, (1, 2)),))
            )
        with pytest.raises(ValueError):
            verify_coloring(
                Coloring(n=4, m=9, r=2, d=1, regime="exact",
                         classes=(ColorClass("trivial", 0, (1, 2)), ColorClass("trivial", 1, (2, 3))))
            )

    def test_max_achievable_reported(self):
        col = Coloring(
            n=4, m=4, r=2, d=1, regime="exact",
            classes=(ColorClass("trivial", 0, (1, 2)), ColorClass("trivial", 1, (3,))),
        )
        cert = verify_coloring(col)
        assert cert.detail["max_achievable"]["trivial(0)"] == 3


class TestBuild:
    def test_s1_class_shape(self):
        col = build_avoiding_coloring(20, 20)
        s12 = next(c for c in col.classes if c.label == "S1" and c.key == 2)
        assert s12.elements == (7, 8, 9)

    def test_s2_divisibility(self):
        col = build_avoiding_coloring(20, 20)
        for c in col.classes:
            if c.label == "S2":
                assert all(v % c.key == 0 for v in c.elements)
                assert 20 % c.key != 0

    def test_all_classes_verify(self):
        rnd = random.Random(44)
        for _ in range(10):
            n = rnd.randint(10, 400)
            m = rnd.randint(n, n * (n - 1) // 2) if n > 2 else n
            col = build_avoiding_coloring(n, m)
            cert = verify_coloring(col)
            assert cert.passed, (n, m)

    def test_midsize_square(self):
        col = build_avoiding_coloring(10**4, 10**4)
        cert = verify_coloring(col)
        assert cert.passed
        assert col.color_count <= col.r

    def test_membership_rules_recheck(self):
        col = build_avoiding_coloring(500, 2000)
        m = col.m
        seen_small = set()
        for c in col.classes:
            if c.label == "S1":
                k = c.key
                lo = (m + 1) // 2 if k == 1 else (m + k) // (k + 1)
                hi = m - 1 if k == 1 else m // k
                for v in c.elements:
                    assert lo <= v <= hi
                    assert v not in seen_small
                seen_small.update(c.elements)
            elif c.label == "S2":
                assert all(v % c.key == 0 for v in c.elements)
            elif c.label in ("Ss1", "Ss2"):
                assert all(v % col.d == c.key for v in c.elements)

    def test_large_m_regime(self):
        col = build_avoiding_coloring(100, 3000)
        assert col.regime == "large-m"
        assert verify_coloring(col).passed
        labels = {c.label for c in col.classes}
        assert labels <= {"S2", "leftover"}

    def test_exact_f_lower_bounds_construction(self):
        for n, m in [(8, 8), (10, 10), (12, 14)]:
            col = build_avoiding_coloring(n, m)
            assert verify_coloring(col).passed
            best = exact_f(n, m, r_max=col.color_count)
            assert best is not None and best <= col.color_count

    def test_construction_roundtrip_json(self):
        col = build_avoiding_coloring(100, 150)
        again = Coloring.from_json_dict(col.to_json_dict())
        assert again == col


class TestFindY:
    def test_tiny_has_no_y(self):
        assert find_y(10, 10, 2).status == "no y at this scale"

    def test_bracket_exact_postcheck(self):
        res = find_y(10**4, 10**4, 8)
        assert res.status == "ok"
        Q = Fraction(10**4, euler_phi(10**4)) * tau(8, 10**4)
        y = res.y
        assert 15 * 8 * 10**4 <= y * y * Q <= 25 * 8 * 10**4

    def test_scaling_with_r(self):
        n = m = 10**4
        a = find_y(n, m, 8)
        b = find_y(n, m, 32)
        # endpoints scale as sqrt(r / tau(r, m)); verify against the exact drift
        drift = math.sqrt(4 * float(tau(8, m)) / float(tau(32, m)))
        got = b.bracket[0] / a.bracket[0]
        assert abs(got - drift) < 0.05 * drift
