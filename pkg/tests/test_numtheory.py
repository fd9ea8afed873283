import math
import random
import warnings
from fractions import Fraction

import pytest

from sumlab import numtheory as nt


class TestBasics:
    def test_phi(self):
        assert nt.euler_phi(1) == 1
        assert nt.euler_phi(12) == 4
        assert nt.euler_phi(97) == 96

    def test_snd(self):
        assert nt.snd(1) == 2
        assert nt.snd(12) == 5
        assert nt.snd(2520) == 11

    def test_snd_prime_power(self):
        # if k = ab with coprime a, b > 1 both dividing m, then k | m
        def is_prime_power(k):
            f = nt.factorize(k)
            return len(f) == 1

        for m in range(1, 100_000):
            assert is_prime_power(nt.snd(m)), m

    def test_s_formula(self):
        assert nt.s_formula(100, 12) == 23
        assert nt.s_formula(20, 12) == 7
        assert nt.s_formula(5, 6) == 3


class TestTauRho:
    def test_tau_examples(self):
        assert nt.tau(1, 1) == Fraction(1, 2)
        assert nt.tau(2, 3) == Fraction(1, 3)
        assert nt.tau(2, 2) == Fraction(1, 3)

    def test_tau_nonincreasing_and_consistent(self):
        rnd = random.Random(3)
        for _ in range(30):
            m = rnd.randint(1, 5000)
            prev = Fraction(2)
            for rho in range(1, 12):
                t = nt.tau(rho, m)
                assert t <= prev
                prev = t
                # multiplicative consistency with the m-free value
                p_rho = nt.primes.nth(rho)
                corr = Fraction(1)
                for p in nt.factorize(m):
                    if p > p_rho:
                        corr *= Fraction(p - 1, p)
                assert nt.tau(rho, 1) * corr == t

    def test_rho_examples(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert nt.rho_nm(10, 10) == 6
        # rho = 1 whenever the base case already clears the threshold
        for n, m in [(2, 2), (3, 3)]:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                rho = nt.rho_nm(n, m)
            if Fraction(1) / nt.tau(1, m) >= Fraction(n * n, nt.euler_phi(m)):
                assert rho == 1

    def test_rho_warns_out_of_range(self):
        with pytest.warns(UserWarning):
            nt.rho_nm(10, 9)

    def test_orderrho_ratio_band(self):
        # rho(n,m) log(n^2/phi(m)) / (n^2/phi(m)) stays within [1/16, 16]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for n, m in [(300, 300), (1000, 1000), (1000, 2000), (2000, 10_000), (500, 12_000)]:
                if m > n * n / math.log(n) ** 2:
                    continue
                rho = nt.rho_nm(n, m)
                X = n * n / nt.euler_phi(m)
                ratio = rho * math.log(X) / X
                assert 1 / 16 <= ratio <= 16, (n, m, ratio)


class TestRReport:
    def test_domain(self):
        with pytest.raises(ValueError):
            nt.R_nm(2, 2)

    def test_examples(self):
        rep = nt.R_nm(10, 10)
        assert rep.psi > 0
        assert rep.R == min(rep.psi, rep.rho)
        assert rep.branch in ("psi", "rho")

    def test_psi_positive_random(self):
        rnd = random.Random(8)
        for _ in range(20):
            n = rnd.randint(3, 500)
            m = rnd.randint(n, max(n, n * (n - 1) // 2))
            rep = nt.R_nm(n, m)
            assert rep.psi > 0 and rep.R > 0


class TestSmoothFree:
    def test_examples(self):
        assert nt.smooth_free_set(10, 3).elements == (11, 13, 17, 19)
        assert nt.smooth_free_set(2, 2).elements == (3,)
        assert nt.smooth_free_set(10, 1).elements == tuple(range(10, 20))

    def test_brute_force_agreement(self):
        rnd = random.Random(12)
        for _ in range(15):
            x = rnd.randint(2, 10_000)
            w = rnd.randint(0, 20)
            got = set(nt.smooth_free_set(x, w))
            want = {
                t
                for t in range(x, 2 * x)
                if all(t % p for p in nt.primes.upto(w))
            }
            assert got == want


class TestQuSet:
    def test_examples(self):
        q = nt.qu_set(8, 1, 6)
        assert q.elements.elements == (11, 13)
        # m = 1: reduces to integers coprime to W(r)
        q2 = nt.qu_set(50, 2, 1)
        want = {t for t in range(50, 100) if t % 2 and t % 3}
        assert set(q2.elements) == want

    def test_count_brackets_at_scale(self):
        q = nt.qu_set(10_000, 5, 10_000)
        assert q.within_bounds(), (len(q.elements), q.lower, q.upper)


class TestDm:
    def test_examples(self):
        assert nt.d_m(15, 5) == 2
        assert nt.d_m(2**10, 3) == 3
        assert nt.d_m(77, 1.5) == 1

    def test_default_threshold_small(self):
        # (log m)/64 < 2 for every desk-size m, so the default is the empty product
        assert nt.d_m(10**6) == 1


def test_sum_div_chain():
    # m/(zeta(2) phi(m)) <= prod(1 + 1/p) <= sum_{u|m} 1/u <= m/phi(m), m <= 1e5
    N = 100_000
    sigma = [0, 1] + [m + 1 for m in range(2, N + 1)]  # sigma[m] = sum of divisors
    for d in range(2, N // 2 + 1):
        for mult in range(2 * d, N + 1, d):
            sigma[mult] += d
    spf = list(range(N + 1))  # smallest prime factor sieve
    for p in range(2, int(N**0.5) + 1):
        if spf[p] == p:
            for mult in range(p * p, N + 1, p):
                if spf[mult] == mult:
                    spf[mult] = p
    zeta2 = math.pi**2 / 6
    for m in range(1, N + 1):
        num = den = 1  # prod (1 + 1/p) = num/den
        phi = m
        x = m
        while x > 1:
            p = spf[x]
            num *= p + 1
            den *= p
            phi = phi // p * (p - 1)
            while x % p == 0:
                x //= p
        # exact comparisons by cross-multiplication
        assert num * m <= sigma[m] * den  # prod(1+1/p) <= sigma(m)/m
        assert sigma[m] * phi <= m * m  # sigma(m)/m <= m/phi(m)
        assert m * den / (zeta2 * phi * num) <= 1 + 1e-9  # float step at 1e-9
