"""Primes and the number-theoretic rates driving the coloring bounds.

The primorial W(rho) is never materialized: tau(rho, m) and all
coprimality tests work from the prime list and the factorization of m.
All threshold comparisons (rho scans, y brackets) use exact Fractions;
floats appear only in the psi / R report values.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .core import ElementSet

__all__ = [
    "PrimeTable",
    "primes",
    "euler_phi",
    "factorize",
    "divisors",
    "snd",
    "s_formula",
    "tau",
    "rho_nm",
    "RateReport",
    "R_nm",
    "smooth_free_set",
    "QuSetResult",
    "qu_set",
    "d_m",
]


class PrimeTable:
    """Growable prime sieve; extension is locked so readers never see partial state."""

    def __init__(self):
        self._lock = threading.Lock()
        self._limit = 1
        self._primes: list[int] = []

    def extend_to(self, limit: int):
        if limit <= self._limit:
            return
        with self._lock:
            if limit <= self._limit:
                return
            limit = max(limit, 2 * self._limit, 64)
            sieve = bytearray([1]) * (limit + 1)
            sieve[0:2] = b"\x00\x00"
            for p in range(2, math.isqrt(limit) + 1):
                if sieve[p]:
                    sieve[p * p :: p] = b"\x00" * len(range(p * p, limit + 1, p))
            self._primes = [i for i, f in enumerate(sieve) if f]
            self._limit = limit

    def upto(self, x: int) -> list[int]:
        """All primes <= x."""
        self.extend_to(max(x, 2))
        import bisect

        return self._primes[: bisect.bisect_right(self._primes, x)]

    def nth(self, i: int) -> int:
        """The i-th prime, 1-indexed (p_1 = 2)."""
        if i < 1:
            raise ValueError("prime index starts at 1")
        while len(self._primes) < i:
            # p_i < i (ln i + ln ln i) for i >= 6; pad generously below that.
            guess = max(64, int(i * (math.log(i + 1) + math.log(math.log(i + 3)) + 2)))
            self.extend_to(guess)
        return self._primes[i - 1]

    def first(self, k: int) -> list[int]:
        if k == 0:
            return []
        self.nth(k)
        return self._primes[:k]


primes = PrimeTable()


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factorize(n).items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    out = n
    for p in factorize(n):
        out = out // p * (p - 1)
    return out


def snd(m: int) -> int:
    """Smallest integer k >= 2 that does not divide m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    k = 2
    while m % k == 0:
        k += 1
    return k


def s_formula(n: int, m: int) -> int:
    """floor(n / snd(m)) + snd(m) - 2, the multiples-plus-extras size."""
    d = snd(m)
    return n // d + d - 2


def tau(rho: int, m: int) -> Fraction:
    """prod over p | W(rho)m of (1 - 1/p), each prime once, as an exact rational."""
    if rho < 1 or m < 1:
        raise ValueError("rho and m must be >= 1")
    p_rho = primes.nth(rho)
    out = Fraction(1)
    for p in primes.upto(p_rho):
        out *= Fraction(p - 1, p)
    for p in factorize(m):
        if p > p_rho:
            out *= Fraction(p - 1, p)
    return out


def rho_nm(n: int, m: int) -> int:
    """Least rho with rho / tau(rho, m) >= n^2 / phi(m), by exact rational scan."""
    if not n <= m <= n * (n - 1) // 2:
        warnings.warn(f"(n={n}, m={m}) outside the range n <= m <= C(n,2)", stacklevel=2)
    threshold = Fraction(n * n, euler_phi(m))
    rho = 1
    prev = Fraction(0)
    while True:
        value = rho / tau(rho, m)
        assert value > prev, "rho/tau(rho, m) must be strictly increasing"
        prev = value
        if value >= threshold:
            return rho
        rho += 1


@dataclass(frozen=True)
class RateReport:
    """psi / rho / R for one (n, m), floats plus the exact ingredients."""

    n: int
    m: int
    psi: float
    rho: int
    phi_m: int
    tau_rho_m: Fraction

    @property
    def R(self) -> float:
        return min(self.psi, float(self.rho))

    @property
    def branch(self) -> str:
        return "rho" if self.rho < self.psi else "psi"


def R_nm(n: int, m: int) -> RateReport:
    """R(n, m) = min(psi(n, m), rho(n, m)); n >= 3 so log log n is defined."""
    if n < 3:
        raise ValueError("n must be >= 3")
    phi_m = euler_phi(m)
    psi = (m ** (1 / 3) * (m / phi_m)) / (math.log(n) ** (1 / 3) * math.log(math.log(n)) ** (2 / 3))
    rho = rho_nm(n, m)
    return RateReport(n=n, m=m, psi=psi, rho=rho, phi_m=phi_m, tau_rho_m=tau(rho, m))


def smooth_free_set(x: int, w: float) -> ElementSet:
    """Integers in [x, 2x) with no prime factor <= w, by a segmented sieve."""
    if x < 2:
        raise ValueError("x must be >= 2")
    flags = bytearray([1]) * x  # index i <-> x + i
    for p in primes.upto(int(w)):
        start = (-x) % p
        flags[start::p] = b"\x00" * len(range(start, x, p))
    return ElementSet.of(x + i for i, f in enumerate(flags) if f)


@dataclass(frozen=True)
class QuSetResult:
    """The qu-form set in [x, 2x) plus the count brackets it is compared against."""

    elements: ElementSet
    lower: float  # (1/8) (m/phi(m)) tau(r, m) x
    upper: float  # 8 (m/phi(m)) tau(r, m) x
    x: int
    r: int
    m: int

    def within_bounds(self) -> bool:
        return self.lower <= len(self.elements) <= self.upper


def qu_set(x: int, r: int, m: int, u_exp_denom: int = 16) -> QuSetResult:
    """Integers qu in [x, 2x): u | m, u <= x^(1/u_exp_denom), gcd(q, W(r)m) = 1."""
    if x < 2:
        raise ValueError("x must be >= 2")
    p_r = primes.nth(r)
    small = primes.upto(p_r)
    u_cap = x ** (1.0 / u_exp_denom)
    us = [u for u in divisors(m) if u <= u_cap]
    # q coprime to W(r)m <=> q has no prime factor <= p_r and gcd(q, m) = 1.
    qflags: dict[int, bool] = {}
    out = set()
    for u in us:
        for t in range(x + ((-x) % u), 2 * x, u):
            q = t // u
            ok = qflags.get(q)
            if ok is None:
                ok = math.gcd(q, m) == 1 and all(q % p for p in small)
                qflags[q] = ok
            if ok:
                out.add(t)
    scale = float(Fraction(m, euler_phi(m)) * tau(r, m)) * x
    return QuSetResult(
        elements=ElementSet.of(out),
        lower=scale / 8,
        upper=8 * scale,
        x=x,
        r=r,
        m=m,
    )


def d_m(m: int, threshold: float | None = None) -> int:
    """Product of primes <= threshold (default log(m)/64) that do not divide m."""
    if m < 2:
        raise ValueError("m must be >= 2")
    if threshold is None:
        threshold = math.log(m) / 64
    out = 1
    for p in primes.upto(int(threshold)):
        if m % p:
            out *= p
    return out
