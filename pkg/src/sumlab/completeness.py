"""Complete sequences: the polynomial criterion and density-completeness checks.

A real polynomial sequence (P(m)) is complete iff, in the binomial basis
P(x) = sum alpha_i C(x, i): the leading alpha is positive, every alpha is
rational, and the numerators are globally coprime.  The sequence side
implements the F / friendly generators, the growth necessary condition
with adversarial witnesses, and smooth interlaced sampling.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .core import ElementSet, IntervalWitness, longest_interval, subset_sums
from .numtheory import primes
from .rng import substream

__all__ = [
    "BinomialPolynomial",
    "parse_polynomial",
    "GrahamVerdict",
    "graham_complete_test",
    "SequencePrefix",
    "prefix_completeness_window",
    "gen_F",
    "FriendlyReport",
    "gen_friendly",
    "EpsCheckResult",
    "eps_necessary_check",
    "interlace_sample",
]


def _stirling2(n: int) -> list[list[int]]:
    S = [[0] * (n + 1) for _ in range(n + 1)]
    S[0][0] = 1
    for i in range(1, n + 1):
        for k in range(1, i + 1):
            S[i][k] = S[i - 1][k - 1] + k * S[i - 1][k]
    return S


def _stirling1_signed(n: int) -> list[list[int]]:
    s = [[0] * (n + 1) for _ in range(n + 1)]
    s[0][0] = 1
    for i in range(1, n + 1):
        for k in range(1, i + 1):
            s[i][k] = s[i - 1][k - 1] - (i - 1) * s[i - 1][k]
    return s


@dataclass(frozen=True)
class BinomialPolynomial:
    """P(x) = sum alphas[i] * C(x, i), alphas exact rationals, leading nonzero."""

    alphas: tuple[Fraction, ...]

    def __post_init__(self):
        alphas = tuple(Fraction(a) for a in self.alphas)
        if not alphas or alphas[-1] == 0:
            raise ValueError("leading binomial coefficient must be nonzero")
        object.__setattr__(self, "alphas", alphas)

    @property
    def degree(self) -> int:
        return len(self.alphas) - 1

    @classmethod
    def from_monomial(cls, coeffs) -> "BinomialPolynomial":
        """coeffs = (c_0, ..., c_k) for sum c_j x^j."""
        cs = [Fraction(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if cs == [Fraction(0)]:
            raise ValueError("zero polynomial")
        k = len(cs) - 1
        S = _stirling2(k)
        alphas = []
        for i in range(k + 1):
            a = sum(cs[j] * S[j][i] for j in range(i, k + 1)) * math.factorial(i)
            alphas.append(a)
        while len(alphas) > 1 and alphas[-1] == 0:
            alphas.pop()
        return cls(tuple(alphas))

    def to_monomial(self) -> tuple[Fraction, ...]:
        k = self.degree
        s = _stirling1_signed(k)
        cs = [Fraction(0)] * (k + 1)
        for i, a in enumerate(self.alphas):
            fi = math.factorial(i)
            for j in range(i + 1):
                cs[j] += a * s[i][j] / fi
        return tuple(cs)

    def __call__(self, x):
        out = Fraction(0)
        for i, a in enumerate(self.alphas):
            term = Fraction(1)
            for j in range(i):
                term *= Fraction(x - j)
            out += a * term / math.factorial(i)
        if out.denominator == 1:
            return int(out)
        return out

    def scale(self, c) -> "BinomialPolynomial":
        return BinomialPolynomial(tuple(a * c for a in self.alphas))

    def lcm_denominator(self) -> int:
        L = 1
        for a in self.alphas:
            L = L * a.denominator // math.gcd(L, a.denominator)
        return L


_TERM_RE = re.compile(
    r"""(?P<sign>[+-])?\s*
        (?P<coef>\d+(?:/\d+)?)?\s*
        (?P<var>x(?:\^(?P<exp>\d+))?)?\s*""",
    re.VERBOSE,
)


def parse_polynomial(text: str) -> BinomialPolynomial:
    """Parse 'c_k x^k + ... + c_0' with integer or fraction coefficients."""
    coeffs: dict[int, Fraction] = {}
    pos = 0
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial")
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at: {text[pos:]!r}")
        if m.group("coef") is None and m.group("var") is None:
            raise ValueError(f"cannot parse polynomial at: {text[pos:]!r}")
        sign = -1 if m.group("sign") == "-" else 1
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("var"):
            exp = int(m.group("exp")) if m.group("exp") else 1
        else:
            exp = 0
        coeffs[exp] = coeffs.get(exp, Fraction(0)) + sign * coef
        pos = m.end()
    k = max(coeffs)
    return BinomialPolynomial.from_monomial([coeffs.get(j, Fraction(0)) for j in range(k + 1)])


@dataclass(frozen=True)
class GrahamVerdict:
    complete: bool
    failing_condition: str | None  # "leading-positive" | "coprime-numerators"
    L: int
    integer_form: BinomialPolynomial  # L * P, integer binomial coefficients


def graham_complete_test(P: BinomialPolynomial) -> GrahamVerdict:
    """Completeness of (P(m)) via the three binomial-basis conditions."""
    L = P.lcm_denominator()
    LP = P.scale(L)
    failing = None
    if P.alphas[-1] <= 0:
        failing = "leading-positive"
    else:
        g = 0
        for a in P.alphas:
            g = math.gcd(g, abs(a.numerator))
        if g != 1:
            failing = "coprime-numerators"
    return GrahamVerdict(complete=failing is None, failing_condition=failing, L=L, integer_form=LP)


@dataclass(frozen=True)
class SequencePrefix:
    """Finite positive integer sequence plus the metadata to regenerate it.

    Monotonicity is a property, not an invariant: the friendly recursion can
    dip below a too-steep initial segment, and the condition reports are
    where that gets flagged.
    """

    terms: tuple[int, ...]
    rule: str = "explicit"
    params: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        if any(t < 1 for t in self.terms):
            raise ValueError("terms must be positive")

    @property
    def nondecreasing(self) -> bool:
        return all(y >= x for x, y in zip(self.terms, self.terms[1:]))

    @property
    def strictly_increasing(self) -> bool:
        return all(y > x for x, y in zip(self.terms, self.terms[1:]))

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


def prefix_completeness_window(A: SequencePrefix, *, bit_budget=None) -> tuple[int, int]:
    """Inclusive endpoints of the longest run of achievable integers in Sigma(prefix)."""
    kwargs = {} if bit_budget is None else {"bit_budget": bit_budget}
    mask = subset_sums(ElementSet.of(A.terms, multiset=True), **kwargs)
    run = longest_interval(mask)
    return run.start, run.start + run.length - 1


def _check_eps(eps) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    return eps


def gen_F(eps, initial, N: int) -> SequencePrefix:
    """Extend by f_n = sum_{i <= eps*n} f_i; growth ratio recorded in params.

    The recorded `growth_ratio` is log f_N / (log N)^2, to be eyeballed
    against `growth_target` = 1/(2 log(1/eps)); no hard assertion, since the
    drift term vanishes only asymptotically.
    """
    eps = _check_eps(eps)
    f = [int(x) for x in initial]
    if not f or any(x < 1 for x in f):
        raise ValueError("initial terms must be positive")
    if N < len(f):
        raise ValueError("N must be at least the number of initial terms")
    if len(f) + 1 <= N and math.floor(eps * (len(f) + 1)) < 1:
        raise ValueError("invalid initial segment: eps*n < 1 at first extension")
    prefix = [0]
    for x in f:
        prefix.append(prefix[-1] + x)
    for n in range(len(f) + 1, N + 1):
        idx = math.floor(eps * n)
        f.append(prefix[idx])
        prefix.append(prefix[-1] + f[-1])
    ratio = math.log(f[-1]) / math.log(len(f)) ** 2 if len(f) > 1 and f[-1] > 1 else None
    return SequencePrefix(
        terms=tuple(f),
        rule="F",
        params={
            "eps": str(eps),
            "initial": list(initial),
            "N": N,
            "growth_ratio": ratio,
            "growth_target": 1 / (2 * math.log(1 / eps)),
        },
    )


@dataclass(frozen=True)
class FriendlyReport:
    """Condition-by-condition report; asymptotic conditions become first-index fields."""

    best_C: int  # least C with b_n <= sum_{i <= eps n + C} b_i over the prefix
    delta_nondecreasing_from: int  # first index from which the gaps never shrink
    octave_counts: tuple[tuple[int, int], ...]  # (octave j, terms with bit_length j)
    strict_from: int  # first index from which the prefix is strictly increasing
    best_c: Fraction  # largest c certified for condition (iv) on the strict tail
    doubleclaim_from: int | None  # first n from which b_{2n/c+1} >= 2 b_{n+1} holds

    @property
    def strictly_increasing(self) -> bool:
        return self.strict_from == 1


def gen_friendly(eps, initial, N: int) -> tuple[SequencePrefix, FriendlyReport]:
    """Extend by b_n = floor({eps n} b_ceil(eps n)) + sum_{i <= eps n} b_i.

    All five friendliness conditions are evaluated on the generated prefix
    and reported; "sufficiently large" cutoffs become first-index fields.
    """
    eps = _check_eps(eps)
    b = [int(x) for x in initial]
    if not b or any(x < 1 for x in b):
        raise ValueError("initial terms must be positive")
    if any(y <= x for x, y in zip(b, b[1:])):
        raise ValueError("initial terms must be strictly increasing")
    if N < len(b):
        raise ValueError("N must be at least the number of initial terms")
    if len(b) + 1 <= N and math.floor(eps * (len(b) + 1)) < 1:
        raise ValueError("invalid initial segment: eps*n < 1 at first extension")
    prefix = [0]
    for x in b:
        prefix.append(prefix[-1] + x)
    for n in range(len(b) + 1, N + 1):
        en = eps * n
        lo = math.floor(en)
        frac = en - lo
        interp = math.floor(frac * b[math.ceil(en) - 1]) if frac else 0
        b.append(interp + prefix[lo])
        prefix.append(prefix[-1] + b[-1])
    seq = SequencePrefix(
        terms=tuple(b), rule="friendly", params={"eps": str(eps), "initial": list(initial), "N": N}
    )
    return seq, _friendly_report(b, prefix, eps)


def _least_cover_index(prefix: list[int], value: int) -> int:
    """Least j with prefix[j] >= value (prefix[j] = b_1 + ... + b_j)."""
    import bisect

    return bisect.bisect_left(prefix, value)


def _friendly_report(b: list[int], prefix: list[int], eps: Fraction) -> FriendlyReport:
    n_terms = len(b)
    best_C = 0
    for n in range(1, n_terms + 1):
        idx = _least_cover_index(prefix, b[n - 1])
        best_C = max(best_C, idx - math.floor(eps * n))
    deltas = [b[i + 1] - b[i] for i in range(n_terms - 1)]
    nd_from = 1
    for i in range(len(deltas) - 1, 0, -1):
        if deltas[i] < deltas[i - 1]:
            nd_from = i + 2
            break
    octaves: dict[int, int] = {}
    for x in b:
        octaves[x.bit_length()] = octaves.get(x.bit_length(), 0) + 1
    strict_from = 1
    for i in range(len(deltas) - 1, -1, -1):
        if deltas[i] <= 0:
            strict_from = i + 2
            break
    tail = deltas[strict_from - 1 :]
    best_c = Fraction(1)
    if tail:
        run_max = tail[0]
        for d in tail[1:]:
            best_c = min(best_c, Fraction(d, run_max))
            run_max = max(run_max, d)
        for i in range(len(tail)):
            bi = b[strict_from - 1 + i]
            for j in range(i + 1, len(tail)):
                if b[strict_from - 1 + j] >= 2 * bi:
                    break
                best_c = min(best_c, Fraction(tail[i], tail[j]))
    dc_from = None
    if best_c > 0:
        last_bad = strict_from - 1
        testable = False
        for n in range(strict_from, n_terms):
            j = math.floor(Fraction(2 * n) / best_c) + 1
            if j > n_terms:
                break
            testable = True
            if b[j - 1] < 2 * b[n]:
                last_bad = n
        if testable:
            dc_from = last_bad + 1
    return FriendlyReport(
        best_C=best_C,
        delta_nondecreasing_from=nd_from,
        octave_counts=tuple(sorted(octaves.items())),
        strict_from=strict_from,
        best_c=best_c,
        doubleclaim_from=dc_from,
    )


@dataclass(frozen=True)
class EpsCheckResult:
    holds: bool
    best_C: int | None  # least working C when it holds, else None
    witness: int | None  # an integer provably outside Sigma(A' cap [1, witness])
    dropped_windows: tuple[tuple[int, int], ...]  # index windows (lo, hi] deleted
    certificate_ok: bool | None  # DP re-check of the witness


def eps_necessary_check(A: SequencePrefix, eps, c_max: int = 64) -> EpsCheckResult:
    """Check a_n <= sum_{i <= eps n + C} a_i; on failure build the deletion witness.

    When no C <= c_max works, indices in (eps n_j + c_max, n_j] are deleted
    around greedily-spaced violations n_j, and the largest violating term is
    returned with a DP certificate that it is not a subset sum of the
    surviving smaller terms.
    """
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("eps must be in (0, 1]")
    a = list(A.terms)
    if not A.strictly_increasing:
        raise ValueError("A must be strictly increasing")
    n_terms = len(a)
    prefix = [0]
    for x in a:
        prefix.append(prefix[-1] + x)
    worst = 0
    for n in range(1, n_terms + 1):
        idx = _least_cover_index(prefix, a[n - 1])
        worst = max(worst, idx - math.floor(eps * n))
    if worst <= c_max:
        return EpsCheckResult(
            holds=True, best_C=worst, witness=None, dropped_windows=(), certificate_ok=None
        )
    violations = [
        n
        for n in range(1, n_terms + 1)
        if a[n - 1] > prefix[min(math.floor(eps * n) + c_max, n_terms)]
    ]
    windows: list[tuple[int, int]] = []
    for n in violations:
        lo = math.floor(eps * n) + c_max
        if windows and lo < windows[-1][1]:
            continue  # keep deletion windows disjoint, as in the proof
        windows.append((lo, n))
    target_n = windows[-1][1]
    target = a[target_n - 1]
    dropped = set()
    for lo, hi in windows:
        dropped.update(range(lo + 1, hi + 1))
    survivors = [a[i - 1] for i in range(1, n_terms + 1) if i not in dropped and a[i - 1] <= target]
    # Capping the DP at the survivors' total keeps the membership test exact:
    # sums cannot exceed the total, and the violation makes target exceed it.
    total = sum(survivors)
    mask = subset_sums(ElementSet.of(survivors, multiset=True), cap=min(target, total))
    ok = target > total or target not in mask
    return EpsCheckResult(
        holds=False,
        best_C=None,
        witness=target,
        dropped_windows=tuple(windows),
        certificate_ok=ok,
    )


def _smooth_free(value: int, w: float) -> bool:
    return all(value % p for p in primes.upto(int(w)))


def interlace_sample(B: SequencePrefix, w: float, seed: int) -> SequencePrefix:
    """a_j uniform over [b_j, b_{j+1}) with no prime factor <= w; else the left endpoint."""
    if not B.strictly_increasing:
        raise ValueError("B must be strictly increasing")
    rng = substream(seed, "interlace-sample")
    terms = []
    bs = list(B.terms)
    for j in range(len(bs) - 1):
        lo, hi = bs[j], bs[j + 1]
        candidates = [t for t in range(lo, hi) if _smooth_free(t, w)]
        pick = rng.choice(candidates) if candidates else lo
        assert lo <= pick < hi
        terms.append(pick)
    return SequencePrefix(
        terms=tuple(terms), rule="interlace", params={"w": w, "base": list(bs)}, seed=seed
    )
