"""Ramsey completeness: block sampling, subsequence certification, adversaries.

A block is a random draw from the rough numbers in [x, 2x); its claim is
that every subsequence of a fixed size covers a target interval with its
subset sums.  Verification is exact below a subset budget, Monte Carlo plus
structured necessary checks above it.  The dyadic concatenation, polynomial
variant, and the hue-coloring lower-bound adversary live here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .completeness import BinomialPolynomial, graham_complete_test
from .core import ElementSet, IntervalWitness, subset_sums
from .numtheory import primes, smooth_free_set
from .report import Certificate
from .rng import substream

__all__ = [
    "EXACT_SUBSET_BUDGET",
    "RamseyBlock",
    "sample_block",
    "verify_subsequences",
    "ConcatResult",
    "concat_prefix",
    "PolyBlock",
    "poly_block",
    "GrowthCheck",
    "iterated_growth_check",
    "cool_bound",
    "HueColoring",
    "AdversaryResult",
    "adversary_coloring",
]

EXACT_SUBSET_BUDGET = 10**7


@dataclass(frozen=True)
class RamseyBlock:
    """One sampled block: i.i.d. draws from the w-rough part of [x, 2x)."""

    x: int
    eps: Fraction
    C: float
    w: float
    seed: int
    elements: tuple[int, ...]
    target: IntervalWitness
    distinct: bool

    @property
    def subsequence_size(self) -> int:
        return math.ceil(self.eps * len(self.elements))

    def to_json_dict(self) -> dict:
        return {
            "x": self.x,
            "eps": str(self.eps),
            "C": self.C,
            "w": self.w,
            "seed": self.seed,
            "elements": list(self.elements),
            "target": [self.target.start, self.target.length],
            "distinct": self.distinct,
        }


def sample_block(x: int, eps, C: float, w_override: float | None = None, seed: int = 0) -> RamseyBlock:
    """Draw ceil(C/eps * log x) uniform elements of the w-rough part of [x, 2x)."""
    if x < 4:
        raise ValueError("x must be >= 4")
    eps = Fraction(eps)
    if not 0 < eps <= Fraction(1, 2):
        raise ValueError("eps must be in (0, 1/2]")
    w = math.log(x) / 2 if w_override is None else w_override
    pool = smooth_free_set(x, w).elements
    if not pool:
        raise ValueError(f"no integers in [{x}, {2*x}) free of primes <= {w}")
    size = math.ceil(C * (1 / eps) * math.log(x))
    rng = substream(seed, "ramsey-block")
    draws = tuple(rng.choices(pool, k=size))
    y = C * x * math.log(x)
    lo = math.ceil(y / 4)
    hi = math.floor(7 * y / 8)
    return RamseyBlock(
        x=x,
        eps=eps,
        C=C,
        w=w,
        seed=seed,
        elements=draws,
        target=IntervalWitness(start=lo, length=hi - lo + 1),
        distinct=len(set(draws)) == len(draws),
    )


def _covers_target(subset, target: IntervalWitness) -> int | None:
    """None when Sigma(subset) covers the target, else the first missing integer."""
    cap = target.end - 1
    mask = subset_sums(ElementSet.of(subset, multiset=True), cap=cap)
    if mask.covers(target.start, target.length):
        return None
    return mask.first_missing(target.start, target.length)


def _heuristic_subsets(elements: tuple[int, ...], s: int):
    """Structured necessary checks: globally smallest, and smallest per dyadic class."""
    ordered = sorted(elements)
    yield tuple(ordered[:s])
    by_class: dict[int, list[int]] = {}
    for a in ordered:
        by_class.setdefault(a.bit_length(), []).append(a)
    for cls in sorted(by_class):
        members = by_class[cls]
        if len(members) >= s:
            yield tuple(members[:s])


def verify_subsequences(
    S,
    s: int,
    target: IntervalWitness,
    mode: str = "exact",
    trials: int = 10**4,
    seed: int = 0,
    exact_budget: int = EXACT_SUBSET_BUDGET,
) -> Certificate:
    """Certify that every size-s subsequence of S covers the target interval.

    exact mode enumerates all C(|S|, s) subsets (refused above the budget);
    montecarlo samples `trials` subsets uniformly and always adds the
    heuristic necessary checks; heuristic mode runs only those.  The first
    failing subset is returned as a witness.
    """
    elements = S.elements if isinstance(S, (ElementSet, RamseyBlock)) else tuple(S)
    n = len(elements)
    if s > n:
        raise ValueError("s exceeds |S|")
    params = {"n": n, "s": s, "target": [target.start, target.length]}

    def finish(checked: int, witness):
        vacuous = checked == 0
        return Certificate(
            claim="every-s-subsequence-covers-target",
            params=params,
            passed=witness is None,
            mode=mode if not vacuous else f"{mode}-vacuous",
            checked=checked,
            seed=seed,
            witness=witness,
            detail={"trials": trials if mode == "montecarlo" else None},
        )

    checked = 0
    if mode == "exact":
        total = math.comb(n, s)
        if total > exact_budget:
            raise ValueError(
                f"exact mode needs {total} subsets > budget {exact_budget}; use montecarlo"
            )
        for idxs in combinations(range(n), s):
            subset = tuple(elements[i] for i in idxs)
            checked += 1
            missing = _covers_target(subset, target)
            if missing is not None:
                return finish(checked, {"subset": sorted(subset), "missing": missing})
        return finish(checked, None)
    if mode == "montecarlo":
        rng = substream(seed, "ramsey-verify")
        if trials > 0:
            for subset in _heuristic_subsets(elements, s):
                checked += 1
                missing = _covers_target(subset, target)
                if missing is not None:
                    return finish(checked, {"subset": sorted(subset), "missing": missing})
            for _ in range(trials):
                subset = tuple(elements[i] for i in rng.sample(range(n), s))
                checked += 1
                missing = _covers_target(subset, target)
                if missing is not None:
                    return finish(checked, {"subset": sorted(subset), "missing": missing})
        return finish(checked, None)
    if mode == "heuristic":
        for subset in _heuristic_subsets(elements, s):
            checked += 1
            missing = _covers_target(subset, target)
            if missing is not None:
                return finish(checked, {"subset": sorted(subset), "missing": missing})
        return finish(checked, None)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class ConcatResult:
    blocks: tuple[RamseyBlock, ...]
    sequence: tuple[int, ...]
    density: tuple[tuple[int, float], ...]  # (n, |A cap [n]| / (r log^2 n))
    overlap_ok: bool  # y_{i+1}/4 < 7 y_i / 8 between consecutive blocks

    def to_json_dict(self) -> dict:
        return {
            "blocks": [b.to_json_dict() for b in self.blocks],
            "sequence": list(self.sequence),
            "density": [[n, ratio] for n, ratio in self.density],
            "overlap_ok": self.overlap_ok,
        }


def concat_prefix(r: int, x0: int, block_count: int, C: float, seed: int = 0) -> ConcatResult:
    """Concatenate blocks at x_i = 2^i x0 with eps = 1/r; report density and overlap."""
    if r < 2:
        raise ValueError("r must be >= 2")
    eps = Fraction(1, r)
    blocks = []
    for i in range(block_count):
        block_seed = substream(seed, "concat-prefix", i).getrandbits(63)
        blocks.append(sample_block(2**i * x0, eps, C, seed=block_seed))
    sequence = tuple(sorted(a for b in blocks for a in b.elements))
    overlap_ok = True
    for b1, b2 in zip(blocks, blocks[1:]):
        y1 = C * b1.x * math.log(b1.x)
        y2 = C * b2.x * math.log(b2.x)
        if not y2 / 4 < 7 * y1 / 8:
            overlap_ok = False
    assert overlap_ok or block_count < 2, "consecutive target intervals failed to overlap"
    density = []
    for i in range(block_count):
        n = 2 ** (i + 1) * x0
        count = sum(1 for a in sequence if a <= n)
        density.append((n, count / (r * math.log(n) ** 2)))
    return ConcatResult(
        blocks=tuple(blocks), sequence=sequence, density=tuple(density), overlap_ok=overlap_ok
    )


@dataclass(frozen=True)
class PolyBlock:
    """Polynomial analogue of a block: y's with P(y) rough, target for Sigma(P(S'))."""

    poly: BinomialPolynomial
    x: int
    eps: Fraction
    C: float
    w: float
    seed: int
    arguments: tuple[int, ...]  # sampled y's
    values: tuple[int, ...]  # P(y) in the same order
    target: IntervalWitness
    pool_size: int
    pool_ratio: float  # |X| / x, to eyeball against (log w)^-k
    shape: float  # (log w)^-k

    @property
    def subsequence_size(self) -> int:
        return math.ceil(self.eps * len(self.arguments))


def poly_block(
    P: BinomialPolynomial,
    x: int,
    eps,
    C: float,
    w_override: float | None = None,
    seed: int = 0,
) -> PolyBlock:
    """Sample y in [x, (1+1/k)x) with P(y) free of primes <= w; attach the target."""
    verdict = graham_complete_test(P)
    if not verdict.complete:
        raise ValueError(f"P is not complete (fails {verdict.failing_condition})")
    if any(a.denominator != 1 for a in P.alphas):
        P = verdict.integer_form  # work with L*P, which is complete with integer alphas
    eps = Fraction(eps)
    if not 0 < eps <= Fraction(1, 2):
        raise ValueError("eps must be in (0, 1/2]")
    k = P.degree
    w = math.sqrt(math.log(x)) if w_override is None else w_override
    small = primes.upto(int(w))
    hi = x + math.ceil(x / k)
    pool = [y for y in range(x, hi) if all(P(y) % p for p in small)]
    if not pool:
        raise ValueError("no y in range with P(y) free of small primes")
    size = math.ceil(C * (1 / eps) * math.log(x))
    rng = substream(seed, "poly-block")
    draws = tuple(rng.choices(pool, k=size))
    s_prime = math.ceil(eps * size)
    base = P(x)
    lo = math.ceil(math.e * base * s_prime / 9)
    hi_t = math.floor(8 * base * s_prime / 9)
    return PolyBlock(
        poly=P,
        x=x,
        eps=eps,
        C=C,
        w=w,
        seed=seed,
        arguments=draws,
        values=tuple(P(y) for y in draws),
        target=IntervalWitness(start=lo, length=hi_t - lo + 1),
        pool_size=len(pool),
        pool_ratio=len(pool) / x,
        shape=math.log(max(w, 2)) ** (-k),
    )


@dataclass(frozen=True)
class GrowthCheck:
    modulus: int
    count: int
    alpha: float  # |T| / x
    exponent: float | None  # log(count/P(m)) / log(alpha)


def iterated_growth_check(P: BinomialPolynomial, T, m: int, x_base: int | None = None) -> GrowthCheck:
    """Residues of 2^(k-1) P(T) - 2^(k-1) P(T) modulo P(m), by doubling sumsets."""
    k = P.degree
    if k > 3:
        raise ValueError("degree capped at 3 at desk scale")
    elems = sorted(set(T.elements if isinstance(T, ElementSet) else T))
    if not elems:
        raise ValueError("T must be nonempty")
    modulus = int(P(m))
    if modulus < 1:
        raise ValueError("P(m) must be positive")
    from .core import DEFAULT_BIT_BUDGET, ResourceBudgetError, residue_sumset, residues_to_bits

    if modulus > DEFAULT_BIT_BUDGET:
        raise ResourceBudgetError(f"P(m) = {modulus} exceeds the bitmap budget")
    forward = residues_to_bits([int(P(t)) % modulus for t in elems], modulus)
    for _ in range(k - 1):
        forward = residue_sumset(forward, forward, modulus)
    backward = residues_to_bits(
        [(-v) % modulus for v in range(modulus) if (forward >> v) & 1], modulus
    )
    diff = residue_sumset(forward, backward, modulus)
    count = diff.bit_count()
    x0 = x_base if x_base is not None else min(elems)
    alpha = len(elems) / x0
    exponent = None
    if 0 < alpha < 1 and count < modulus:
        exponent = math.log(count / modulus) / math.log(alpha)
    return GrowthCheck(modulus=modulus, count=count, alpha=alpha, exponent=exponent)


def cool_bound(S, m: int, q: int) -> float:
    """log2 of the subset-sum counting bound: m/q + sum log2(1 + 2^(-a/q))."""
    return m / q + sum(math.log2(1 + 2 ** (-a / q)) for a in S if a <= m)


@dataclass(frozen=True)
class HueColoring:
    """Product coloring: hue = index mod (r/2), blue inside chosen windows."""

    terms: tuple[int, ...]
    hue_count: int
    blue_windows: tuple[tuple[int, int], ...]  # (lo, hi] windows of blue values

    def hue(self, index: int) -> int:
        """Hue of the 1-indexed term."""
        return index % self.hue_count

    def is_blue(self, value: int) -> bool:
        return any(lo < value <= hi for lo, hi in self.blue_windows)

    def color_of(self, index: int) -> tuple[int, str]:
        return self.hue(index), "blue" if self.is_blue(self.terms[index - 1]) else "red"

    def classes(self) -> dict[tuple[int, str], list[int]]:
        out: dict[tuple[int, str], list[int]] = {}
        for i in range(1, len(self.terms) + 1):
            out.setdefault(self.color_of(i), []).append(self.terms[i - 1])
        return out

    def to_json_dict(self) -> dict:
        return {
            "terms": list(self.terms),
            "hue_count": self.hue_count,
            "blue_windows": [list(w) for w in self.blue_windows],
        }


@dataclass(frozen=True)
class AdversaryResult:
    coloring: HueColoring
    weak: tuple[int, ...]  # all weak j found
    chosen: tuple[int, ...]  # gap-separated subsequence actually used
    missed: tuple[tuple[int, tuple[int, ...]], ...]  # j -> integers with no mono sum
    red_strong: tuple[int, ...]
    blue_strong: tuple[int, ...]
    blue_counts: tuple[tuple[int, int], ...]  # j -> b(j)
    status: str  # "ok" | "no witness at this scale"

    def to_json_dict(self) -> dict:
        return {
            "coloring": self.coloring.to_json_dict(),
            "weak": list(self.weak),
            "chosen": list(self.chosen),
            "missed": [[j, list(v)] for j, v in self.missed],
            "red_strong": list(self.red_strong),
            "blue_strong": list(self.blue_strong),
            "blue_counts": [[j, c] for j, c in self.blue_counts],
            "status": self.status,
        }


def adversary_coloring(
    A,
    r: int,
    j_max: int | None = None,
    gap: float = 2.0,
) -> AdversaryResult:
    """Build the hue/threshold product coloring and list unreachable integers.

    For each scale j: red-strong iff some hue's total of elements <= 2^j
    exceeds 2^(j-1)(j+2) (the total is itself achievable, so no DP can do
    better); blue-strong iff at least 2^j integers up to 2^j*j are
    monochromatic sums of elements > 2^j.  Weak scales get blue windows
    (2^j, 2^j*j] in the final coloring, spaced by `gap` instead of the
    astronomically growing gap the asymptotic argument uses.  Integers in
    (2^(j-1)(j+2), 2^j*j] missed by every class are returned per chosen j,
    verified by per-class DP.
    """
    terms = tuple(A.terms if hasattr(A, "terms") else A)
    if any(y < x for x, y in zip(terms, terms[1:])):
        raise ValueError("A must be increasing")
    if r < 2 or r % 2:
        raise ValueError("r must be even and >= 2")
    hues = r // 2
    if j_max is None:
        j_max = max(terms).bit_length()
    by_hue: dict[int, list[int]] = {h: [] for h in range(hues)}
    for i, a in enumerate(terms, start=1):
        by_hue[i % hues].append(a)

    red_strong = []
    blue_strong = []
    blue_counts = []
    weak = []
    for j in range(1, j_max + 1):
        bound = 2 ** (j - 1) * (j + 2)
        cutoff = 2**j
        reach = cutoff * j
        is_red = any(sum(a for a in cls if a <= cutoff) > bound for cls in by_hue.values())
        union_bits = 0
        for cls in by_hue.values():
            blue = [a for a in cls if cutoff < a <= reach]
            if blue:
                union_bits |= subset_sums(ElementSet.of(blue, multiset=True), cap=reach).bits
        b_j = (union_bits >> 1).bit_count()  # positive integers only
        blue_counts.append((j, b_j))
        is_blue = b_j >= cutoff
        if is_red:
            red_strong.append(j)
        if is_blue:
            blue_strong.append(j)
        if not is_red and not is_blue:
            weak.append(j)

    chosen = []
    for j in weak:
        if not chosen or j >= gap * chosen[-1]:
            chosen.append(j)
    windows = tuple((2**j, 2**j * j) for j in chosen)
    coloring = HueColoring(terms=terms, hue_count=hues, blue_windows=windows)
    missed = []
    if chosen:
        max_reach = max(2**j * j for j in chosen)
        union_bits = 0
        for cls in coloring.classes().values():
            small = [a for a in cls if a <= max_reach]
            if small:
                union_bits |= subset_sums(ElementSet.of(small, multiset=True), cap=max_reach).bits
        for j in chosen:
            lo = 2 ** (j - 1) * (j + 2)
            hi = 2**j * j
            gone = tuple(v for v in range(lo + 1, hi + 1) if not (union_bits >> v) & 1)
            missed.append((j, gone))
    return AdversaryResult(
        coloring=coloring,
        weak=tuple(weak),
        chosen=tuple(chosen),
        missed=tuple(missed),
        red_strong=tuple(red_strong),
        blue_strong=tuple(blue_strong),
        blue_counts=tuple(blue_counts),
        status="ok" if chosen else "no witness at this scale",
    )
