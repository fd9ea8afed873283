"""Homogeneous progressions in subset sums and the exact avoidance extremals.

The pipeline: peel A to a nice multiple-of-d core, bound the cardinality of
sums, find the longest interval, and lift it back by d to a homogeneous
progression.  The exact searches (g, H, h) are branch-and-bound over small
ground sets, each with DP-verified witnesses; the classical constructions
for g come with their own verification and applicability reasons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .core import (
    ElementSet,
    IntervalWitness,
    ProgressionWitness,
    bounded_sum_witness,
    longest_interval,
    subset_sums,
    subset_sums_bounded,
)
from .numtheory import snd
from .structure import DESK_NICE, NiceParams, NiceTrace, nice_decompose

__all__ = [
    "HomogCertificate",
    "PipelineStatus",
    "homog_pipeline",
    "exact_g",
    "GConstruction",
    "g_constructions",
    "exact_H",
    "exact_h",
]


@dataclass(frozen=True)
class HomogCertificate:
    """A homogeneous progression in Sigma(A), lifted from an interval of short sums."""

    input: ElementSet
    d: int
    reduced: ElementSet  # A' with d*A' inside A
    k: int  # cardinality bound used for the sums
    interval: IntervalWitness  # in Sigma^{[k]}(A')
    progression: ProgressionWitness  # the lift: start*d, step d

    def term_witness(self, term: int) -> tuple[int, ...]:
        """Subset of A (<= k elements, all divisible by d) summing to `term`."""
        if term % self.d:
            raise ValueError("term not divisible by d")
        parts = bounded_sum_witness(self.reduced, term // self.d, self.k, cap=self.interval.end - 1)
        return tuple(x * self.d for x in parts)

    def validate(self, sample: int = 16) -> bool:
        """Re-check the interval by fresh DP and witness a sample of terms."""
        table = subset_sums_bounded(self.reduced, self.k, cap=self.interval.end - 1)
        if not self.interval.validate(table.row(self.k)):
            return False
        terms = self.progression.terms()
        step = max(len(terms) // sample, 1)
        probes = terms[::step] + [terms[-1]]
        input_set = set(self.input.elements)
        for t in probes:
            parts = self.term_witness(t)
            if sum(parts) != t or len(parts) > self.k:
                return False
            if any(p % self.d or p not in input_set for p in parts):
                return False
        return True


@dataclass(frozen=True)
class PipelineStatus:
    """Returned when no interval of the required length appears."""

    reason: str
    d: int
    best: IntervalWitness


def homog_pipeline(
    A,
    n: int,
    k_factor: int = 8,
    nice_params: NiceParams = DESK_NICE,
) -> HomogCertificate | PipelineStatus:
    """Find a homogeneous progression of length >= n in Sigma(A), A inside [n].

    Runs the nice decomposition at desk thresholds (falling back to the raw
    set when peeling degenerates), computes sums of at most
    k = ceil(k_factor * n / |A|) elements, and lifts the longest interval.
    """
    A = A if isinstance(A, ElementSet) else ElementSet.of(A)
    if not len(A):
        raise ValueError("A must be nonempty")
    trace = nice_decompose(A, n, nice_params)
    if trace.status == "nice" and len(trace.final):
        d, reduced = trace.divisor, trace.final
    else:
        d, reduced = 1, A  # degenerate peel: fall back to the raw set
    k = max(1, math.ceil(k_factor * n / len(A)))
    k = min(k, len(reduced))
    cap = sum(sorted(reduced.elements)[-k:])
    table = subset_sums_bounded(reduced, k, cap=cap)
    run = longest_interval(table.row(k))
    if run.length < n:
        return PipelineStatus(reason="interval shorter than n", d=d, best=run)
    progression = ProgressionWitness(
        first=run.start * d, diff=d, count=run.length, homogeneous=True
    )
    return HomogCertificate(
        input=A, d=d, reduced=reduced, k=k, interval=run, progression=progression
    )


def exact_g(n: int, m: int) -> tuple[int, tuple[int, ...]]:
    """Maximum size of a subset of [n] with no subset sum m, with a witness.

    Branch and bound over elements in decreasing order: prune when m becomes
    achievable or when the remaining elements cannot beat the best found.
    """
    if n > 24:
        raise ValueError("exact_g guarded to n <= 24")
    if n < 1 or m < 1:
        raise ValueError("need n, m >= 1")
    full = (1 << (m + 1)) - 1
    target = 1 << m
    best_size = -1
    best_set: tuple[int, ...] = ()

    def go(v: int, mask: int, chosen: list[int]):
        nonlocal best_size, best_set
        if len(chosen) + v <= best_size:
            return
        if v == 0:
            best_size = len(chosen)
            best_set = tuple(sorted(chosen))
            return
        new = (mask | (mask << v)) & full
        if not new & target:
            chosen.append(v)
            go(v - 1, new, chosen)
            chosen.pop()
        go(v - 1, mask, chosen)

    go(n, 1, [])
    check = subset_sums(ElementSet.of(best_set), cap=min(m, sum(best_set) if best_set else 0))
    assert m not in check, "witness fails re-verification"
    return best_size, best_set


@dataclass(frozen=True)
class GConstruction:
    name: str  # "multiples-plus-extras" | "small-integers" | "tight-interval"
    elements: tuple[int, ...]
    verified: bool
    reason: str | None = None  # why the construction does not apply, when empty

    @property
    def size(self) -> int:
        return len(self.elements)


def _avoids(elements, m: int) -> bool:
    if not elements:
        return True
    total = sum(elements)
    if total < m:
        return True
    return m not in subset_sums(ElementSet.of(elements), cap=m)


def g_constructions(n: int, m: int) -> list[GConstruction]:
    """The three classical m-avoiding sets in [n], each DP-verified."""
    if n < 2:
        raise ValueError("n must be >= 2")
    out = []
    # (a) multiples of snd(m), greedily augmented by elements = +-1 mod snd(m)
    d = snd(m)
    base = list(range(d, n + 1, d))
    extras: list[int] = []
    for v in range(n, 0, -1):
        if len(extras) >= d - 2:
            break
        if v % d in (1, d - 1) and v not in base:
            if _avoids(base + extras + [v], m):
                extras.append(v)
    elems = tuple(sorted(base + extras))
    out.append(
        GConstruction(
            name="multiples-plus-extras", elements=elems, verified=_avoids(elems, m)
        )
    )
    # (b) the initial segment whose total stays below m
    t = math.isqrt(2 * m)
    while t * (t + 1) // 2 >= m:
        t -= 1
    seg = tuple(range(1, min(t, n) + 1))
    out.append(GConstruction(name="small-integers", elements=seg, verified=_avoids(seg, m)))
    # (c) the tight interval [n'-h, n'] when some n' puts m in its avoidance gap
    h = n * n // (2 * m)
    if h < 1:
        out.append(
            GConstruction(
                name="tight-interval", elements=(), verified=False, reason="h = floor(n^2/2m) < 1"
            )
        )
        return out
    chosen = None
    lo_np = h + (3 * n) // 4 + 1
    for np_ in range(n, lo_np - 1, -1):
        # m in [n'n/(2h), n'n/(2h) + n/4]: multiply through by 8h for exactness
        if 2 * h * m >= np_ * n and 8 * h * m <= 4 * np_ * n + 2 * h * n:
            chosen = np_
            break
    if chosen is None:
        out.append(
            GConstruction(
                name="tight-interval",
                elements=(),
                verified=False,
                reason="no n' in (h + 3n/4, n] brackets m",
            )
        )
        return out
    interval = tuple(range(chosen - h, chosen + 1))
    out.append(
        GConstruction(name="tight-interval", elements=interval, verified=_avoids(interval, m))
    )
    return out


def exact_H(n: int) -> tuple[int, tuple[tuple[int, ...], tuple[int, ...]] | None]:
    """Largest H with two size-H subsets of [n] whose subset sums meet only at 0."""
    if n > 12:
        raise ValueError("exact_H guarded to n <= 12")
    if n < 1:
        raise ValueError("n must be >= 1")
    universe = list(range(1, n + 1))
    best = 0
    witness = None
    for size in range(1, n + 1):
        found = None
        subsets = list(combinations(universe, size))
        bitmaps = [subset_sums(ElementSet.of(s)).bits for s in subsets]
        for i in range(len(subsets)):
            for j in range(i, len(subsets)):
                if bitmaps[i] & bitmaps[j] == 1:  # only the empty sum in common
                    found = (subsets[i], subsets[j])
                    break
            if found:
                break
        if not found:
            break
        best = size
        witness = found
    return best, witness


def _is_non_averaging(chosen) -> bool:
    """No element is the average of two or more of the others."""
    chosen = list(chosen)
    for b in chosen:
        others = [x for x in chosen if x != b]
        if len(others) < 2:
            continue
        cap = b * len(chosen)
        table = subset_sums_bounded(ElementSet.of(others), len(others), cap=cap, mode="exactly")
        for t in range(2, len(others) + 1):
            if b * t <= cap and b * t in table.row(t):
                return False
    return True


def exact_h(n: int) -> tuple[int, tuple[int, ...]]:
    """Maximum non-averaging subset of [n], by incremental backtracking."""
    if n > 25:
        raise ValueError("exact_h guarded to n <= 25")
    if n < 1:
        raise ValueError("n must be >= 1")
    best_size = 0
    best_set: tuple[int, ...] = ()

    def violates(chosen: list[int], new: int) -> bool:
        """Would adding `new` create an average relation?  Valid prefixes stay
        valid, so only relations involving `new` need checking."""
        if chosen:
            # new as the average of t >= 2 existing elements
            cap = new * len(chosen)
            table = subset_sums_bounded(
                ElementSet.of(chosen), len(chosen), cap=cap, mode="exactly"
            )
            for t in range(2, len(chosen) + 1):
                if new * t <= cap and new * t in table.row(t):
                    return True
        # an existing b as the average of `new` plus t-1 elements of chosen - {b}
        for b in chosen:
            rest = [x for x in chosen if x != b]
            if not rest:
                continue
            cap = b * (len(rest) + 1)
            table = subset_sums_bounded(ElementSet.of(rest), len(rest), cap=cap, mode="exactly")
            for t in range(2, len(rest) + 2):
                s = b * t - new
                if 1 <= s <= cap and s in table.row(t - 1):
                    return True
        return False

    def go(v: int, chosen: list[int]):
        nonlocal best_size, best_set
        if len(chosen) + (n - v + 1) <= best_size:
            return
        if v > n:
            if len(chosen) > best_size:
                best_size = len(chosen)
                best_set = tuple(chosen)
            return
        if not violates(chosen, v):
            chosen.append(v)
            go(v + 1, chosen)
            chosen.pop()
        go(v + 1, chosen)

    go(1, [])
    assert _is_non_averaging(list(best_set)), "witness fails re-verification"
    return best_size, best_set
