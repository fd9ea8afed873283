"""Interval-extension and cyclic-group tools, each an executable check.

These are small theorems run as code: interval extension by new elements,
long intervals in iterated sumsets of dense parts, almost-period counting
in Z_m, and the mod-m growth inequality.  Where a statement is a theorem,
its conclusion is asserted; a failure means an implementation bug, not bad
input.
"""

from __future__ import annotations

import math

from .core import (
    ElementSet,
    HypothesisError,
    IntervalWitness,
    _longest_run,
    residues_to_bits,
    rotate_residues,
    subset_sums,
    subset_sums_mod,
)

__all__ = [
    "graham_extend",
    "lev_interval",
    "almost_periods",
    "mod_growth_lower_bound",
]


def graham_extend(interval: IntervalWitness, extras) -> IntervalWitness:
    """Extend a full interval [x, x+y) of subset sums by new elements.

    Requires each a_i <= y + sum of the earlier extras (checked in
    ascending order); the result covers [x, x + y + sum(extras)).
    """
    extras = extras.elements if isinstance(extras, ElementSet) else tuple(extras)
    y = interval.length
    acc = 0
    for i, a in enumerate(extras):
        if a > y + acc:
            raise HypothesisError(
                "element exceeds current interval length",
                index=i,
                element=a,
                slack=a - (y + acc),
            )
        acc += a
    return IntervalWitness(start=interval.start, length=y + acc)


def _part_profile(part) -> tuple[list[int], int]:
    xs = sorted(set(part))
    g = 0
    for x in xs[1:]:
        g = math.gcd(g, x - xs[0])
    return xs, g


def lev_interval(parts, q: int, n: int) -> IntervalWitness:
    """Interval of length >= l(n-1)+1 in S_1 + ... + S_l (Lev's bound).

    Hypotheses are verified and raise HypothesisError when violated; the
    conclusion is asserted, since it is a theorem about the verified inputs.
    """
    parts = [list(p) for p in parts]
    ell = len(parts)
    if n < 3:
        raise HypothesisError("n >= 3", n=n)
    if q < 1:
        raise HypothesisError("q >= 1", q=q)
    if ell < 2 * math.ceil((q - 1) / (n - 2)):
        raise HypothesisError(
            "l >= 2*ceil((q-1)/(n-2))", ell=ell, required=2 * math.ceil((q - 1) / (n - 2))
        )
    profiles = []
    for i, part in enumerate(parts):
        xs, g = _part_profile(part)
        if len(xs) < n:
            raise HypothesisError("each part has >= n elements", part=i, size=len(xs))
        if xs[-1] - xs[0] > q:
            raise HypothesisError("part spans more than q+1 consecutive integers", part=i)
        if g > 1:
            raise HypothesisError("part lies in an AP of common difference > 1", part=i, diff=g)
        profiles.append(xs)
    # Shift parts to be nonnegative, fold sumsets as bitmasks, shift back.
    bits = 1
    base = 0
    for xs in profiles:
        lo = xs[0]
        base += lo
        acc = 0
        for x in xs:
            acc |= bits << (x - lo)
        bits = acc
    start, length = _longest_run(bits)
    assert length >= ell * (n - 1) + 1, "Lev interval shorter than the theorem guarantees"
    return IntervalWitness(start=start + base, length=length)


def almost_periods(residues, m: int, d: int) -> list[int]:
    """G_d = {x in Z_m : |(A+x) \\ A| <= d}, with the double-count bound asserted."""
    if d < 0:
        raise ValueError("d must be >= 0")
    bits = residues_to_bits(residues, m)
    size = bits.bit_count()
    if size == 0:
        raise ValueError("A must be nonempty")
    out = [x for x in range(m) if (rotate_residues(bits, x, m) & ~bits).bit_count() <= d]
    if d < size < m:
        assert len(out) * (size - d) <= size * size, "almost-period bound violated"
    return out


def mod_growth_lower_bound(A, m: int) -> tuple[int, int]:
    """(|Sigma(A + {m})|, |Sigma(A)| + |Sigma_m(A)|); the first never falls below the second."""
    elems = A.elements if isinstance(A, ElementSet) else tuple(A)
    if m in elems:
        raise ValueError("m must not be an element of A")
    grown = subset_sums(ElementSet.of(list(elems) + [m], multiset=True)).count()
    base = subset_sums(ElementSet.of(elems, multiset=True)).count()
    modular = subset_sums_mod(elems, m).count()
    assert grown >= base + modular, "mod-m growth inequality violated"
    return grown, base + modular
