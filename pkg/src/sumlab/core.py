"""Exact subset-sum engines on big-integer bitmasks.

Bit s of a mask is set iff sum s is achievable from distinct elements.
All DP here is word-parallel shift-OR on Python ints: adding an element a
is ``bits |= bits << a`` truncated at the cap, and the modular variant is
a rotate-OR over m bits.  The naive 2^|A| enumeration lives in the test
suite as the independent oracle, never here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "DEFAULT_BIT_BUDGET",
    "ResourceBudgetError",
    "HypothesisError",
    "ElementSet",
    "SumMask",
    "BoundedSumTable",
    "IntervalWitness",
    "ProgressionWitness",
    "subset_sums",
    "subset_sums_mod",
    "subset_sums_bounded",
    "subset_sum_witness",
    "bounded_sum_witness",
    "longest_interval",
    "find_homog_progression",
    "rotate_residues",
    "residues_to_bits",
    "bits_to_residues",
    "residue_sumset",
    "iterated_sumset_mod",
    "in_proper_coset",
]

# Masks larger than this many bits are refused instead of silently truncated.
DEFAULT_BIT_BUDGET = 1 << 28


class ResourceBudgetError(ValueError):
    """Requested bitmap exceeds the configured bit budget."""


class HypothesisError(ValueError):
    """A stated hypothesis of an operation fails on the given input.

    `clause` names the failed hypothesis; `info` carries the offending data
    (index, element, slack, ...) for error reports.
    """

    def __init__(self, clause: str, **info):
        self.clause = clause
        self.info = info
        detail = ", ".join(f"{k}={v}" for k, v in info.items())
        super().__init__(f"hypothesis failed: {clause}" + (f" ({detail})" if detail else ""))


@dataclass(frozen=True)
class ElementSet:
    """Sorted sequence of positive integers; a set unless `multiset` is on."""

    elements: tuple[int, ...]
    multiset: bool = False

    def __post_init__(self):
        elems = tuple(self.elements)
        object.__setattr__(self, "elements", elems)
        for a in elems:
            if not isinstance(a, int) or a < 1:
                raise ValueError(f"elements must be positive integers, got {a!r}")
        for x, y in zip(elems, elems[1:]):
            if y < x or (y == x and not self.multiset):
                raise ValueError("elements must be sorted and distinct (use multiset=True for repeats)")

    @classmethod
    def of(cls, iterable, multiset: bool = False) -> "ElementSet":
        elems = sorted(iterable)
        if not multiset:
            elems = sorted(set(elems))
        return cls(tuple(elems), multiset)

    @classmethod
    def parse(cls, text: str, multiset: bool = False) -> "ElementSet":
        """One positive decimal integer per line; '#' starts a comment."""
        elems = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                elems.append(int(line))
        return cls.of(elems, multiset)

    def to_text(self) -> str:
        return "\n".join(str(a) for a in self.elements) + ("\n" if self.elements else "")

    def total(self) -> int:
        return sum(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.elements


def _as_elements(A) -> tuple[int, ...]:
    if isinstance(A, ElementSet):
        return A.elements
    return tuple(A)


@dataclass(frozen=True)
class SumMask:
    """Achievability bitmap: bit s set iff sum s (or residue s) is achievable.

    Non-modular masks carry `cap`; modular masks carry `modulus` and index
    residues 0..m-1.  Bit 0 is always set (the empty subset).
    """

    bits: int
    cap: int | None = None
    modulus: int | None = None

    def __post_init__(self):
        if (self.cap is None) == (self.modulus is None):
            raise ValueError("exactly one of cap/modulus must be set")
        if not self.bits & 1:
            raise ValueError("bit 0 (empty subset) must be set")

    @property
    def width(self) -> int:
        return self.modulus if self.modulus is not None else self.cap + 1

    def __contains__(self, s: int) -> bool:
        return 0 <= s < self.width and bool((self.bits >> s) & 1)

    def count(self) -> int:
        return self.bits.bit_count()

    def support(self) -> list[int]:
        out = []
        bits = self.bits
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return out

    def covers(self, start: int, length: int) -> bool:
        """True iff every position in [start, start+length) is set."""
        if length <= 0:
            return True
        if start < 0 or start + length > self.width:
            return False
        window = (1 << length) - 1
        return (self.bits >> start) & window == window

    def first_missing(self, start: int, length: int) -> int | None:
        """Smallest unset position in [start, start+length), or None."""
        window = (1 << length) - 1
        gap = ~(self.bits >> start) & window
        if not gap:
            return None
        return start + (gap & -gap).bit_length() - 1

    def to_json_dict(self) -> dict:
        meta = {"hex": format(self.bits, "x")}
        if self.modulus is not None:
            meta["modulus"] = self.modulus
        else:
            meta["cap"] = self.cap
        return meta

    @classmethod
    def from_json_dict(cls, d: dict) -> "SumMask":
        return cls(bits=int(d["hex"], 16), cap=d.get("cap"), modulus=d.get("modulus"))


def _check_budget(nbits: int, bit_budget: int):
    if nbits > bit_budget:
        raise ResourceBudgetError(f"mask of {nbits} bits exceeds budget of {bit_budget}")


def subset_sums(A, cap: int | None = None, *, bit_budget: int = DEFAULT_BIT_BUDGET) -> SumMask:
    """All subset sums of A up to `cap` (default: the full sum)."""
    elems = _as_elements(A)
    if cap is None:
        cap = sum(elems)
    if cap < 0:
        raise ValueError("cap must be >= 0")
    _check_budget(cap + 1, bit_budget)
    full = (1 << (cap + 1)) - 1
    bits = 1
    for a in elems:
        if a <= cap:
            bits |= (bits << a) & full
    return SumMask(bits=bits, cap=cap)


def subset_sums_mod(A, m: int) -> SumMask:
    """Residues of subset sums of A modulo m; multiset inputs allowed."""
    if m < 1:
        raise ValueError("invalid modulus")
    elems = _as_elements(A)
    full = (1 << m) - 1
    bits = 1
    for a in elems:
        s = a % m
        if s:
            bits |= ((bits << s) | (bits >> (m - s))) & full
    return SumMask(bits=bits, modulus=m)


@dataclass(frozen=True)
class BoundedSumTable:
    """Sums achievable with at most / exactly k elements, one row per k <= h."""

    h: int
    cap: int
    mode: str  # "at-most" | "exactly"
    rows: tuple[SumMask, ...]

    def row(self, k: int) -> SumMask:
        return self.rows[k]

    def union_up_to(self, k: int) -> SumMask:
        bits = 0
        for r in self.rows[: k + 1]:
            bits |= r.bits
        return SumMask(bits=bits, cap=self.cap)


def subset_sums_bounded(
    A,
    h: int,
    cap: int | None = None,
    mode: str = "at-most",
    *,
    bit_budget: int = DEFAULT_BIT_BUDGET,
) -> BoundedSumTable:
    """Cardinality-bounded subset sums: row k = sums of (<= or ==) k elements."""
    if mode not in ("at-most", "exactly"):
        raise ValueError("mode must be 'at-most' or 'exactly'")
    if h < 0:
        raise ValueError("h must be >= 0")
    elems = _as_elements(A)
    if cap is None:
        cap = sum(sorted(elems)[-h:]) if h else 0
    if cap < 0:
        raise ValueError("cap must be >= 0")
    _check_budget((cap + 1) * (h + 1), bit_budget)
    full = (1 << (cap + 1)) - 1
    rows = [1] * (h + 1) if mode == "at-most" else [1] + [0] * h
    for a in elems:
        if a > cap:
            continue
        for k in range(h, 0, -1):
            grown = (rows[k - 1] << a) & full
            if grown:
                rows[k] |= grown
    return BoundedSumTable(h=h, cap=cap, mode=mode, rows=tuple(_RowMask(b, cap) for b in rows))


class _RowMask(SumMask):
    """Table row: same surface as SumMask but bit 0 may be clear (exactly-mode)."""

    def __init__(self, bits: int, cap: int):
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "cap", cap)
        object.__setattr__(self, "modulus", None)


def subset_sum_witness(A, target: int, cap: int | None = None) -> tuple[int, ...]:
    """A subset of A summing to `target`, via a DP pass recording last setters."""
    elems = _as_elements(A)
    if cap is None:
        cap = max(target, 0)
    if not 0 <= target <= cap:
        raise ValueError("target out of range")
    full = (1 << (cap + 1)) - 1
    setter = [0] * (cap + 1)
    bits = 1
    for a in elems:
        if a > cap:
            continue
        new = (bits | ((bits << a) & full)) ^ bits
        while new:
            low = new & -new
            setter[low.bit_length() - 1] = a
            new ^= low
        bits |= (bits << a) & full
    if not (bits >> target) & 1:
        raise ValueError(f"{target} is not a subset sum")
    out = []
    s = target
    while s:
        a = setter[s]
        out.append(a)
        s -= a
    return tuple(sorted(out))


def bounded_sum_witness(A, target: int, h: int, cap: int | None = None) -> tuple[int, ...]:
    """A subset of A with at most h elements summing to `target`."""
    elems = _as_elements(A)
    if cap is None:
        cap = max(target, 0)
    if not 0 <= target <= cap:
        raise ValueError("target out of range")
    full = (1 << (cap + 1)) - 1
    rows = [1] + [0] * h
    setter = [dict() for _ in range(h + 1)]
    for a in elems:
        if a > cap:
            continue
        for k in range(h, 0, -1):
            grown = (rows[k - 1] << a) & full
            new = (rows[k] | grown) ^ rows[k]
            while new:
                low = new & -new
                setter[k][low.bit_length() - 1] = a
                new ^= low
            rows[k] |= grown
    ks = [k for k in range(h + 1) if (rows[k] >> target) & 1]
    if not ks:
        raise ValueError(f"{target} is not a sum of <= {h} elements")
    k = ks[0]
    out = []
    s = target
    while s or (k and s in setter[k]):
        if k == 0:
            break
        a = setter[k][s]
        out.append(a)
        s -= a
        k -= 1
    if s != 0:
        raise AssertionError("witness backtrack failed")
    return tuple(sorted(out))


@dataclass(frozen=True)
class IntervalWitness:
    """A run [start, start+length) of consecutive achievable integers."""

    start: int
    length: int

    @property
    def end(self) -> int:
        """One past the last covered integer."""
        return self.start + self.length

    def validate(self, mask: SumMask) -> bool:
        return mask.covers(self.start, self.length)


@dataclass(frozen=True)
class ProgressionWitness:
    """Arithmetic progression first, first+diff, ... with `count` terms."""

    first: int
    diff: int
    count: int
    homogeneous: bool

    def __post_init__(self):
        if self.homogeneous != (self.first % self.diff == 0):
            raise ValueError("homogeneous flag inconsistent with first/diff")

    def terms(self) -> list[int]:
        return [self.first + i * self.diff for i in range(self.count)]

    def validate(self, mask: SumMask) -> bool:
        return all(t in mask for t in self.terms())


def _longest_run(x: int) -> tuple[int, int]:
    """(start, length) of the longest run of set bits; ties -> smallest start."""
    if x == 0:
        return 0, 0
    tiers = [(x, 1)]
    while True:
        y, run = tiers[-1]
        y2 = y & (y >> run)
        if y2 == 0:
            break
        tiers.append((y2, 2 * run))
    best, best_len = tiers[-1]
    for y, run in reversed(tiers[:-1]):
        cand = best & (y >> best_len)
        if cand:
            best = cand
            best_len += run
    return (best & -best).bit_length() - 1, best_len


def longest_interval(mask: SumMask, start_from: int = 0) -> IntervalWitness:
    """Longest run of consecutive set bits at or after `start_from`."""
    if mask.modulus is not None:
        raise ValueError("mask must be non-modular")
    bits = mask.bits >> start_from if start_from else mask.bits
    start, length = _longest_run(bits)
    return IntervalWitness(start=start + start_from, length=length)


def find_homog_progression(mask: SumMask, min_len: int) -> ProgressionWitness | None:
    """Longest progression a, a+d, ..., d | a, of positive achievable terms.

    Ties break toward smaller d, then smaller a.  Scans each difference d's
    positive multiples; stops once cap//d cannot beat the best found.
    """
    if mask.modulus is not None:
        raise ValueError("mask must be non-modular")
    if min_len < 2:
        raise ValueError("min_len must be >= 2")
    cap = mask.cap
    buf = mask.bits.to_bytes(cap // 8 + 1, "little")
    best: tuple[int, int, int] | None = None  # (count, d, first)
    d = 1
    while d <= cap:
        max_terms = cap // d
        needed = min_len if best is None else best[0] + 1
        if max_terms < needed:
            break
        run = 0
        best_run = 0
        best_start_j = 0
        for j in range(1, max_terms + 1):
            p = j * d
            if (buf[p >> 3] >> (p & 7)) & 1:
                run += 1
                if run > best_run:
                    best_run = run
                    best_start_j = j - run + 1
            else:
                run = 0
        if best_run >= needed:
            best = (best_run, d, best_start_j * d)
        d += 1
    if best is None:
        return None
    count, d, first = best
    return ProgressionWitness(first=first, diff=d, count=count, homogeneous=True)


# --- residue-set helpers over Z_m (shared by the toolbox and structure) ---


def residues_to_bits(residues, m: int) -> int:
    bits = 0
    for x in residues:
        bits |= 1 << (x % m)
    return bits


def bits_to_residues(bits: int, m: int) -> list[int]:
    return [x for x in range(m) if (bits >> x) & 1]


def rotate_residues(bits: int, shift: int, m: int) -> int:
    """Bitmask of (S + shift) mod m."""
    shift %= m
    if shift == 0:
        return bits
    full = (1 << m) - 1
    return ((bits << shift) | (bits >> (m - shift))) & full


def residue_sumset(xbits: int, ybits: int, m: int) -> int:
    """Bitmask of X + Y in Z_m."""
    out = 0
    rest = ybits
    while rest:
        low = rest & -rest
        out |= rotate_residues(xbits, low.bit_length() - 1, m)
        rest ^= low
    return out


def iterated_sumset_mod(abits: int, m: int, r: int, s: int) -> int:
    """Bitmask of rA - sA in Z_m (0-fold sumsets are {0})."""
    if r < 0 or s < 0 or (r == 0 and s == 0):
        raise ValueError("need r, s >= 0, not both zero")
    neg = residues_to_bits([(-x) % m for x in bits_to_residues(abits, m)], m)
    out = 1  # {0}
    for _ in range(r):
        out = residue_sumset(out, abits, m)
    for _ in range(s):
        out = residue_sumset(out, neg, m)
    return out


def in_proper_coset(residues, m: int) -> bool:
    """True iff the set lies in a coset of a proper subgroup of Z_m."""
    xs = sorted(set(x % m for x in residues))
    if not xs:
        return True
    g = 0
    for x in xs[1:]:
        g = math.gcd(g, x - xs[0])
    g = math.gcd(g, m)
    return g > 1 or m == 1
