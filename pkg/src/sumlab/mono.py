"""Colorings of [1, n-1] whose classes all avoid m as a subset sum.

The construction colors large elements by how many of them fit under m,
multiples of small primes coprime to m by divisibility, one congruence
family mod a searched d, and packs the dust greedily.  Every class is
re-verified by capped subset-sum DP before a coloring is returned; the
exact small-n optimum comes from a separate backtracking search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import ElementSet, subset_sums
from .numtheory import d_m, euler_phi, primes, tau
from .report import Certificate

__all__ = [
    "ColorClass",
    "Coloring",
    "build_avoiding_coloring",
    "verify_coloring",
    "exact_f",
    "FindYResult",
    "find_y",
]


@dataclass(frozen=True)
class ColorClass:
    label: str  # "S1" | "S2" | "Ss1" | "Ss2" | "leftover" | "trivial"
    key: int  # k for S1, p for S2, residue s for Ss1/Ss2, index for leftover
    elements: tuple[int, ...]

    def name(self) -> str:
        return f"{self.label}({self.key})"

    def to_json_dict(self) -> dict:
        elems = self.elements
        contiguous = len(elems) >= 2 and elems[-1] - elems[0] + 1 == len(elems)
        body = {"label": self.label, "key": self.key}
        if contiguous:
            body["range"] = [elems[0], elems[-1]]
        else:
            body["elements"] = list(elems)
        return body

    @classmethod
    def from_json_dict(cls, d: dict) -> "ColorClass":
        if "range" in d:
            lo, hi = d["range"]
            elems = tuple(range(lo, hi + 1))
        else:
            elems = tuple(d["elements"])
        return cls(label=d["label"], key=d["key"], elements=elems)


@dataclass(frozen=True)
class Coloring:
    n: int
    m: int
    r: int  # the budget the construction was aimed at
    d: int  # step-3 modulus, 1 when the bracket was empty
    regime: str  # "small-m" | "large-m"
    classes: tuple[ColorClass, ...]

    @property
    def color_count(self) -> int:
        return len(self.classes)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "r": self.r,
            "d": self.d,
            "regime": self.regime,
            "classes": [c.to_json_dict() for c in self.classes],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Coloring":
        return cls(
            n=d["n"],
            m=d["m"],
            r=d["r"],
            d=d["d"],
            regime=d["regime"],
            classes=tuple(ColorClass.from_json_dict(c) for c in d["classes"]),
        )


def _class_avoids(elements, m: int) -> tuple[bool, int]:
    """(avoids m, largest achievable sum <= m), with the DP run on gcd-reduced values."""
    elems = tuple(elements)
    if not elems:
        return True, 0
    g = 0
    for a in elems:
        g = math.gcd(g, a)
    reduced = [a // g for a in elems]
    cap = min(m // g, sum(reduced))
    mask = subset_sums(ElementSet.of(reduced, multiset=True), cap=cap)
    hits = g * (m // g) == m and (m // g) in mask
    top = mask.bits.bit_length() - 1  # highest set bit = max achievable <= cap
    return not hits, g * top


def _regime(n: int, m: int) -> str:
    if n < 3:
        return "small-m"
    cut = n**1.5 * math.sqrt(max(math.log(math.log(n)), 1e-9)) / math.sqrt(math.log(n))
    return "small-m" if m <= cut else "large-m"


def _search_d(n: int, m: int, r: int, kappa: float) -> int:
    """Largest multiple of d_m in the step-3 bracket, coprime to m and p_{r/4}-smooth."""
    if r < 4 or m < 2 or n < 3:
        return 1
    base = d_m(m)
    mid = kappa * (euler_phi(m) / m) * r * math.log(math.log(n))
    lo = math.ceil(mid / 64)
    hi = math.floor(mid / 32)
    if hi < max(lo, 2):
        return 1
    p_cut = primes.nth(max(r // 4, 1))
    best = 1
    for d in range((lo // base) * base, hi + 1, base):
        if d < max(lo, 2) or math.gcd(d, m) != 1:
            continue
        if max(_prime_factors(d)) > p_cut:
            continue
        best = max(best, d)
    return best


def _prime_factors(d: int) -> list[int]:
    from .numtheory import factorize

    return list(factorize(d)) if d > 1 else [1]


def _construct(n: int, m: int, r: int, d_override: int | None, kappa: float, regime: str):
    assigned = bytearray(n)  # index v for v in [1, n-1]
    classes: list[ColorClass] = []

    def take(values) -> tuple[int, ...]:
        got = []
        for v in values:
            if 1 <= v <= n - 1 and not assigned[v]:
                assigned[v] = 1
                got.append(v)
        return tuple(got)

    d = 1
    if regime == "small-m":
        for k in range(1, r // 2 + 1):
            if k == 1:
                lo, hi = (m + 1) // 2, min(m - 1, n - 1)
            else:
                lo, hi = (m + k) // (k + 1), min(m // k, n - 1)
            if lo > hi:
                continue
            got = take(range(lo, hi + 1))
            if got:
                classes.append(ColorClass("S1", k, got))
        used_primes = 0
        p_idx = 1
        while used_primes < r // 4:
            p = primes.nth(p_idx)
            p_idx += 1
            if p >= n:
                break
            if m % p == 0:
                continue
            used_primes += 1
            got = take(range(p, n, p))
            if got:
                classes.append(ColorClass("S2", p, got))
        d = d_override if d_override is not None else _search_d(n, m, r, kappa)
        if d > 1:
            for s in range(1, d):
                if math.gcd(s, d) != 1:
                    continue
                x_s = (pow(s, -1, d) * m) % d or d
                s1 = take(
                    v for v in range(s, n, d) if not assigned[v] and v * x_s >= m
                )
                if s1:
                    classes.append(ColorClass("Ss1", s, s1))
                s2 = take(
                    v
                    for v in range(s, n, d)
                    if not assigned[v] and v * (d + x_s) >= m and v * x_s < m
                )
                if s2:
                    classes.append(ColorClass("Ss2", s, s2))
    else:
        used_primes = 0
        p_idx = 1
        while used_primes < 7 * r // 8:
            p = primes.nth(p_idx)
            p_idx += 1
            if p >= n:
                break
            if m % p == 0:
                continue
            used_primes += 1
            got = take(range(p, n, p))
            if got:
                classes.append(ColorClass("S2", p, got))
    # Pack what is left greedily by descending value into classes with sum < m.
    leftovers = [v for v in range(n - 1, 0, -1) if not assigned[v]]
    bins: list[tuple[int, list[int]]] = []  # (current sum, members)
    for v in leftovers:
        placed = False
        for i, (total, members) in enumerate(bins):
            if total + v < m:
                bins[i] = (total + v, members + [v])
                placed = True
                break
        if not placed:
            bins.append((v, [v]))
    for i, (_, members) in enumerate(bins):
        classes.append(ColorClass("leftover", i, tuple(sorted(members))))
    return classes, d


def build_avoiding_coloring(
    n: int,
    m: int,
    r_override: int | None = None,
    d_override: int | None = None,
    kappa: float = 1.0,
) -> Coloring:
    """Construct a coloring of [1, n-1] with no class reaching m.

    Without r_override, r doubles from 2 until the construction fits within
    r colors; the returned coloring is always fully DP-verified, and a class
    that fails verification raises by name (that would mean the parameters
    are outside the construction's validity).
    """
    if m < 1 or n < 2:
        raise ValueError("need n >= 2 and m >= 1")
    regime = _regime(n, m)
    if r_override is not None:
        candidates = [r_override]
    else:
        candidates = []
        r = 2
        while r <= max(4 * n, 16):
            candidates.append(r)
            r *= 2
    chosen = None
    for r in candidates:
        classes, d = _construct(n, m, r, d_override, kappa, regime)
        if len(classes) <= r or r_override is not None:
            chosen = (r, classes, d)
            break
    if chosen is None:  # cannot happen: with r >= n-1 every element fits its own class
        raise ValueError(f"construction never fit within r <= {candidates[-1]}")
    r, classes, d = chosen
    for c in classes:
        ok, _ = _class_avoids(c.elements, m)
        if not ok:
            raise ValueError(f"class {c.name()} fails to avoid m={m}")
    return Coloring(n=n, m=m, r=r, d=d, regime=regime, classes=tuple(classes))


def verify_coloring(coloring: Coloring) -> Certificate:
    """Partition check plus capped DP per class; certifies no class reaches m."""
    n, m = coloring.n, coloring.m
    seen = bytearray(n)
    for c in coloring.classes:
        for v in c.elements:
            if not 1 <= v <= n - 1 or seen[v]:
                raise ValueError(f"classes do not partition [1, n-1]: duplicate or range at {v}")
            seen[v] = 1
    if any(not seen[v] for v in range(1, n)):
        missing = next(v for v in range(1, n) if not seen[v])
        raise ValueError(f"classes do not partition [1, n-1]: {missing} uncovered")
    per_class = {}
    passed = True
    for c in coloring.classes:
        ok, top = _class_avoids(c.elements, m)
        per_class[c.name()] = top
        passed = passed and ok
    return Certificate(
        claim="coloring-avoids-m",
        params={"n": n, "m": m, "r": coloring.r, "d": coloring.d, "regime": coloring.regime},
        passed=passed,
        mode="exact",
        checked=len(coloring.classes),
        detail={"colors": coloring.color_count, "max_achievable": per_class},
    )


def exact_f(n: int, m: int, r_max: int = 12) -> int | None:
    """Minimum colors for [1, n-1] with no class summing to m; None if > r_max.

    Backtracking over elements in decreasing order with per-class achievable
    masks; an element may join any used class or one fresh class.  The found
    optimum is cross-checked through verify_coloring.
    """
    if n > 14:
        raise ValueError("exact_f guarded to n <= 14")
    if n < 1 or m < 1:
        raise ValueError("need n, m >= 1")
    elements = list(range(n - 1, 0, -1))
    if not elements:
        return 0
    if m <= n - 1:
        return None  # the class containing m always reaches it
    full = (1 << (m + 1)) - 1
    target_bit = 1 << m

    def fits(r: int) -> list[list[int]] | None:
        masks: list[int] = []
        groups: list[list[int]] = []

        def go(i: int) -> bool:
            if i == len(elements):
                return True
            v = elements[i]
            for ci in range(len(masks)):
                new = (masks[ci] | (masks[ci] << v)) & full
                if not new & target_bit:
                    old = masks[ci]
                    masks[ci] = new
                    groups[ci].append(v)
                    if go(i + 1):
                        return True
                    masks[ci] = old
                    groups[ci].pop()
            if len(masks) < r:
                # one fresh class; further empty classes are symmetric to it
                new = (1 | (1 << v)) & full
                if not new & target_bit:
                    masks.append(new)
                    groups.append([v])
                    if go(i + 1):
                        return True
                    masks.pop()
                    groups.pop()
            return False

        return groups if go(0) else None

    for r in range(0, r_max + 1):
        groups = fits(r)
        if groups is not None:
            classes = tuple(
                ColorClass("trivial", i, tuple(sorted(g))) for i, g in enumerate(groups) if g
            )
            coloring = Coloring(n=n, m=m, r=r, d=1, regime="exact", classes=classes)
            cert = verify_coloring(coloring)
            assert cert.passed, "backtracker produced an invalid coloring"
            return r
    return None


@dataclass(frozen=True)
class FindYResult:
    status: str  # "ok" | "no y at this scale"
    y: int | None
    bracket: tuple[int, int] | None  # integer y range satisfying the two inequalities
    y_large_enough: bool | None  # y >= max(r^2, n^(3/5))
    qu_count_ok: bool | None  # 64 (m/phi m) tau(r,m) y / (r log r) > n^(1/4)


def find_y(n: int, m: int, r: int) -> FindYResult:
    """Integer y < n/2 with m inside [y^2 Q / 25r, y^2 Q / 15r], Q = (m/phi m) tau(r, m)."""
    if n < 3:
        raise ValueError("n must be >= 3")
    Q = Fraction(m, euler_phi(m)) * tau(r, m)
    lo2 = Fraction(15 * r * m) / Q  # y^2 >= lo2
    hi2 = Fraction(25 * r * m) / Q  # y^2 <= hi2
    y_min = math.isqrt(lo2.numerator // lo2.denominator)
    while y_min * y_min * lo2.denominator < lo2.numerator:
        y_min += 1
    y_max = math.isqrt(hi2.numerator // hi2.denominator) + 1
    while y_max * y_max * hi2.denominator > hi2.numerator:
        y_max -= 1
    y_cap = (n - 1) // 2  # y < n/2
    y_max = min(y_max, y_cap)
    if y_min > y_max:
        return FindYResult(status="no y at this scale", y=None, bracket=None, y_large_enough=None, qu_count_ok=None)
    y = y_min
    # exact post-checks of both inequalities
    assert 15 * r * m <= y * y * Q <= 25 * r * m
    large_enough = y >= r * r and y**5 >= n**3
    qu_ok = 64 * float(Q) * y / (r * math.log(max(r, 2))) > n**0.25
    return FindYResult(
        status="ok",
        y=y,
        bracket=(y_min, y_max),
        y_large_enough=large_enough,
        qu_count_ok=qu_ok,
    )
