"""Structural preprocessing: diversity, divisor peeling, and the phase process.

A set is k-diverse when every modulus v >= 2 misses at least k elements.
Diverse sets have large modular subset sums; the operations here massage an
arbitrary set toward that situation (peeling common divisors, stripping
sparse dyadic slices) and instrument the iterative mod-b building process
with its growth / unsaturated / saturated phase labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    ElementSet,
    SumMask,
    residues_to_bits,
    rotate_residues,
    subset_sums_mod,
)
from .numtheory import divisors
from .rng import substream

__all__ = [
    "DiversityReport",
    "is_k_diverse",
    "DecompositionTrace",
    "diverse_decompose",
    "ModFullReport",
    "sigma_mod_full",
    "NiceParams",
    "DESK_NICE",
    "NiceTrace",
    "nice_decompose",
    "PhaseStep",
    "PhaseLog",
    "phase_process",
]


@dataclass(frozen=True)
class DiversityReport:
    k: int
    diverse: bool
    witness: int | None = None  # smallest v >= 2 with fewer than k non-multiples
    witness_count: int | None = None
    per_v: dict[int, int] | None = None  # v -> non-multiple count, on request

    def __post_init__(self):
        if self.diverse == (self.witness is not None):
            raise ValueError("witness present iff not diverse")


def _nondiv_counts(elems: tuple[int, ...]) -> list[int]:
    """counts[v] = number of elements not divisible by v, via a counting sieve."""
    top = elems[-1] if elems else 1
    present = [0] * (top + 1)
    for a in elems:
        present[a] += 1
    size = len(elems)
    counts = [0, 0] + [0] * max(top - 1, 0)
    for v in range(2, top + 1):
        counts[v] = size - sum(present[v::v])
    return counts


def is_k_diverse(A, k: int, want_counts: bool = False) -> DiversityReport:
    """For every v >= 2, do at least k elements of A avoid divisibility by v?"""
    if k < 1:
        raise ValueError("k must be >= 1")
    elems = A.elements if isinstance(A, ElementSet) else tuple(sorted(A))
    if len(elems) < k:
        # any v beyond max(A) already fails; report the smallest such v
        return DiversityReport(k=k, diverse=False, witness=2, witness_count=sum(1 for a in elems if a % 2))
    counts = _nondiv_counts(elems)
    per_v = {v: counts[v] for v in range(2, len(counts))} if want_counts else None
    for v in range(2, len(counts)):
        if counts[v] < k:
            return DiversityReport(k=k, diverse=False, witness=v, witness_count=counts[v], per_v=per_v)
    return DiversityReport(k=k, diverse=True, per_v=per_v)


@dataclass(frozen=True)
class DecompositionTrace:
    steps: tuple[tuple[int, tuple[int, ...]], ...]  # (divisor v_i, removed elements)
    final: ElementSet
    divisor: int  # product of the v_i
    status: str  # "diverse" | "stuck"

    def restore(self) -> list[int]:
        """Original elements reachable from the trace: divisor * final plus removals."""
        out = [self.divisor * x for x in self.final]
        v = 1
        for vi, removed in self.steps:
            out.extend(v * r for r in removed)
            v *= vi
        return sorted(out)


def diverse_decompose(A, k: int, removal_budget: int) -> DecompositionTrace:
    """Peel divisors until k-diverse: drop <= budget non-multiples, divide the rest.

    Each step picks the largest v >= 2 whose non-multiples fit both the
    diversity defect (< k) and the removal budget, so gcd-like factors are
    taken in one step.  Returns a full trace; a set that cannot be repaired
    ends with status "stuck" rather than an exception.
    """
    if k < 1 or removal_budget < 0:
        raise ValueError("need k >= 1 and removal_budget >= 0")
    original = A.elements if isinstance(A, ElementSet) else tuple(sorted(A))
    cur = list(original)
    steps: list[tuple[int, tuple[int, ...]]] = []
    v_total = 1
    max0 = original[-1] if original else 1
    while True:
        report = is_k_diverse(ElementSet.of(cur, multiset=True), k)
        if report.diverse:
            status = "diverse"
            break
        counts = _nondiv_counts(tuple(sorted(cur))) if cur else [0, 0]
        best_v = None
        for v in range(2, len(counts)):
            if counts[v] < k and counts[v] <= removal_budget and counts[v] < len(cur):
                best_v = v
        if best_v is None:
            status = "stuck"
            break
        removed = tuple(sorted(a for a in cur if a % best_v))
        cur = sorted(a // best_v for a in cur if a % best_v == 0)
        steps.append((best_v, removed))
        v_total *= best_v
        assert v_total <= max0, "cumulative divisor exceeded max element"
        assert len(steps) <= max(1, math.ceil(math.log2(max0 + 1))), "too many peeling steps"
    return DecompositionTrace(
        steps=tuple(steps),
        final=ElementSet.of(cur, multiset=True),
        divisor=v_total,
        status=status,
    )


@dataclass(frozen=True)
class ModFullReport:
    d: int
    hypotheses: tuple[tuple[int, int, bool], ...]  # (d', non-multiples, holds)
    all_hold: bool
    full: bool
    nonzero_subgroup: int | None  # generator e of a subgroup e*Z_d inside the mask


def sigma_mod_full(A, d: int) -> tuple[SumMask, ModFullReport]:
    """Sigma_d(A) plus the divisor-count hypotheses that force it to be all of Z_d."""
    if d < 1:
        raise ValueError("d must be >= 1")
    elems = A.elements if isinstance(A, ElementSet) else tuple(sorted(A))
    mask = subset_sums_mod(elems, d)
    full = mask.count() == d
    hyps = []
    all_hold = True
    for dp in divisors(d):
        if dp < 2:
            continue
        nondiv = sum(1 for a in elems if a % dp)
        holds = nondiv >= dp - 1
        all_hold = all_hold and holds
        hyps.append((dp, nondiv, holds))
    if all_hold:
        assert full, "hypotheses hold but Sigma_d(A) is not all of Z_d"
    subgroup = None
    for e in divisors(d):
        if e == d and d != 1:
            continue  # {0} is the zero subgroup
        sub_bits = residues_to_bits(range(0, d, e), d)
        if mask.bits & sub_bits == sub_bits:
            subgroup = e
            break
    nondiv_d = sum(1 for a in elems if a % d)
    if d > 1 and nondiv_d >= d - 1:
        assert subgroup is not None, "second clause: mask must contain a nonzero subgroup"
    return mask, ModFullReport(
        d=d, hypotheses=tuple(hyps), all_hold=all_hold, full=full, nonzero_subgroup=subgroup
    )


@dataclass(frozen=True)
class NiceParams:
    """Thresholds for the two niceness conditions; defaults follow the proofs.

    Condition 1: no d in [2, 8*ell*n/|A|] has all but <= t1 + t2*d elements
    divisible by d.  Condition 2: every dyadic slice of [n] holds none of A,
    at least `density` elements, or is fully contained in A (the saturation
    exemption keeps tiny slices like {1} from being stripped at desk scale).
    """

    ell: int = 2**15
    t1: float | None = None  # default 512 * ell * (log n)^2
    t2: float | None = None  # default 64 * ell
    density: float | None = None  # default 64 * ell * log n

    def resolve(self, n: int) -> tuple[int, float, float, float]:
        ln = math.log(max(n, 2))
        t1 = 512 * self.ell * ln * ln if self.t1 is None else self.t1
        t2 = 64 * self.ell if self.t2 is None else self.t2
        density = 64 * self.ell * ln if self.density is None else self.density
        return self.ell, t1, t2, density


DESK_NICE = NiceParams(ell=1, t1=0, t2=1, density=2)


@dataclass(frozen=True)
class NiceTrace:
    final: ElementSet
    divisor: int
    ambient: int  # the [n] the final set lives in
    steps: tuple[tuple[str, int, tuple[int, ...]], ...]  # (rule, d, removed)
    status: str  # "nice" | "too-lossy" | "stuck"
    params: NiceParams


def _dyadic_slices(n: int):
    j = 1
    while 2 ** (j - 1) <= n:
        lo = 2 ** (j - 1)
        hi = min(2**j - 1, n)
        yield j, lo, hi
        j += 1


def _niceness_failure(elems: list[int], n: int, params: NiceParams):
    """None if nice; else ("divisor", d) or ("dyadic", [slice bounds])."""
    ell, t1, t2, density = params.resolve(n)
    size = len(elems)
    if size == 0:
        return ("empty", 0)
    top = elems[-1]
    present = [0] * (top + 1)
    for a in elems:
        present[a] = 1
    d_hi = int(8 * ell * n / size)
    for d in range(2, d_hi + 1):
        mult = sum(present[d::d]) if d <= top else 0
        if size - mult <= t1 + t2 * d:
            return ("divisor", d)
    sparse = []
    for j, lo, hi in _dyadic_slices(n):
        cnt = sum(present[lo : min(hi, top) + 1]) if lo <= top else 0
        if cnt == 0 or cnt >= density or cnt == hi - lo + 1:
            continue
        sparse.append((lo, hi))
    if sparse:
        return ("dyadic", sparse)
    return None


def nice_decompose(A, n: int, params: NiceParams = NiceParams()) -> NiceTrace:
    """Peel to a nice subset: divide out dominant d's, strip sparse dyadic slices.

    Stops as soon as the running set is nice, keeps the total loss below
    half of |A| (else status "too-lossy"), and reports "stuck" when
    condition 1 fails but every qualifying divisor would empty the set.
    """
    original = A.elements if isinstance(A, ElementSet) else tuple(sorted(A))
    cur = list(original)
    n_i = n
    d_total = 1
    steps: list[tuple[str, int, tuple[int, ...]]] = []
    while True:
        if len(cur) < len(original) / 2:
            status = "too-lossy"
            break
        failure = _niceness_failure(cur, n_i, params)
        if failure is None:
            status = "nice"
            break
        kind, payload = failure
        if kind == "empty":
            status = "too-lossy"
            break
        if kind == "divisor":
            ell, t1, t2, _ = params.resolve(n_i)
            size = len(cur)
            d_hi = int(8 * ell * n_i / size)
            chosen = None
            for d in range(2, d_hi + 1):
                kept = [a for a in cur if a % d == 0]
                if size - len(kept) <= t1 + t2 * d and kept:
                    chosen = d
                    break
            if chosen is None:
                status = "stuck"
                break
            removed = tuple(a for a in cur if a % chosen)
            cur = sorted(a // chosen for a in cur if a % chosen == 0)
            n_i //= chosen
            d_total *= chosen
            steps.append(("divide", chosen, removed))
        else:
            doomed = {a for a in cur for lo, hi in payload if lo <= a <= hi}
            removed = tuple(sorted(doomed))
            cur = [a for a in cur if a not in doomed]
            steps.append(("strip", 1, removed))
    final = ElementSet.of(cur) if cur else ElementSet.of([])
    if cur and status == "nice":
        assert _niceness_failure(list(final.elements), n_i, params) is None
    return NiceTrace(
        final=final, divisor=d_total, ambient=n_i, steps=tuple(steps), status=status, params=params
    )


@dataclass(frozen=True)
class PhaseStep:
    index: int
    d: int
    phase: str  # "growth" | "unsaturated" | "saturated"
    element: int
    size_before: int
    size_after: int


@dataclass(frozen=True)
class PhaseLog:
    b: int
    seed: int
    split_ratio: Fraction
    start_part: tuple[int, ...]  # A'' residues seeding the mask
    pick_pool: tuple[int, ...]  # A' residues the process draws from
    steps: tuple[PhaseStep, ...]
    final_residues: tuple[int, ...]
    hypotheses_hold: bool
    bound: int | None  # min(|A|^2/256, b/4) when asserted

    def to_json_dict(self) -> dict:
        return {
            "b": self.b,
            "seed": self.seed,
            "split_ratio": str(self.split_ratio),
            "start_part": list(self.start_part),
            "pick_pool": list(self.pick_pool),
            "steps": [
                {
                    "index": s.index,
                    "d": s.d,
                    "phase": s.phase,
                    "element": s.element,
                    "size_before": s.size_before,
                    "size_after": s.size_after,
                }
                for s in self.steps
            ],
            "final_residues": list(self.final_residues),
            "hypotheses_hold": self.hypotheses_hold,
            "bound": self.bound,
        }


def _coset_sizes(bits: int, b: int, d: int) -> list[int]:
    """|mask intersect (u + d Z_b)| for each u in 0..d-1."""
    sizes = [0] * d
    rest = bits
    while rest:
        low = rest & -rest
        sizes[(low.bit_length() - 1) % d] += 1
        rest ^= low
    return sizes


def _structure1_hypotheses(residues: list[int], b: int) -> bool:
    m = len(residues)
    if not (80 * math.log(b) ** 2 < m <= b):
        return False
    for d in divisors(b):
        if d < 2 or d > 4 * b / m:
            continue
        nondiv = sum(1 for a in residues if a % d)
        if nondiv < 64 * math.log(b) ** 2 + 8 * d:
            return False
    return True


def phase_process(
    A,
    b: int,
    split_ratio: Fraction = Fraction(3, 4),
    k_cap: int | None = None,
    seed: int = 0,
    growth_frac: Fraction = Fraction(1, 4),
    sat_frac: Fraction = Fraction(1, 4),
) -> PhaseLog:
    """Run the iterative mod-b builder and label each step's phase.

    The seed mask is one random part of A (the paper's short-sum trick);
    elements of the other part are added one by one, chosen by the
    phase-appropriate argmax (subgroup growth during growth phases, plain
    mask growth otherwise).  Ties break toward the smallest element.
    """
    if b < 2:
        raise ValueError("b must be >= 2")
    elems = [a % b for a in (A.elements if isinstance(A, ElementSet) else A)]
    if not elems:
        raise ValueError("A must be nonempty")
    rng = substream(seed, "phase-process")
    order = sorted(range(len(elems)), key=lambda i: (elems[i], i))
    prime_size = int(split_ratio * len(elems))
    chosen = set(rng.sample(order, prime_size))
    prime_part = sorted(elems[i] for i in chosen)  # A', drawn from
    start_part = sorted(elems[i] for i in order if i not in chosen)  # A''
    sigma = residues_to_bits(start_part, b) if start_part else 1
    remaining = list(prime_part)
    picked: list[int] = []
    if k_cap is None:
        k_cap = math.ceil(1280 * b / len(elems))
    steps: list[PhaseStep] = []
    total_steps = min(len(remaining), k_cap)
    for i in range(1, total_steps + 1):
        g = 0
        for a in remaining:
            g = math.gcd(g, a)
        d_i = math.gcd(g, b) or b
        sizes = _coset_sizes(sigma, b, d_i)
        cur_size = sigma.bit_count()
        pool = len(remaining)
        growth_cut = Fraction(pool) * growth_frac
        sat_cut = Fraction(b, d_i) * sat_frac
        nonempty = [s for s in sizes if s > 0]
        if any(0 < s <= growth_cut for s in sizes):
            phase = "growth"
        elif any(growth_cut < s < sat_cut for s in nonempty):
            phase = "unsaturated"
        else:
            phase = "saturated"
        if phase == "growth":
            sub_m = b // d_i
            sub = [a // d_i for a in picked if a % d_i == 0]
            sig_d = subset_sums_mod(sub, sub_m).bits
            base = sig_d.bit_count()
            best_a, best_gain = None, -1
            for a in sorted(set(remaining)):
                gain = (sig_d | rotate_residues(sig_d, a // d_i, sub_m)).bit_count() - base
                if gain > best_gain:
                    best_a, best_gain = a, gain
        else:
            best_a, best_gain = None, -1
            for a in sorted(set(remaining)):
                gain = (sigma | rotate_residues(sigma, a, b)).bit_count() - cur_size
                if gain > best_gain:
                    best_a, best_gain = a, gain
        sigma |= rotate_residues(sigma, best_a, b)
        remaining.remove(best_a)
        picked.append(best_a)
        steps.append(
            PhaseStep(
                index=i,
                d=d_i,
                phase=phase,
                element=best_a,
                size_before=cur_size,
                size_after=sigma.bit_count(),
            )
        )
    hyps = _structure1_hypotheses(elems, b)
    bound = None
    if hyps:
        bound = min(len(elems) ** 2 // 256, b // 4)
        assert sigma.bit_count() >= bound, "structure-1 size bound violated"
    return PhaseLog(
        b=b,
        seed=seed,
        split_ratio=split_ratio,
        start_part=tuple(start_part),
        pick_pool=tuple(prime_part),
        steps=tuple(steps),
        final_residues=tuple(x for x in range(b) if (sigma >> x) & 1),
        hypotheses_hold=hyps,
        bound=bound,
    )
