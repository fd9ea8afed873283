"""Desk-scale laboratory for subset sums, completeness, and sum-avoiding colorings."""

__version__ = "0.1.0"

from .core import (
    BoundedSumTable,
    ElementSet,
    HypothesisError,
    IntervalWitness,
    ProgressionWitness,
    ResourceBudgetError,
    SumMask,
    find_homog_progression,
    longest_interval,
    subset_sums,
    subset_sums_bounded,
    subset_sums_mod,
)
from .report import Certificate, canonical_dumps

__all__ = [
    "__version__",
    "ElementSet",
    "SumMask",
    "BoundedSumTable",
    "IntervalWitness",
    "ProgressionWitness",
    "HypothesisError",
    "ResourceBudgetError",
    "subset_sums",
    "subset_sums_mod",
    "subset_sums_bounded",
    "longest_interval",
    "find_homog_progression",
    "Certificate",
    "canonical_dumps",
]
