"""Certificates and canonical JSON.

Canonical form: sorted keys, compact separators, integers above 2^53
rendered as decimal strings (so they survive any JSON reader), Fractions as
"p/q" strings.  Two identical payloads always serialize byte-identically;
timings never enter certificate payloads.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from fractions import Fraction

__all__ = ["canonical", "canonical_dumps", "Certificate"]

_INT_LIMIT = 1 << 53


def canonical(obj):
    """Recursively convert to JSON-safe values with deterministic rendering."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return obj if -_INT_LIMIT < obj < _INT_LIMIT else str(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return [canonical(v) for v in sorted(obj)]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_json_dict"):
            return canonical(obj.to_json_dict())
        return canonical(dataclasses.asdict(obj))
    if hasattr(obj, "to_json_dict"):
        return canonical(obj.to_json_dict())
    raise TypeError(f"cannot canonicalize {type(obj).__name__}")


def canonical_dumps(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class Certificate:
    """Serializable record of one verified claim."""

    claim: str
    params: dict
    passed: bool
    mode: str = "exact"
    checked: int = 0
    seed: int | None = None
    witness: dict | None = None
    detail: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "claim": self.claim,
            "params": canonical(self.params),
            "pass": self.passed,
            "mode": self.mode,
            "checked": self.checked,
            "seed": self.seed,
            "witness": canonical(self.witness) if self.witness is not None else None,
            "detail": canonical(self.detail),
        }

    def dumps(self) -> str:
        return canonical_dumps(self.to_json_dict())
