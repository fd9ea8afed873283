"""Seeded randomness: every random operation draws from a named substream.

A substream is a `random.Random` seeded by hashing (master seed, stream
name, invocation index), so experiments are bit-reproducible and adding a
new random call in one operation never perturbs another.
"""

import hashlib
import random

__all__ = ["substream"]


def substream(seed: int, name: str, index: int = 0) -> random.Random:
    """Return a deterministic RNG for one named invocation under a master seed."""
    digest = hashlib.sha256(f"{seed}:{name}:{index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))
