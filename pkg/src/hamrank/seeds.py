"""Deterministic named seed streams.

Every source of randomness in the package is derived from a single root
seed through named substreams, so any component of a run can be re-derived
in isolation and reruns are bit-for-bit reproducible.
"""

from __future__ import annotations

import hashlib
import random


def seed_stream(root_seed: int, *names: int | str) -> int:
    """Derive a 64-bit substream seed from ``root_seed`` and a path of names.

    The derivation is a SHA-256 hash of a canonical string, so it is stable
    across processes and platforms (unlike ``hash()``).
    """
    material = "hamrank:{}:{}".format(root_seed, "/".join(str(n) for n in names))
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def rng_stream(root_seed: int, *names: int | str) -> random.Random:
    """A ``random.Random`` seeded from the named substream."""
    return random.Random(seed_stream(root_seed, *names))
