"""Expansion of one top-level seed into independent per-component generators."""

from __future__ import annotations

import hashlib

import numpy as np


def _name_key(name: str | int) -> int:
    if isinstance(name, int):
        return name
    digest = hashlib.blake2b(name.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def component_seed(seed: int, *names: str | int) -> np.random.SeedSequence:
    """Return a seed sequence for the component addressed by ``names``.

    The derivation only depends on ``seed`` and the names, never on the order in which
    components ask for their generators.
    """
    if seed < 0:
        msg = "seed must be non-negative"
        raise ValueError(msg)
    return np.random.SeedSequence(seed, spawn_key=tuple(_name_key(name) for name in names))


def component_rng(seed: int, *names: str | int) -> np.random.Generator:
    """Return a generator for the component addressed by ``names``."""
    return np.random.default_rng(component_seed(seed, *names))
