"""Deterministic seed derivation for replicated runs.

A 64-bit master seed expands into per-replicate (and per-stream) seeds with
the splitmix64 finalizer.  Replicate ``k`` of any run therefore has a seed
that depends only on ``(master_seed, k)``, never on execution order or worker
count, which is what makes parallel sweeps reproducible.
"""

from __future__ import annotations

import os

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

#: Environment variable consulted for a default master seed.
SEED_ENV_VAR = "PHYLODRIFT_SEED"

#: Master seed used when neither a flag nor the environment provides one.
DEFAULT_MASTER_SEED = 0


def splitmix64(state: int) -> int:
    """One splitmix64 output step for the given 64-bit state."""
    z = (state + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, *keys: int) -> int:
    """Fold integer keys into a master seed, one splitmix64 round per key.

    ``derive_seed(m, k)`` is the seed of replicate ``k`` under master ``m``;
    extra keys address nested streams (grid cells, attachment draws, ...).
    """
    s = splitmix64(int(master_seed) & _MASK64)
    for k in keys:
        s = splitmix64(s ^ (((int(k) + 1) * _GOLDEN) & _MASK64))
    return s


def make_generator(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed (the one RNG family used here)."""
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


def resolve_master_seed(flag_value: int | None) -> int:
    """Pick the master seed: explicit flag, then environment, then default."""
    if flag_value is not None:
        return int(flag_value)
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        return int(env)
    return DEFAULT_MASTER_SEED
