"""Deterministic seed derivation for samplers, oracles and trials.

All randomness flows from a single 64-bit master seed.  Substreams are
derived by folding a stream label and integer indices into the master
seed with the splitmix64 finalizer, and the result feeds numpy's PCG64.
Identical (master_seed, label, indices) always yield identical streams
within this implementation; cross-implementation bit-exactness is not a
goal.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1

# splitmix64 finalizer constants (Steele/Lea/Flood 2014).
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """splitmix64 avalanche of a 64-bit value."""
    x = (x + _GAMMA) & _MASK64
    x ^= x >> 30
    x = (x * _MIX1) & _MASK64
    x ^= x >> 27
    x = (x * _MIX2) & _MASK64
    x ^= x >> 31
    return x


def _fold(h: int, v: int) -> int:
    return mix64(h ^ (v & _MASK64))


def derive_seed(master_seed: int, label: str, *indices: int) -> int:
    """Derive a 64-bit substream seed from (master, label, indices)."""
    h = mix64(master_seed & _MASK64)
    for byte in label.encode("utf-8"):
        h = _fold(h, byte)
    for idx in indices:
        h = _fold(h, idx)
    return h


def rng_from(master_seed: int, label: str, *indices: int) -> np.random.Generator:
    """A PCG64 generator on the derived substream."""
    return np.random.default_rng(derive_seed(master_seed, label, *indices))


@dataclass(frozen=True)
class SeedSpec:
    """Root of a reproducible seed tree.

    Stream labels name what is being sampled (oracle tables, hidden sets,
    per-trial randomness); indices disambiguate repetitions.
    """

    master_seed: int

    def child(self, label: str, *indices: int) -> int:
        return derive_seed(self.master_seed, label, *indices)

    def spawn(self, label: str, *indices: int) -> "SeedSpec":
        return SeedSpec(self.child(label, *indices))

    def rng(self, label: str, *indices: int) -> np.random.Generator:
        return rng_from(self.master_seed, label, *indices)
