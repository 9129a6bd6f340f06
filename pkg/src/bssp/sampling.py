"""Samplers for Simon's functions, injective functions and permutations.

Function tables are dense numpy int64 arrays (domain sizes capped at
2^24), which keeps oracle application an O(1) lookup.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, ResourceError
from .seeding import rng_from

MAX_PERM_BITS = 24

MODE_SIMON = "simon"
MODE_INJECTIVE = "injective"


@dataclass(frozen=True)
class SimonsInstance:
    """A function f: Z_2^n -> Z_2^n, either two-to-one with a period or injective."""

    n: int
    mode: str
    table: np.ndarray
    period: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "table", np.asarray(self.table, dtype=np.int64))
        self.table.setflags(write=False)
        self.validate()

    def validate(self):
        size = 1 << self.n
        if self.table.shape != (size,):
            raise ContractViolation(f"table length {self.table.shape} != 2^{self.n}")
        if self.table.min() < 0 or self.table.max() >= size:
            raise ContractViolation("table values outside Z_2^n")
        if self.mode == MODE_SIMON:
            if not self.period or not 0 < self.period < size:
                raise ContractViolation("simon mode requires a nonzero period")
            xs = np.arange(size)
            if not np.array_equal(self.table[xs], self.table[xs ^ self.period]):
                raise ContractViolation("table does not have the claimed period")
            if len(np.unique(self.table)) != size // 2:
                raise ContractViolation("simon table is not two-to-one")
        elif self.mode == MODE_INJECTIVE:
            if self.period is not None:
                raise ContractViolation("injective mode carries no period")
            if len(np.unique(self.table)) != size:
                raise ContractViolation("injective table has repeated values")
        else:
            raise ContractViolation(f"unknown mode {self.mode!r}")

    def __call__(self, x: int) -> int:
        return int(self.table[x])


@dataclass(frozen=True)
class Permutation:
    """A bijection of {0, ..., size-1} stored as an image table."""

    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "table", np.asarray(self.table, dtype=np.int64))
        self.table.setflags(write=False)
        sorted_copy = np.sort(self.table)
        if not np.array_equal(sorted_copy, np.arange(self.size)):
            raise ContractViolation("table is not a bijection")

    @property
    def size(self) -> int:
        return len(self.table)

    def __call__(self, x: int) -> int:
        return int(self.table[x])

    def inverse(self) -> "Permutation":
        inv = np.empty(self.size, dtype=np.int64)
        inv[self.table] = np.arange(self.size)
        return Permutation(inv)

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: x -> self(other(x))."""
        if other.size != self.size:
            raise ContractViolation("size mismatch in composition")
        return Permutation(self.table[other.table])

    @classmethod
    def identity(cls, size: int) -> "Permutation":
        return cls(np.arange(size))


def sample_permutation(m: int, seed: int) -> Permutation:
    """Uniform permutation of Z_2^m via numpy's unbiased shuffle."""
    if m < 0:
        raise ContractViolation("m must be nonnegative")
    if m > MAX_PERM_BITS:
        raise ResourceError(
            f"permutation over 2^{m} elements exceeds the 2^{MAX_PERM_BITS} cap",
            required=m, available=MAX_PERM_BITS)
    rng = rng_from(seed, "permutation")
    return Permutation(rng.permutation(1 << m))


def sample_simons_function(n: int, seed: int) -> SimonsInstance:
    """Uniform Simon's function: uniform nonzero period, cosets mapped by a
    uniform injection of the 2^(n-1) cosets into Z_2^n.

    Cosets {x, x^s} are enumerated by lowest representative and assigned the
    first 2^(n-1) values of a shuffled codomain.
    """
    if n < 1:
        raise ContractViolation("n=0 admits no nonzero period")
    size = 1 << n
    rng = rng_from(seed, "simons-function")
    s = int(rng.integers(1, size))
    codomain = rng.permutation(size)
    table = np.empty(size, dtype=np.int64)
    slot = 0
    for x in range(size):
        if x < (x ^ s):  # lowest coset representative
            table[x] = table[x ^ s] = codomain[slot]
            slot += 1
    return SimonsInstance(n=n, mode=MODE_SIMON, table=table, period=s)


def sample_injective_function(n: int, seed: int) -> SimonsInstance:
    """Uniform one-to-one function from Z_2^n to Z_2^n (a permutation table)."""
    if n < 1:
        raise ContractViolation("n must be positive")
    rng = rng_from(seed, "injective-function")
    return SimonsInstance(n=n, mode=MODE_INJECTIVE, table=rng.permutation(1 << n))


def sample_instance(n: int, mode: str, seed: int) -> SimonsInstance:
    if mode == MODE_SIMON:
        return sample_simons_function(n, seed)
    if mode == MODE_INJECTIVE:
        return sample_injective_function(n, seed)
    raise ContractViolation(f"unknown mode {mode!r}")
