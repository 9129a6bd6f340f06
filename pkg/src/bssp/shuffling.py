"""Shufflings of Simon's / injective functions behind chains of permutations.

A shuffling hides f behind d random permutations of the enlarged domain
Z_2^((d+2)n); the final stage is only defined on the image S_d of the
true domain.  The bijective variant replaces that partial map with a
total map plus two flag bits so an in-place unitary oracle exists.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .sampling import MODE_SIMON, Permutation, SimonsInstance
from .seeding import rng_from


def embed_width(n: int, d: int) -> int:
    """Bit width of the enlarged domain."""
    return (d + 2) * n


@dataclass(frozen=True)
class Shuffling:
    """Permutations f_0..f_{d-1} plus the partial final map.

    sets[j] is S_j (sorted): S_0 = {0..2^n-1}, S_{j+1} = f_j(S_j).
    final[x] is f_d(x) for x in S_d and -1 (undefined) elsewhere.
    """

    d: int
    instance: SimonsInstance
    perms: tuple[Permutation, ...]
    sets: tuple[np.ndarray, ...]
    final: np.ndarray

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def width(self) -> int:
        return embed_width(self.n, self.d)

    @property
    def domain_size(self) -> int:
        return 1 << self.width


def build_shuffling(d: int, instance: SimonsInstance,
                    perms: list[Permutation]) -> Shuffling:
    """Assemble the S-chain and the partial final map from d permutations."""
    if d < 1:
        raise ContractViolation("d must be at least 1")
    if len(perms) != d:
        raise ContractViolation(f"expected {d} permutations, got {len(perms)}")
    size = 1 << embed_width(instance.n, d)
    for perm in perms:
        if perm.size != size:
            raise ContractViolation(
                f"permutation size {perm.size} != domain size {size}")

    chain = [np.arange(1 << instance.n, dtype=np.int64)]
    positions = chain[0]  # image of x' = 0..2^n-1 under f_{j-1} o ... o f_0
    for perm in perms:
        positions = perm.table[positions]
        chain.append(np.sort(positions))

    final = np.full(size, -1, dtype=np.int64)
    final[positions] = instance.table  # f_d(pos(x')) = f(x')
    return Shuffling(d=d, instance=instance, perms=tuple(perms),
                     sets=tuple(chain), final=final)


@dataclass(frozen=True)
class BijectiveShuffling:
    """A shuffling with the final stage made total and injective-with-flags.

    final_prime is total; zeta flags membership in S_d; eta anti-correlates
    the two preimages of each value of a two-to-one f (free bits when f is
    injective) and is 1 off S_d.  x -> (final_prime(x), zeta(x), eta(x)) is
    injective over the whole domain.
    """

    shuffling: Shuffling
    final_prime: np.ndarray
    zeta: np.ndarray
    eta: np.ndarray

    @property
    def d(self) -> int:
        return self.shuffling.d

    @property
    def n(self) -> int:
        return self.shuffling.n

    @property
    def width(self) -> int:
        return self.shuffling.width

    @property
    def domain_size(self) -> int:
        return self.shuffling.domain_size

    @property
    def instance(self) -> SimonsInstance:
        return self.shuffling.instance

    @property
    def perms(self) -> tuple[Permutation, ...]:
        return self.shuffling.perms

    @property
    def sets(self) -> tuple[np.ndarray, ...]:
        return self.shuffling.sets

    @property
    def mode(self) -> str:
        return self.instance.mode

    def stage_table(self, j: int) -> np.ndarray:
        """Image table of stage j: f_j for j < d, f_d' for j = d."""
        if j < self.d:
            return self.perms[j].table
        return self.final_prime


def build_bijective_shuffling(shuffling: Shuffling, seed: int) -> BijectiveShuffling:
    """Extend the partial final map with zeta/eta flags; eta coins come from seed."""
    size = shuffling.domain_size
    s_d = shuffling.sets[shuffling.d]
    on_sd = shuffling.final >= 0

    final_prime = np.arange(size, dtype=np.int64)
    final_prime[on_sd] = shuffling.final[on_sd]
    zeta = on_sd.astype(np.int64)
    eta = np.ones(size, dtype=np.int64)

    rng = rng_from(seed, "eta-bits")
    instance = shuffling.instance
    if instance.mode == MODE_SIMON:
        # One coin per coset; the two shuffled preimages get opposite bits.
        s = instance.period
        positions = _true_positions(shuffling)
        for x in range(1 << instance.n):
            if x < (x ^ s):
                coin = int(rng.integers(0, 2))
                eta[positions[x]] = coin
                eta[positions[x ^ s]] = coin ^ 1
    else:
        eta[s_d] = rng.integers(0, 2, size=len(s_d))

    fb = BijectiveShuffling(shuffling=shuffling, final_prime=final_prime,
                            zeta=zeta, eta=eta)
    for arr in (fb.final_prime, fb.zeta, fb.eta):
        arr.setflags(write=False)
    return fb


def _true_positions(shuffling: Shuffling) -> np.ndarray:
    """positions[x'] = f_{d-1} o ... o f_0(x') for the true inputs x'."""
    positions = np.arange(1 << shuffling.n, dtype=np.int64)
    for perm in shuffling.perms:
        positions = perm.table[positions]
    return positions
