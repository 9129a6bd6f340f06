"""Hidden sets, level slices, shadow oracles and semi-classical predicates.

Hidden sets are random nested supersets of the true S-chain; the shadow
replaces all behavior inside them with identity-plus-flag and therefore
carries no information about the hidden slice of the oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .sampling import Permutation, sample_instance
from .seeding import rng_from
from .shuffling import BijectiveShuffling, build_bijective_shuffling, build_shuffling


@dataclass(frozen=True)
class HiddenSets:
    """Level-l hidden sets S_j^(l) for j = l..d, stored sorted.

    Invariants: S_j^(l) is a subset of S_j^(l-1) at exactly a 2^-n size
    ratio, the chain pushes forward through the permutations, and the true
    S_j stays inside.
    """

    level: int
    d: int
    width: int
    sets: dict[int, np.ndarray]

    def member_mask(self, j: int) -> np.ndarray:
        mask = np.zeros(1 << self.width, dtype=bool)
        mask[self.sets[j]] = True
        return mask


def sample_hidden_sets(fb: BijectiveShuffling, level: int, seed: int,
                       prev: HiddenSets | None = None) -> HiddenSets:
    """Sample level-l hidden sets inside the level-(l-1) sets.

    The size is taken at exactly the 2^-n ratio bound.  S_l^(l) is the true
    S_l plus a uniform filler from the previous level's slack; higher j are
    pushed forward through f_l..f_{d-1}.
    """
    d, n = fb.d, fb.n
    if not 1 <= level <= d:
        raise ContractViolation(f"level {level} outside 1..{d}")
    if level == 1:
        if prev is not None:
            raise ContractViolation("level 1 samples inside the full domain")
        parent = np.arange(fb.domain_size, dtype=np.int64)
    else:
        if prev is None or prev.level != level - 1:
            raise ContractViolation(f"level {level} requires the level-{level - 1} sets")
        parent = prev.sets[level]

    target = len(parent) >> n
    true_set = fb.sets[level]
    if target < len(true_set):
        raise ContractViolation(
            f"target size {target} cannot contain the true set of size {len(true_set)}")

    rng = rng_from(seed, "hidden-sets", level)
    pool = np.setdiff1d(parent, true_set, assume_unique=True)
    filler = rng.choice(pool, size=target - len(true_set), replace=False)
    sets = {level: np.sort(np.concatenate([true_set, filler]))}
    for j in range(level + 1, d + 1):
        sets[j] = np.sort(fb.perms[j - 1].table[sets[j - 1]])
    for arr in sets.values():
        arr.setflags(write=False)
    return HiddenSets(level=level, d=d, width=fb.width, sets=sets)


def sample_hidden_chain(fb: BijectiveShuffling, upto: int,
                        seed: int) -> list[HiddenSets]:
    """Hidden sets for levels 1..upto, each nested in the previous level."""
    chain: list[HiddenSets] = []
    prev = None
    for level in range(1, upto + 1):
        prev = sample_hidden_sets(fb, level, seed, prev=prev)
        chain.append(prev)
    return chain


@dataclass(frozen=True)
class TableSlice:
    """A function table restricted to an explicit domain."""

    domain: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class LevelSlices:
    """Per-level partition of the oracle tables around the hidden sets.

    public[l][j] is stage j restricted to S_j^(l-1) \\ S_j^(l); hidden[l][j]
    is the same stage restricted to S_j^(l).  Stage d additionally carries
    "zeta" and "eta" slices under those keys.
    """

    public: dict[int, dict[object, TableSlice]]
    hidden: dict[int, dict[object, TableSlice]]


def slice_levels(fb: BijectiveShuffling, chain: list[HiddenSets]) -> LevelSlices:
    """Split each stage table along the hidden-set chain (levels 1..d)."""
    if len(chain) != fb.d or any(h.level != i + 1 for i, h in enumerate(chain)):
        raise ContractViolation("chain must cover levels 1..d in order")
    full = np.arange(fb.domain_size, dtype=np.int64)
    public: dict[int, dict[object, TableSlice]] = {}
    hidden: dict[int, dict[object, TableSlice]] = {}
    for h in chain:
        level = h.level
        prev = chain[level - 2] if level >= 2 else None
        public[level] = {}
        hidden[level] = {}
        for j in range(level, fb.d + 1):
            parent = prev.sets[j] if prev is not None else full
            inner = h.sets[j]
            outer = np.setdiff1d(parent, inner, assume_unique=True)
            table = fb.stage_table(j)
            public[level][j] = TableSlice(outer, table[outer])
            hidden[level][j] = TableSlice(inner, table[inner])
            if j == fb.d:
                for key, bits in (("zeta", fb.zeta), ("eta", fb.eta)):
                    public[level][key] = TableSlice(outer, bits[outer])
                    hidden[level][key] = TableSlice(inner, bits[inner])
    return LevelSlices(public=public, hidden=hidden)


def resample_hidden_slice(fb: BijectiveShuffling, h: HiddenSets,
                          seed: int) -> BijectiveShuffling:
    """A fresh bijective shuffling agreeing with fb outside the hidden sets.

    Stages l..d-1 get fresh uniform bijections S_j^(l) -> S_{j+1}^(l); the
    underlying function (and its period) is resampled, so the hidden slice
    is drawn anew while every value outside the hidden sets is preserved.
    """
    rng = rng_from(seed, "resample-hidden", h.level)
    new_perms = []
    for j in range(fb.d):
        table = fb.perms[j].table
        if j >= h.level:
            table = table.copy()
            table[h.sets[j]] = rng.permutation(h.sets[j + 1])
        new_perms.append(Permutation(table))
    instance = sample_instance(fb.n, fb.mode, int(rng.integers(0, 1 << 62)))
    shuffled = build_shuffling(fb.d, instance, new_perms)
    return build_bijective_shuffling(shuffled, int(rng.integers(0, 1 << 62)))


@dataclass(frozen=True)
class ShadowOracle:
    """The shadow of a bijective shuffling in level-l hidden sets.

    Inside S_j^(l) every stage acts as identity and the flags read the
    constant c; outside, the tables coincide with the real oracle and the
    per-stage flag reads c^1.  Stages 0..l-1 are the untouched f_j.
    """

    level: int
    c: int
    d: int
    n: int
    width: int
    prefix: tuple[Permutation, ...]  # untouched f_0..f_{l-1}
    g: dict[int, np.ndarray]         # j = l..d
    xi: dict[int, np.ndarray]        # j = l..d
    zeta_g: np.ndarray
    eta_g: np.ndarray

    @property
    def domain_size(self) -> int:
        return 1 << self.width

    def stage_table(self, j: int) -> np.ndarray:
        if j < self.level:
            return self.prefix[j].table
        return self.g[j]

    def tobytes(self) -> bytes:
        parts = [bytes([self.level, self.c, self.d])]
        parts += [p.table.tobytes() for p in self.prefix]
        parts += [self.g[j].tobytes() for j in sorted(self.g)]
        parts += [self.xi[j].tobytes() for j in sorted(self.xi)]
        parts += [self.zeta_g.tobytes(), self.eta_g.tobytes()]
        return b"".join(parts)


def build_shadow(fb: BijectiveShuffling, h: HiddenSets, c: int = 1) -> ShadowOracle:
    """Replace all hidden-set behavior with identity plus the flag constant c.

    The default c=1 makes the off-hidden flag value coincide with the real
    oracle's untouched zero ancilla, which the hiding bound relies on.
    """
    if c not in (0, 1):
        raise ContractViolation("c must be a bit")
    level, d = h.level, fb.d
    full = np.arange(fb.domain_size, dtype=np.int64)
    g: dict[int, np.ndarray] = {}
    xi: dict[int, np.ndarray] = {}
    for j in range(level, d + 1):
        mask = h.member_mask(j)
        table = fb.stage_table(j).copy()
        table[mask] = full[mask]
        g[j] = table
        xi[j] = np.where(mask, c, c ^ 1).astype(np.int64)
    mask_d = h.member_mask(d)
    zeta_g = np.where(mask_d, c, fb.zeta).astype(np.int64)
    eta_g = np.where(mask_d, c, fb.eta).astype(np.int64)
    shadow = ShadowOracle(level=level, c=c, d=d, n=fb.n, width=fb.width,
                          prefix=fb.perms[:level], g=g, xi=xi,
                          zeta_g=zeta_g, eta_g=eta_g)
    for arr in (*g.values(), *xi.values(), zeta_g, eta_g):
        arr.setflags(write=False)
    return shadow


@dataclass(frozen=True)
class FlagPredicates:
    """Per-layer membership predicates consumed by the semi-classical flag toggle."""

    level: int
    width: int
    members: dict[int, np.ndarray]  # layer j -> boolean mask over Z_2^width

    def hits(self, j: int, value: int) -> bool:
        return bool(self.members[j][value])


def flags_from_shadow(shadow: ShadowOracle) -> FlagPredicates:
    """The hidden-set predicates a shadow was built from, recovered from xi."""
    members = {j: shadow.xi[j] == shadow.c for j in shadow.xi}
    return FlagPredicates(level=shadow.level, width=shadow.width,
                          members=members)


def semiclassical_flag_sets(h: HiddenSets) -> FlagPredicates:
    """Membership predicates for "X_i intersects S_i^(l)" per layer i = l..d."""
    members = {j: h.member_mask(j) for j in h.sets}
    for mask in members.values():
        mask.setflags(write=False)
    return FlagPredicates(level=h.level, width=h.width, members=members)
