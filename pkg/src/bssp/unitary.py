"""Basis-permutation oracle blocks and their completion to total bijections.

The oracle is block-diagonal over a classical tag: tag 0 is a standard
XOR-write query to f_0, tags 1..d-1 permute the value register in place,
and tag d maps the value register through the final stage while writing
the flag bits into zeroed ancillas.  Blocks defined only on ancilla-zero
("promised") inputs are extended off-promise by a canonical ascending
matching; promised executions never leave that subspace, so any
completion is valid and the canonical one keeps replays deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, OracleConstructionError, ResourceError
from .hiding import ShadowOracle
from .shuffling import BijectiveShuffling

MAX_TABLE_BITS = 22


def complete_permutation(domain: np.ndarray, image: np.ndarray,
                         size: int) -> np.ndarray:
    """Extend an injection (domain[i] -> image[i]) to a bijection of {0..size-1}.

    Inputs outside the promised domain are matched to the unused outputs in
    ascending integer order.  A non-injective promise raises
    OracleConstructionError; this is the bijectivity failure detector.
    """
    domain = np.asarray(domain, dtype=np.int64)
    image = np.asarray(image, dtype=np.int64)
    if len(domain) != len(image):
        raise ContractViolation("domain/image length mismatch")
    table = np.full(size, -1, dtype=np.int64)
    used = np.zeros(size, dtype=bool)
    table[domain] = image
    if len(np.unique(domain)) != len(domain):
        raise OracleConstructionError("promised domain has repeated inputs")
    used[image] = True
    if used.sum() != len(image):
        raise OracleConstructionError("promised mapping is not injective")
    free_inputs = np.flatnonzero(table < 0)
    free_outputs = np.flatnonzero(~used)
    table[free_inputs] = free_outputs
    return table


class Block:
    """One tag's action: a bijection of Z_2^width given by index images."""

    width: int

    def apply_index(self, i: int) -> int:
        raise NotImplementedError

    def apply_indices(self, idx: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def table(self) -> np.ndarray:
        if self.width > MAX_TABLE_BITS:
            raise ResourceError(
                f"block table over 2^{self.width} entries exceeds the cap",
                required=self.width, available=MAX_TABLE_BITS)
        return self.apply_indices(np.arange(1 << self.width, dtype=np.int64))


@dataclass
class IdentityBlock(Block):
    width: int

    def apply_index(self, i: int) -> int:
        return i

    def apply_indices(self, idx: np.ndarray) -> np.ndarray:
        return idx


@dataclass
class XorWriteBlock(Block):
    """Standard oracle |x>|y> -> |x>|y ^ f(x)>; input low bits, output high bits."""

    value_width: int
    fn: np.ndarray

    def __post_init__(self):
        self.width = 2 * self.value_width

    def apply_index(self, i: int) -> int:
        x = i & ((1 << self.value_width) - 1)
        return i ^ (int(self.fn[x]) << self.value_width)

    def apply_indices(self, idx: np.ndarray) -> np.ndarray:
        x = idx & ((1 << self.value_width) - 1)
        return idx ^ (self.fn[x] << self.value_width)


@dataclass
class PermBlock(Block):
    """In-place permutation of the value register."""

    value_width: int
    fn: np.ndarray

    def __post_init__(self):
        self.width = self.value_width

    def apply_index(self, i: int) -> int:
        return int(self.fn[i])

    def apply_indices(self, idx: np.ndarray) -> np.ndarray:
        return self.fn[idx]


@dataclass
class FlaggedBlock(Block):
    """A block promised on ancilla-zero inputs, completed canonically elsewhere.

    promised[x] is the image of |x>|0...0>; the ancillas occupy the high
    flag_count bits of the block.
    """

    value_width: int
    flag_count: int
    promised: np.ndarray
    _table: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.width = self.value_width + self.flag_count
        if len(np.unique(self.promised)) != len(self.promised):
            raise OracleConstructionError("promised mapping is not injective")

    def _full(self) -> np.ndarray:
        if self._table is None:
            domain = np.arange(1 << self.value_width, dtype=np.int64)
            self._table = complete_permutation(domain, self.promised,
                                               1 << self.width)
        return self._table

    def apply_index(self, i: int) -> int:
        if i < len(self.promised):  # ancilla-zero inputs are the low indices
            return int(self.promised[i])
        return int(self._full()[i])

    def apply_indices(self, idx: np.ndarray) -> np.ndarray:
        if idx.size and idx.max() < len(self.promised):
            return self.promised[idx]
        return self._full()[idx]


@dataclass
class OracleUnitary:
    """Tagged block family realizing a bijective shuffling or its shadow.

    Tags beyond d act as identity so the oracle is total on the composite
    space (tag register of tag_bits bits, value register, flag ancillas).
    """

    n: int
    d: int
    value_width: int
    kind: str  # "real" or "shadow"
    level: int | None
    blocks: list[Block]

    @property
    def tag_bits(self) -> int:
        return max(1, (self.d + 1 - 1).bit_length())

    def block(self, tag: int) -> Block:
        if not 0 <= tag < (1 << self.tag_bits):
            raise ContractViolation(f"tag {tag} outside the tag register range")
        return self.blocks[tag]

    def flag_count(self, tag: int) -> int:
        """Number of flag ancillas the engine must feed to this tag's block."""
        block = self.blocks[tag]
        if isinstance(block, FlaggedBlock):
            return block.flag_count
        return 0

    @property
    def composite_width(self) -> int:
        return self.tag_bits + max(b.width for b in self.blocks)

    def composite_table(self) -> np.ndarray:
        """The full permutation over tag + padded block space (exhaustive checks)."""
        width = self.composite_width
        if width > MAX_TABLE_BITS:
            raise ResourceError(
                f"composite table of width {width} exceeds the cap",
                required=width, available=MAX_TABLE_BITS)
        rest = width - self.tag_bits
        out = np.empty(1 << width, dtype=np.int64)
        for tag in range(1 << self.tag_bits):
            block = self.blocks[tag]
            base = tag << rest
            idx = np.arange(1 << rest, dtype=np.int64)
            low = idx & ((1 << block.width) - 1)
            high = idx & ~((1 << block.width) - 1)
            out[base + idx] = base + high + block.apply_indices(low)
        return out


def oracle_unitary(source: BijectiveShuffling | ShadowOracle) -> OracleUnitary:
    """Realize a bijective shuffling or a shadow as tagged permutation blocks."""
    if isinstance(source, BijectiveShuffling):
        return _real_oracle(source)
    if isinstance(source, ShadowOracle):
        return _shadow_oracle(source)
    raise ContractViolation(f"unsupported oracle source {type(source).__name__}")


def _real_oracle(fb: BijectiveShuffling) -> OracleUnitary:
    v = fb.width
    blocks: list[Block] = [XorWriteBlock(v, fb.perms[0].table)]
    for j in range(1, fb.d):
        blocks.append(PermBlock(v, fb.perms[j].table))
    promised = fb.final_prime | (fb.zeta << v) | (fb.eta << (v + 1))
    blocks.append(FlaggedBlock(v, 2, promised))
    unitary = OracleUnitary(n=fb.n, d=fb.d, value_width=v, kind="real",
                            level=None, blocks=blocks)
    _pad_tags(unitary)
    return unitary


def _shadow_oracle(shadow: ShadowOracle) -> OracleUnitary:
    v = shadow.width
    blocks: list[Block] = [XorWriteBlock(v, shadow.stage_table(0))]
    for j in range(1, shadow.d):
        table = shadow.stage_table(j)
        if j < shadow.level:
            blocks.append(PermBlock(v, table))
        else:
            blocks.append(FlaggedBlock(v, 1, table | (shadow.xi[j] << v)))
    promised = (shadow.g[shadow.d] | (shadow.zeta_g << v)
                | (shadow.eta_g << (v + 1)) | (shadow.xi[shadow.d] << (v + 2)))
    blocks.append(FlaggedBlock(v, 3, promised))
    unitary = OracleUnitary(n=shadow.n, d=shadow.d, value_width=v, kind="shadow",
                            level=shadow.level, blocks=blocks)
    _pad_tags(unitary)
    return unitary


def _pad_tags(unitary: OracleUnitary):
    # Out-of-range tag values act as identity on the widest block space.
    widest = max(b.width for b in unitary.blocks)
    while len(unitary.blocks) < (1 << unitary.tag_bits):
        unitary.blocks.append(IdentityBlock(widest))
