"""Bit-vector algebra over Z_2^m and affine linear-system solving.

Vectors are plain integers with the least-significant bit as coordinate 0.
``BitWord`` attaches an explicit width for the public contract-checked
operations; hot paths use raw integers.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ContractViolation

MAX_WIDTH = 62


@dataclass(frozen=True)
class BitWord:
    """An element of Z_2^width stored as an unsigned integer."""

    value: int
    width: int

    def __post_init__(self):
        if not 1 <= self.width <= MAX_WIDTH:
            raise ContractViolation(f"width {self.width} outside 1..{MAX_WIDTH}")
        if not 0 <= self.value < (1 << self.width):
            raise ContractViolation(
                f"value {self.value} does not fit in {self.width} bits")

    def __xor__(self, other: "BitWord") -> "BitWord":
        if other.width != self.width:
            raise ContractViolation("width mismatch in xor")
        return BitWord(self.value ^ other.value, self.width)


@dataclass(frozen=True)
class AffineEquation:
    """One constraint s . j = b over GF(2)."""

    j: int
    b: int


def dot_bits(u: int, v: int) -> int:
    """Parity of the bitwise AND of two raw bit vectors."""
    return (u & v).bit_count() & 1


def gf2_dot(u: BitWord, v: BitWord) -> int:
    """Inner product mod 2 of two equal-width words."""
    if u.width != v.width:
        raise ContractViolation(f"width mismatch: {u.width} vs {v.width}")
    return dot_bits(u.value, v.value)


@dataclass(frozen=True)
class SolveOutcome:
    """Result of Gaussian elimination over GF(2).

    kind is one of "unique", "underdetermined", "inconsistent".
    solution is set only for "unique"; rank is the coefficient rank.
    """

    kind: str
    solution: int | None
    rank: int

    @property
    def unique(self) -> bool:
        return self.kind == "unique"

    @property
    def consistent(self) -> bool:
        return self.kind != "inconsistent"


def solve_affine_system(equations: list[AffineEquation], n: int) -> SolveOutcome:
    """Solve {s . j_k = b_k} for s in Z_2^n.

    Rows carry the affine bit at position n.  Pivoting is on the
    lowest-index column with a set bit, so elimination is deterministic.
    """
    if not 1 <= n <= MAX_WIDTH:
        raise ContractViolation(f"n {n} outside 1..{MAX_WIDTH}")
    rows = []
    for eq in equations:
        if not 0 <= eq.j < (1 << n):
            raise ContractViolation(f"equation vector {eq.j} wider than n={n}")
        if eq.b not in (0, 1):
            raise ContractViolation(f"affine bit {eq.b} not a bit")
        rows.append(eq.j | (eq.b << n))

    pivots: dict[int, int] = {}  # column -> reduced row
    for row in rows:
        for col in range(n):
            if not (row >> col) & 1:
                continue
            if col in pivots:
                row ^= pivots[col]
            else:
                pivots[col] = row
                row = 0
                break
        if row:  # only the affine bit survived: 0 = 1
            return SolveOutcome("inconsistent", None, len(pivots))

    rank = len(pivots)
    if rank < n:
        return SolveOutcome("underdetermined", None, rank)

    # Back-substitute to fully reduce each pivot row.
    for col in sorted(pivots, reverse=True):
        row = pivots[col]
        for other in pivots:
            if other != col and (pivots[other] >> col) & 1:
                pivots[other] ^= row
    solution = 0
    for col, row in pivots.items():
        if (row >> n) & 1:
            solution |= 1 << col
    return SolveOutcome("unique", solution, rank)
