import pytest
from hypothesis import given, strategies as st

from bssp.errors import ContractViolation
from bssp.gf2 import (AffineEquation, BitWord, dot_bits, gf2_dot,
                      solve_affine_system)


def test_dot_examples():
    assert gf2_dot(BitWord(0b101, 3), BitWord(0b100, 3)) == 1
    assert gf2_dot(BitWord(0b110, 3), BitWord(0b011, 3)) == 1
    for x in range(8):
        assert gf2_dot(BitWord(x, 3), BitWord(0, 3)) == 0


def test_dot_width_mismatch():
    with pytest.raises(ContractViolation):
        gf2_dot(BitWord(1, 2), BitWord(1, 3))


def test_bitword_bounds():
    with pytest.raises(ContractViolation):
        BitWord(4, 2)
    with pytest.raises(ContractViolation):
        BitWord(0, 63)
    assert (BitWord(0b10, 2) ^ BitWord(0b11, 2)).value == 0b01


def test_solve_unique():
    out = solve_affine_system([AffineEquation(0b01, 1),
                               AffineEquation(0b10, 0)], 2)
    assert out.unique and out.solution == 0b01


def test_solve_underdetermined():
    out = solve_affine_system([AffineEquation(0b01, 0)], 2)
    assert out.kind == "underdetermined" and out.rank == 1
    assert solve_affine_system([], 2).kind == "underdetermined"


def test_solve_inconsistent():
    out = solve_affine_system([AffineEquation(0b01, 0),
                               AffineEquation(0b01, 1)], 2)
    assert not out.consistent


def _brute_solutions(eqs, n):
    return [s for s in range(1 << n)
            if all(dot_bits(s, e.j) == e.b for e in eqs)]


@given(st.integers(1, 5), st.lists(st.tuples(st.integers(0, 31),
                                             st.integers(0, 1)), max_size=12),
       )
def test_solver_matches_brute_force(n, raw):
    eqs = [AffineEquation(j & ((1 << n) - 1), b) for j, b in raw]
    out = solve_affine_system(eqs, n)
    solutions = _brute_solutions(eqs, n)
    if out.kind == "inconsistent":
        assert solutions == []
    elif out.kind == "unique":
        assert solutions == [out.solution]
    else:
        assert len(solutions) == 1 << (n - out.rank)


@given(st.integers(0, (1 << 8) - 1), st.integers(0, (1 << 8) - 1),
       st.integers(0, (1 << 8) - 1))
def test_dot_is_bilinear(u, v, w):
    assert dot_bits(u ^ v, w) == dot_bits(u, w) ^ dot_bits(v, w)
