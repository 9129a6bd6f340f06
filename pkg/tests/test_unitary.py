import numpy as np
import pytest

from bssp.errors import OracleConstructionError, ResourceError
from bssp.hiding import build_shadow, sample_hidden_sets
from bssp.unitary import complete_permutation, oracle_unitary
from tests.helpers import random_bijective


def test_complete_total_bijection_unchanged():
    table = np.array([2, 0, 3, 1])
    out = complete_permutation(np.arange(4), table, 4)
    assert np.array_equal(out, table)


def test_complete_canonical_matching():
    # identity on half the space; leftovers matched ascending to ascending
    out = complete_permutation(np.arange(4), np.arange(4), 8)
    assert out.tolist() == [0, 1, 2, 3, 4, 5, 6, 7]
    out = complete_permutation(np.array([0, 1]), np.array([5, 3]), 6)
    assert out.tolist() == [5, 3, 0, 1, 2, 4]


def test_complete_detects_noninjective_promise():
    with pytest.raises(OracleConstructionError):
        complete_permutation(np.array([0, 1]), np.array([2, 2]), 4)
    with pytest.raises(OracleConstructionError):
        complete_permutation(np.array([0, 0]), np.array([1, 2]), 4)


def _assert_bijection(table):
    assert np.array_equal(np.sort(table), np.arange(len(table)))


def test_real_oracle_tables_are_bijections():
    for n, d in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        unitary = oracle_unitary(random_bijective(n, d, seed=3))
        _assert_bijection(unitary.composite_table())
        for tag in range(1 << unitary.tag_bits):
            _assert_bijection(unitary.block(tag).table())


def test_shadow_oracle_tables_are_bijections():
    fb = random_bijective(1, 2, seed=4)
    h = sample_hidden_sets(fb, 1, seed=6)
    for c in (0, 1):
        unitary = oracle_unitary(build_shadow(fb, h, c=c))
        _assert_bijection(unitary.composite_table())


def test_worked_tag_d_example():
    # d=1, n=1 identity shuffle: promised |0>|00> -> |f'(0)>|zeta(0)>|eta(0)>
    fb = random_bijective(1, 1, seed=5)
    block = oracle_unitary(fb).block(1)
    out = block.apply_index(0)
    v = fb.width
    assert out & ((1 << v) - 1) == fb.final_prime[0]
    assert (out >> v) & 1 == fb.zeta[0]
    assert (out >> (v + 1)) & 1 == fb.eta[0]


def test_tag0_xor_write():
    fb = random_bijective(1, 1, seed=7)
    block = oracle_unitary(fb).block(0)
    v = fb.width
    for x in range(4):
        assert block.apply_index(x) == x | (int(fb.perms[0].table[x]) << v)
    # XOR-write is an involution on any input
    for i in (3, 45, 63):
        assert block.apply_index(block.apply_index(i)) == i


def test_out_of_range_tag_is_identity():
    unitary = oracle_unitary(random_bijective(1, 2, seed=8))
    assert unitary.tag_bits == 2
    block = unitary.block(3)
    assert all(block.apply_index(i) == i for i in range(16))


def test_composite_cap():
    # n=3, d=2: composite width 2 + 2*15 = 32, over the table cap
    unitary = oracle_unitary(random_bijective(3, 2, seed=9))
    assert unitary.composite_width > 22
    with pytest.raises(ResourceError):
        unitary.composite_table()


def test_end_to_end_identity():
    # push every true input through tags 0..d on ancilla-zero inputs
    for n, d in [(1, 1), (2, 2), (1, 3), (3, 1)]:
        fb = random_bijective(n, d, seed=11)
        unitary = oracle_unitary(fb)
        v = fb.width
        for x in range(1 << n):
            state = unitary.block(0).apply_index(x) >> v  # f_0 write
            for j in range(1, d):
                state = unitary.block(j).apply_index(state)
            out = unitary.block(d).apply_index(state)
            assert out & ((1 << v) - 1) == fb.instance.table[x]
            assert (out >> v) & 1 == 1  # zeta
