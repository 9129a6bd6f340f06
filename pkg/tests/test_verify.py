import numpy as np
import pytest

from bssp.engine import SparseState, find_probability
from bssp.errors import ContractViolation
from bssp.hiding import FlagPredicates, flags_from_shadow
from bssp.sampling import MODE_SIMON
from bssp.schemes import (sample_bssp_oracle, search_binding,
                          shadow_bssp_oracle)
from bssp.verify import (check_bfp, check_o2h_single,
                         estimate_o2h_expectation, o2h_layout,
                         outcome_probability, prefix_state,
                         shadow_indistinguishability_experiment)


def _setup(n=1, d=1, seed=5, hidden_seed=11):
    oracle = sample_bssp_oracle(n, d, MODE_SIMON, seed)
    layout = o2h_layout(n, d)
    real = search_binding(oracle, layout)
    shadow = shadow_bssp_oracle(oracle.fb, 1, hidden_seed, c=1)
    return oracle, layout, real, search_binding(shadow, layout), \
        flags_from_shadow(shadow.shadow)


def test_no_hidden_amplitude_means_zero_distance():
    oracle, layout, real, shadow, flags = _setup()
    outside = next(x for x in range(8) if not flags.members[1][x])
    state = SparseState.basis(layout.width, outside << layout.offset("val"))
    rec = check_o2h_single(real, shadow, flags, 1, state)
    assert rec.p_find == 0.0
    assert rec.bures < 1e-9
    assert not rec.violated


def test_all_hidden_amplitude_means_orthogonal():
    oracle, layout, real, shadow, flags = _setup()
    inside = next(x for x in range(8) if flags.members[1][x])
    state = SparseState.basis(layout.width, inside << layout.offset("val"))
    rec = check_o2h_single(real, shadow, flags, 1, state)
    assert rec.p_find == 1.0
    assert abs(rec.bures - np.sqrt(2)) < 1e-9


def test_single_call_equality_on_uniform_query():
    oracle, layout, real, shadow, flags = _setup()
    state = prefix_state(oracle, 1, real)
    rec = check_o2h_single(real, shadow, flags, 1, state)
    assert abs(rec.equality_gap) < 1e-9
    assert not rec.violated


def test_expectation_report():
    report = estimate_o2h_expectation(1, 1, 1, "xi-flag", 100, 3)
    assert report.violations == 0
    assert report.holds
    ignore = estimate_o2h_expectation(1, 1, 1, "ignore", 100, 3)
    assert ignore.mean_gap == 0.0
    with pytest.raises(ContractViolation):
        estimate_o2h_expectation(1, 1, 1, "ignore", 10, 3)
    with pytest.raises(ContractViolation):
        estimate_o2h_expectation(1, 1, 1, "who", 100, 3)


def test_distinguisher_gap_below_bures():
    report = estimate_o2h_expectation(2, 2, 1, "value-parity", 100, 8)
    for rec in report.records:
        assert rec.distinguisher_gap <= rec.bures + 1e-9


def test_bfp_classical_families():
    for q in (1, 2, 3):
        report = check_bfp(1, 1, 1, q, 300, seed=4, family="classical")
        assert report.bound == q * 0.5
        assert report.holds


def test_bfp_uniform_exact():
    report = check_bfp(1, 1, 1, 1, 50, seed=4, family="uniform")
    assert abs(report.estimate - 0.5) < 1e-12
    assert report.sigma < 1e-12


def test_bfp_rejects_bad_level():
    with pytest.raises(ContractViolation):
        check_bfp(1, 1, 2, 1, 10, 0)


def test_find_probability_monotone_in_hidden_sets():
    # enlarging the hidden sets never decreases P_find for a fixed state
    oracle, layout, real, shadow, flags = _setup()
    bigger = {j: mask.copy() for j, mask in flags.members.items()}
    for mask in bigger.values():
        mask[np.flatnonzero(~mask)[:2]] = True
    enlarged = FlagPredicates(level=flags.level, width=flags.width,
                              members=bigger)
    state = prefix_state(oracle, 1, real)
    val_off = layout.offset("val")
    find = layout.offset("find")
    p_small, _ = find_probability(state, flags, [(1, val_off)], find)
    p_big, _ = find_probability(state, enlarged, [(1, val_off)], find)
    assert p_big >= p_small - 1e-12


def test_shadow_opacity_small():
    rows = shadow_indistinguishability_experiment(2, 1, trials=40, seed=2)
    by_arm = {r.arm: r for r in rows}
    assert by_arm["real"].rate >= 0.9
    for arm in ("shadow-c1", "shadow-c0"):
        low, high = by_arm[arm].ci
        assert low <= 1 / 3 + 0.25 and by_arm[arm].rate < 0.8


def test_outcome_probability_sums():
    state = SparseState(2, {0: 0.6, 3: 0.8})
    assert abs(outcome_probability(state, lambda i: i == 3) - 0.64) < 1e-12
