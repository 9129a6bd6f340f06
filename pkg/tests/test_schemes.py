import pytest

from bssp.errors import (ContractViolation, DepthBudgetError, ResourceError)
from bssp.gf2 import dot_bits
from bssp.sampling import MODE_INJECTIVE, MODE_SIMON
from bssp.schemes import (GateLayer, MeasureSpec, SchemeSpec, Stage,
                          _one_sample, bssp_cq_spec, bssp_qc_spec,
                          run_bssp_decision, run_bssp_search, run_cq_scheme,
                          run_depth_sweep, run_qc_scheme, sample_bssp_oracle,
                          search_binding, search_layout, wilson_interval)
from bssp.engine import H
from bssp.seeding import derive_seed


def test_n1_d1_single_sample_distribution():
    # the worked d=1 oracle admits only (j,b) in {(0,0),(1,1)}
    oracle = sample_bssp_oracle(1, 1, MODE_SIMON, 5)
    binding = search_binding(oracle)
    seen = set()
    for k in range(40):
        j, b, transcript = _one_sample(binding, 1, 1, "qc", k, True)
        seen.add((j, b))
        assert b == dot_bits(oracle.period, j)
    assert seen == {(0, 0), (1, 1)}


def test_search_recovers_period():
    for scheme in ("qc", "cq"):
        oracle = sample_bssp_oracle(2, 2, MODE_SIMON, 13)
        result = run_bssp_search(oracle, 21, scheme=scheme)
        assert result.period == oracle.period
        assert result.check_equations()
        assert result.samples_used <= 10


def test_transcript_accounting():
    oracle = sample_bssp_oracle(2, 1, MODE_SIMON, 3)
    result = run_bssp_search(oracle, 8, keep_transcripts=True)
    for transcript in result.transcripts:
        assert transcript.oracle_calls == oracle.d + 1
        assert transcript.gate_names <= {"H", "CNOT"}
        assert transcript.stages_used <= oracle.d + 1
    doc = result.transcripts[0].to_dict()
    assert doc["oracle_calls"] == oracle.d + 1


def test_qc_budget_enforced():
    oracle = sample_bssp_oracle(1, 1, MODE_SIMON, 2)
    binding = search_binding(oracle)
    spec = bssp_qc_spec(1, 1, binding.layout)
    over = SchemeSpec(kind="qc", depth=spec.depth,
                      stages=spec.stages + (Stage(),))
    with pytest.raises(DepthBudgetError):
        run_qc_scheme(over, binding, 0)


def test_cq_discipline():
    oracle = sample_bssp_oracle(1, 1, MODE_SIMON, 2)
    binding = search_binding(oracle)
    spec = bssp_cq_spec(1, 1, binding.layout)
    transcript = run_cq_scheme(spec, binding, 0)
    assert transcript.oracle_calls == 2
    assert transcript.unitary_layers == 3  # d+2 layers incl. final H

    # mid-circuit measurement is a contract violation in cq
    bad_stages = (Stage(measures=(MeasureSpec("x", (0,)),)),) + spec.stages[1:]
    bad = SchemeSpec(kind="cq", depth=spec.depth, stages=bad_stages)
    with pytest.raises(ContractViolation):
        run_cq_scheme(bad, binding, 0)

    # non-computational final measurement rejected
    layout = binding.layout
    stages = spec.stages[:-1] + (Stage(
        measures=(MeasureSpec("jb", tuple(layout.qubits("x")), "hadamard"),)),)
    with pytest.raises(ContractViolation):
        run_cq_scheme(SchemeSpec(kind="cq", depth=spec.depth,
                                 stages=stages), binding, 0)


def test_no_hadamard_variant_depth_d_plus_2():
    oracle = sample_bssp_oracle(1, 1, MODE_SIMON, 4)
    binding = search_binding(oracle)
    spec = bssp_qc_spec(1, 1, binding.layout, hadamard_measure=False)
    assert spec.depth == 3 and len(spec.stages) == 3
    transcript = run_qc_scheme(spec, binding, 1)
    assert transcript.oracle_calls == 2
    outcomes = transcript.outcomes()
    assert "jb" in outcomes and "value" in outcomes


def test_decision_modes():
    simon = sample_bssp_oracle(2, 1, MODE_SIMON, 6)
    result = run_bssp_decision(simon, 17)
    assert result.verdict == "simon"
    assert not result.low_confidence

    injective = sample_bssp_oracle(2, 1, MODE_INJECTIVE, 6)
    hits = sum(run_bssp_decision(injective, k).verdict == "injective"
               for k in range(20))
    assert hits >= 16


def test_decision_n1_edge():
    oracle = sample_bssp_oracle(1, 1, MODE_SIMON, 9)
    result = run_bssp_decision(oracle, 2)
    assert result.verdict == "simon"


def test_zeta_always_one_on_promised_runs():
    oracle = sample_bssp_oracle(2, 2, MODE_SIMON, 30)
    binding = search_binding(oracle)
    for k in range(10):
        _one_sample(binding, 2, 2, "qc", k, strict_zeta=True)


def test_resource_cap():
    with pytest.raises(ResourceError) as err:
        search_layout(9, 3)
    assert err.value.required == 59


def test_wilson_interval_sanity():
    low, high = wilson_interval(90, 100)
    assert 0.8 < low < 0.9 < high <= 1.0
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_depth_sweep_shape():
    rows = run_depth_sweep(2, 1, trials=20, seed=5)
    assert [r.budget for r in rows] == [0, 1, 2]
    assert rows[0].strategy == "classical-guess"
    assert rows[-1].strategy == "natural"
    assert rows[-1].rate >= 0.9
    assert rows[0].rate <= rows[-1].rate


def test_threads_do_not_change_results():
    rows1 = run_depth_sweep(1, 1, trials=10, seed=3, threads=1)
    rows4 = run_depth_sweep(1, 1, trials=10, seed=3, threads=4)
    assert [r.successes for r in rows1] == [r.successes for r in rows4]
