"""Hybrid quantum-classical scheme harness and the shuffled Simon solver.

Two disciplines with strict depth and oracle-call accounting:

* qc: one persistent quantum state, at most `depth` stages, each stage one
  one-depth gate layer, one optional oracle call and optional partial
  measurements (computational or Hadamard basis), with classical
  processing between stages.
* cq: a classical loop invoking fresh circuits; each invocation interleaves
  gate layers and oracle calls and ends in a full computational-basis
  measurement; no quantum state survives between invocations.

The natural solver uses d+1 oracle calls and only Hadamard gates, so it
fits a (d+1)-depth budget in either discipline.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .engine import (DENSE_CAP, Field, FieldSpec, GateLayer, H,
                     RegisterLayout, SparseState, State)
from .errors import BsspError, ContractViolation, DepthBudgetError, ResourceError
from .gf2 import AffineEquation, SolveOutcome, dot_bits, solve_affine_system
from .hiding import ShadowOracle, build_shadow, sample_hidden_chain
from .sampling import MODE_SIMON, sample_instance, sample_permutation
from .seeding import derive_seed, rng_from
from .shuffling import (BijectiveShuffling, build_bijective_shuffling,
                        build_shuffling, embed_width)
from .unitary import OracleUnitary, oracle_unitary

SAMPLE_CAP_FACTOR = 5   # invocations before a search declares failure
DECISION_FACTOR = 3     # samples per decision run


def width_cap() -> int:
    return int(os.environ.get("BSSP_MAX_WIDTH", DENSE_CAP))


# ---------------------------------------------------------------------------
# Oracle bundles and layout binding

@dataclass
class BsspOracle:
    """A sampled problem oracle: the shuffling plus its unitary realization."""

    n: int
    d: int
    fb: BijectiveShuffling
    unitary: OracleUnitary
    kind: str = "real"
    level: int | None = None
    shadow: ShadowOracle | None = None

    @property
    def mode(self) -> str:
        return self.fb.mode

    @property
    def period(self) -> int | None:
        return self.fb.instance.period


def sample_bssp_oracle(n: int, d: int, mode: str, seed: int) -> BsspOracle:
    """Sample f, the shuffling permutations and the eta coins from one seed."""
    instance = sample_instance(n, mode, derive_seed(seed, "instance"))
    perms = [sample_permutation(embed_width(n, d), derive_seed(seed, "perm", j))
             for j in range(d)]
    shuffled = build_shuffling(d, instance, perms)
    fb = build_bijective_shuffling(shuffled, derive_seed(seed, "flags"))
    return BsspOracle(n=n, d=d, fb=fb, unitary=oracle_unitary(fb))


def shadow_bssp_oracle(fb: BijectiveShuffling, level: int, seed: int,
                       c: int = 1) -> BsspOracle:
    """The level-l shadow of fb as a queryable oracle bundle."""
    chain = sample_hidden_chain(fb, level, derive_seed(seed, "hidden"))
    shadow = build_shadow(fb, chain[-1], c=c)
    return BsspOracle(n=fb.n, d=fb.d, fb=fb, unitary=oracle_unitary(shadow),
                      kind="shadow", level=level, shadow=shadow)


def search_layout(n: int, d: int) -> RegisterLayout:
    """Registers for the solver circuit: input, value, flags, shadow flags."""
    v = embed_width(n, d)
    fields = [Field("x", n, "query"), Field("val", v, "query"),
              Field("zeta", 1, "ancilla"), Field("eta", 1, "ancilla")]
    fields += [Field(f"xi{j}", 1, "ancilla") for j in range(1, d + 1)]
    layout = RegisterLayout(tuple(fields))
    cap = width_cap()
    if layout.width > cap:
        raise ResourceError(
            f"solver layout needs {layout.width} qubits but the cap is {cap}",
            required=layout.width, available=cap)
    return layout


@dataclass
class OracleBinding:
    """Maps each oracle tag's block onto registers of a concrete layout."""

    unitary: OracleUnitary
    layout: RegisterLayout
    specs: dict[int, FieldSpec]

    def apply(self, state: State, tag: int) -> State:
        return state.apply_block(self.unitary.block(tag), self.specs[tag])


def search_binding(oracle: BsspOracle,
                   layout: RegisterLayout | None = None) -> OracleBinding:
    n, d = oracle.n, oracle.d
    v = oracle.unitary.value_width
    layout = layout or search_layout(n, d)
    x_off, val_off = layout.offset("x"), layout.offset("val")
    zeta_off, eta_off = layout.offset("zeta"), layout.offset("eta")
    specs: dict[int, FieldSpec] = {
        0: FieldSpec(((x_off, n), (None, v - n), (val_off, v)))}
    for j in range(1, d):
        segs: list[tuple[int | None, int]] = [(val_off, v)]
        if oracle.unitary.flag_count(j) == 1:
            segs.append((layout.offset(f"xi{j}"), 1))
        specs[j] = FieldSpec(tuple(segs))
    segs = [(val_off, v), (zeta_off, 1), (eta_off, 1)]
    if oracle.unitary.flag_count(d) == 3:
        segs.append((layout.offset(f"xi{d}"), 1))
    specs[d] = FieldSpec(tuple(segs))
    return OracleBinding(unitary=oracle.unitary, layout=layout, specs=specs)


# ---------------------------------------------------------------------------
# Scheme specifications and transcripts

@dataclass(frozen=True)
class MeasureSpec:
    name: str
    qubits: tuple[int, ...]
    basis: str = "computational"


@dataclass(frozen=True)
class Stage:
    """One scheme stage: a one-depth layer, then at most one oracle call,
    then optional measurements."""

    gates: GateLayer = GateLayer(())
    oracle_tag: int | None = None
    measures: tuple[MeasureSpec, ...] = ()


@dataclass(frozen=True)
class SchemeSpec:
    kind: str                 # "qc" | "cq" | "bare-qnc"
    depth: int                # budget
    stages: tuple[Stage, ...]
    max_invocations: int = 1  # cq only

    def __post_init__(self):
        if self.kind not in ("qc", "cq", "bare-qnc"):
            raise ContractViolation(f"unknown scheme kind {self.kind!r}")


@dataclass
class StageRecord:
    gate_names: tuple[str, ...]
    oracle_tag: int | None
    outcomes: dict[str, int] = field(default_factory=dict)


@dataclass
class SchemeTranscript:
    """Classical record of one scheme execution."""

    kind: str
    depth_budget: int
    invocations: list[list[StageRecord]]
    oracle_calls: int = 0
    unitary_layers: int = 0
    seed: int = 0

    @property
    def gate_names(self) -> set[str]:
        return {name for inv in self.invocations for rec in inv
                for name in rec.gate_names}

    @property
    def stages_used(self) -> int:
        return max((len(inv) for inv in self.invocations), default=0)

    def outcomes(self, invocation: int = -1) -> dict[str, int]:
        merged: dict[str, int] = {}
        for rec in self.invocations[invocation]:
            merged.update(rec.outcomes)
        return merged

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "depth_budget": self.depth_budget,
            "oracle_calls": self.oracle_calls,
            "unitary_layers": self.unitary_layers,
            "seed": self.seed,
            "invocations": [[{"gates": list(rec.gate_names),
                              "oracle_tag": rec.oracle_tag,
                              "outcomes": rec.outcomes} for rec in inv]
                            for inv in self.invocations],
        }


def _run_stages(state: State, stages, binding: OracleBinding,
                rng: np.random.Generator, transcript: SchemeTranscript,
                allow_measure: bool) -> tuple[State, list[StageRecord]]:
    records = []
    for stage in stages:
        state = state.apply_layer(stage.gates)
        transcript.unitary_layers += 1
        record = StageRecord(
            gate_names=tuple(g.name for g in stage.gates.gates),
            oracle_tag=stage.oracle_tag)
        if stage.oracle_tag is not None:
            state = binding.apply(state, stage.oracle_tag)
            transcript.oracle_calls += 1
        if stage.measures and not allow_measure:
            raise ContractViolation(
                "cq invocations measure only once, at the end")
        for ms in stage.measures:
            result = state.measure(list(ms.qubits), rng, ms.basis)
            record.outcomes[ms.name] = result.outcome
            state = result.state
        records.append(record)
    state.check_norm()
    return state, records


def run_qc_scheme(spec: SchemeSpec, binding: OracleBinding, seed: int,
                  hook=None) -> SchemeTranscript:
    """Run a qc-scheme: persistent state, one layer and oracle call per stage.

    hook, when given, receives (stage_index, outcome_dict) after each stage
    and sees classical data only.
    """
    if spec.kind != "qc":
        raise ContractViolation(f"expected a qc spec, got {spec.kind!r}")
    if len(spec.stages) > spec.depth:
        raise DepthBudgetError(
            f"{len(spec.stages)} stages exceed the depth budget {spec.depth}")
    transcript = SchemeTranscript(kind="qc", depth_budget=spec.depth,
                                  invocations=[], seed=seed)
    rng = rng_from(seed, "qc-run")
    state: State = SparseState.basis(binding.layout.width)
    records: list[StageRecord] = []
    for idx, stage in enumerate(spec.stages):
        state, recs = _run_stages(state, [stage], binding, rng, transcript,
                                  allow_measure=True)
        records.extend(recs)
        if hook is not None:
            hook(idx, dict(recs[-1].outcomes))
    transcript.invocations.append(records)
    return transcript


def run_cq_scheme(spec: SchemeSpec, binding: OracleBinding, seed: int,
                  controller=None) -> SchemeTranscript:
    """Run a cq-scheme: fresh circuits, full computational measurement at the end.

    controller(invocation_index, outcome_dict) -> bool decides whether to
    invoke again (subject to max_invocations); it sees classical data only.
    """
    if spec.kind != "cq":
        raise ContractViolation(f"expected a cq spec, got {spec.kind!r}")
    calls = sum(1 for st in spec.stages if st.oracle_tag is not None)
    if calls > spec.depth:
        raise DepthBudgetError(
            f"{calls} oracle calls exceed the depth budget {spec.depth}")
    if len(spec.stages) > spec.depth + 1:
        raise DepthBudgetError(
            f"{len(spec.stages)} layers exceed the {spec.depth + 1}-layer "
            "pattern of the relativized circuit")
    for stage in spec.stages[:-1]:
        if stage.measures:
            raise ContractViolation("cq invocations measure only once, at the end")
    final = spec.stages[-1]
    if any(ms.basis != "computational" for ms in final.measures):
        raise ContractViolation("cq final measurement must be computational")
    transcript = SchemeTranscript(kind="cq", depth_budget=spec.depth,
                                  invocations=[], seed=seed)
    rng = rng_from(seed, "cq-run")
    for invocation in range(spec.max_invocations):
        state: State = SparseState.basis(binding.layout.width)
        state, records = _run_stages(state, spec.stages[:-1], binding, rng,
                                     transcript, allow_measure=False)
        state, last = _run_stages(state, [final], binding, rng, transcript,
                                  allow_measure=True)
        records.extend(last)
        transcript.invocations.append(records)
        if controller is None or not controller(invocation,
                                                dict(last[-1].outcomes)):
            break
    return transcript


# ---------------------------------------------------------------------------
# The (d+1)-call solver

def bssp_qc_spec(n: int, d: int, layout: RegisterLayout,
                 hadamard_measure: bool = True) -> SchemeSpec:
    """The natural solver as a (d+1)-stage qc scheme.

    Stage 1 prepares the query superposition and performs the standard
    query; stages 2..d relay through the in-place permutations; the final
    stage queries the last tag, reads the value register and the domain
    flag, then measures the input register jointly with the pairing bit in
    the Hadamard basis.  Without Hadamard measurements an extra layer of H
    gates is appended (depth d+2).
    """
    x_qubits = layout.qubits("x")
    read_value = MeasureSpec("value",
                             tuple(layout.qubits("val") + layout.qubits("zeta")))
    jb_qubits = tuple(x_qubits + layout.qubits("eta"))
    stages = [Stage(GateLayer(tuple(H(q) for q in x_qubits)), oracle_tag=0)]
    stages += [Stage(oracle_tag=j) for j in range(1, d)]
    if hadamard_measure:
        stages.append(Stage(oracle_tag=d, measures=(
            read_value, MeasureSpec("jb", jb_qubits, "hadamard"))))
        return SchemeSpec(kind="qc", depth=d + 1, stages=tuple(stages))
    stages.append(Stage(oracle_tag=d, measures=(read_value,)))
    stages.append(Stage(GateLayer(tuple(H(q) for q in jb_qubits)),
                        measures=(MeasureSpec("jb", jb_qubits),)))
    return SchemeSpec(kind="qc", depth=d + 2, stages=tuple(stages))


def bssp_cq_spec(n: int, d: int, layout: RegisterLayout,
                 max_invocations: int = 1) -> SchemeSpec:
    """One solver invocation as a depth-(d+1) relativized circuit.

    cq circuits measure computationally, so the final Hadamards become the
    extra unitary layer after the last oracle call.
    """
    x_qubits = layout.qubits("x")
    jb_qubits = tuple(x_qubits + layout.qubits("eta"))
    stages = [Stage(GateLayer(tuple(H(q) for q in x_qubits)), oracle_tag=0)]
    stages += [Stage(oracle_tag=j) for j in range(1, d + 1)]
    stages.append(Stage(GateLayer(tuple(H(q) for q in jb_qubits)), measures=(
        MeasureSpec("value", tuple(layout.qubits("val") + layout.qubits("zeta"))),
        MeasureSpec("jb", jb_qubits))))
    return SchemeSpec(kind="cq", depth=d + 1, stages=tuple(stages),
                      max_invocations=max_invocations)


@dataclass
class BsspResult:
    """Outcome of a search or decision run."""

    n: int
    period: int | None
    equations: list[AffineEquation]
    samples_used: int
    verdict: str | None = None
    low_confidence: bool = False
    transcripts: list[SchemeTranscript] = field(default_factory=list)

    def check_equations(self) -> bool:
        """Every collected equation must be satisfied by the returned period."""
        if self.period is None:
            return True
        return all(dot_bits(self.period, eq.j) == eq.b for eq in self.equations)


def _split_jb(outcome: int, n: int) -> tuple[int, int]:
    return outcome & ((1 << n) - 1), (outcome >> n) & 1


def _one_sample(binding: OracleBinding, n: int, d: int, scheme: str,
                seed: int, strict_zeta: bool) -> tuple[int, int, SchemeTranscript]:
    layout = binding.layout
    if scheme == "qc":
        spec = bssp_qc_spec(n, d, layout)
        transcript = run_qc_scheme(spec, binding, seed)
    elif scheme == "cq":
        spec = bssp_cq_spec(n, d, layout)
        transcript = run_cq_scheme(spec, binding, seed)
    else:
        raise ContractViolation(f"unknown scheme {scheme!r}")
    outcomes = transcript.outcomes()
    v = embed_width(n, d)
    zeta = (outcomes["value"] >> v) & 1
    if strict_zeta and zeta != 1:
        raise BsspError("domain flag read 0 on a promised execution")
    j, b = _split_jb(outcomes["jb"], n)
    return j, b, transcript


def run_bssp_search(oracle: BsspOracle, seed: int, scheme: str = "qc",
                    max_samples: int | None = None, strict_zeta: bool = True,
                    keep_transcripts: bool = False) -> BsspResult:
    """Sample (j, b) pairs until the affine system pins down the period.

    Each sample is one fresh scheme execution (d+1 oracle calls).  Failure
    to reach full rank within the sample cap is reported, not raised.
    """
    n, d = oracle.n, oracle.d
    cap = max_samples if max_samples is not None else SAMPLE_CAP_FACTOR * n
    binding = search_binding(oracle)
    equations: list[AffineEquation] = []
    transcripts: list[SchemeTranscript] = []
    for k in range(cap):
        j, b, transcript = _one_sample(binding, n, d, scheme,
                                       derive_seed(seed, "sample", k),
                                       strict_zeta)
        if keep_transcripts:
            transcripts.append(transcript)
        equations.append(AffineEquation(j, b))
        outcome = solve_affine_system(equations, n)
        if outcome.unique and outcome.solution != 0:
            return BsspResult(n=n, period=outcome.solution, equations=equations,
                              samples_used=k + 1, transcripts=transcripts)
    return BsspResult(n=n, period=None, equations=equations, samples_used=cap,
                      transcripts=transcripts)


def run_bssp_decision(oracle: BsspOracle, seed: int, scheme: str = "qc",
                      samples: int | None = None) -> BsspResult:
    """Distinguish a periodic from an injective oracle via system consistency."""
    n, d = oracle.n, oracle.d
    count = samples if samples is not None else DECISION_FACTOR * n
    binding = search_binding(oracle)
    equations = [AffineEquation(*_split_jb_sample(binding, n, d, scheme,
                                                  derive_seed(seed, "sample", k)))
                 for k in range(count)]
    outcome = solve_affine_system(equations, n)
    verdict, low_confidence = _decide(outcome)
    return BsspResult(n=n, period=outcome.solution if outcome.unique else None,
                      equations=equations, samples_used=count, verdict=verdict,
                      low_confidence=low_confidence)


def _split_jb_sample(binding, n, d, scheme, seed) -> tuple[int, int]:
    j, b, _ = _one_sample(binding, n, d, scheme, seed, strict_zeta=True)
    return j, b


def _decide(outcome: SolveOutcome) -> tuple[str, bool]:
    if not outcome.consistent:
        return "injective", False
    if outcome.unique:
        return ("simon", False) if outcome.solution != 0 else ("injective", False)
    # Rank-deficient but consistent: a nonzero solution exists, flag it.
    return "simon", True


# ---------------------------------------------------------------------------
# Depth-budget sweep

def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


def _truncated_answer(oracle: BsspOracle, budget: int, seed: int) -> int:
    """Stop after `budget` oracle calls and guess from whatever was measured.

    Experimental strategy, not taken from any reference: the surviving
    Hadamard-basis readout of the input register is fed to the same solver,
    and an undetermined system falls back to a uniform nonzero guess.
    """
    n, d = oracle.n, oracle.d
    rng = rng_from(seed, "truncated-guess")
    if budget <= 0:
        return int(rng.integers(1, 1 << n))
    layout = search_layout(n, d)
    binding = search_binding(oracle, layout)
    x_qubits = layout.qubits("x")
    jb_qubits = tuple(x_qubits + layout.qubits("eta"))
    stages = [Stage(GateLayer(tuple(H(q) for q in x_qubits)), oracle_tag=0)]
    stages += [Stage(oracle_tag=j) for j in range(1, budget)]
    stages[-1] = Stage(gates=stages[-1].gates, oracle_tag=stages[-1].oracle_tag,
                       measures=(MeasureSpec("jb", jb_qubits, "hadamard"),))
    spec = SchemeSpec(kind="qc", depth=budget, stages=tuple(stages))
    equations = []
    for k in range(SAMPLE_CAP_FACTOR * n):
        transcript = run_qc_scheme(spec, binding, derive_seed(seed, "trunc", k))
        j, b = _split_jb(transcript.outcomes()["jb"], n)
        equations.append(AffineEquation(j, b))
    outcome = solve_affine_system(equations, n)
    if outcome.unique and outcome.solution != 0:
        return outcome.solution
    return int(rng.integers(1, 1 << n))


@dataclass
class SweepRow:
    budget: int
    strategy: str
    trials: int
    successes: int

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.successes, self.trials)

    def to_dict(self) -> dict:
        low, high = self.ci
        return {"budget": self.budget, "strategy": self.strategy,
                "trials": self.trials, "successes": self.successes,
                "rate": self.rate, "ci_low": low, "ci_high": high}


def run_depth_sweep(n: int, d: int, trials: int, seed: int,
                    threads: int = 1) -> list[SweepRow]:
    """Empirical success rate per oracle-call budget 0..d+1.

    Qualitative experiment only: the full-budget natural algorithm versus
    truncated runs and the classical guessing baseline.
    """
    rows = []
    for budget in range(d + 2):
        def trial(k: int, budget=budget) -> bool:
            trial_seed = derive_seed(seed, "sweep-trial", budget, k)
            oracle = sample_bssp_oracle(n, d, MODE_SIMON,
                                        derive_seed(trial_seed, "oracle"))
            if budget == d + 1:
                result = run_bssp_search(oracle, derive_seed(trial_seed, "run"))
                answer = result.period
                if answer is None:
                    answer = int(rng_from(trial_seed, "guess").integers(1, 1 << n))
            else:
                answer = _truncated_answer(oracle, budget,
                                           derive_seed(trial_seed, "run"))
            return answer == oracle.period

        outcomes = parallel_map(trial, range(trials), threads)
        strategy = ("classical-guess" if budget == 0 else
                    "natural" if budget == d + 1 else "truncated")
        rows.append(SweepRow(budget=budget, strategy=strategy, trials=trials,
                             successes=sum(outcomes)))
    return rows


def parallel_map(fn, items, threads: int = 1) -> list:
    """Order-preserving map; results are independent of the thread count."""
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
