"""Numerical checks of the hiding bound and the finding-probability bound.

The hiding (one-way-to-hiding) bound says the Bures distance between a
real-oracle and a shadow-oracle execution is at most sqrt(2 P_find), where
P_find is the flagged mass of the semi-classical toggle.  For a single
call on a pure state the inequality is an equality: the real and shadow
images of the hidden query mass are exactly orthogonal (the shadow flag
bit differs), and they agree elsewhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import (Field, FieldSpec, GateLayer, H, RegisterLayout,
                     SparseState, State, find_probability)
from .errors import ContractViolation
from .hiding import (FlagPredicates, flags_from_shadow, sample_hidden_chain,
                     semiclassical_flag_sets)
from .metrics import bures_pure
from .sampling import MODE_SIMON
from .schemes import (BsspOracle, OracleBinding, sample_bssp_oracle,
                      run_bssp_search, search_binding, search_layout,
                      shadow_bssp_oracle, parallel_map, wilson_interval)
from .seeding import derive_seed, rng_from
from .shuffling import embed_width

O2H_TOL = 1e-9


def o2h_layout(n: int, d: int) -> RegisterLayout:
    """Search registers plus one semi-classical find flag."""
    base = search_layout(n, d)
    return RegisterLayout(base.fields + (Field("find", 1, "ancilla"),))


def prefix_state(oracle: BsspOracle, upto_tag: int,
                 binding: OracleBinding) -> State:
    """The solver state just before the call to `upto_tag`."""
    layout = binding.layout
    state: State = SparseState.basis(layout.width)
    state = state.apply_layer(GateLayer(tuple(H(q) for q in layout.qubits("x"))))
    for tag in range(upto_tag):
        state = binding.apply(state, tag)
    return state


# ---------------------------------------------------------------------------
# Single-call hiding check

@dataclass
class O2hRecord:
    tag: int
    p_find: float
    bures: float
    bound: float          # sqrt(2 p_find)
    slack: float          # bound - bures
    equality_gap: float   # bures^2 - 2 p_find
    distinguisher_gap: float = 0.0

    @property
    def violated(self) -> bool:
        return self.bures > self.bound + O2H_TOL


@dataclass
class O2hReport:
    records: list[O2hRecord] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(1 for r in self.records if r.violated)

    @property
    def mean_p_find(self) -> float:
        return float(np.mean([r.p_find for r in self.records]))

    @property
    def mean_gap(self) -> float:
        return float(np.mean([r.distinguisher_gap for r in self.records]))

    @property
    def averaged_bound(self) -> float:
        return math.sqrt(2.0 * self.mean_p_find)

    @property
    def holds(self) -> bool:
        gaps = [r.distinguisher_gap for r in self.records]
        sigma = float(np.std(gaps) / math.sqrt(len(gaps))) if gaps else 0.0
        return (self.violations == 0
                and self.mean_gap <= self.averaged_bound + 3 * sigma + O2H_TOL)

    def to_dict(self) -> dict:
        return {
            "trials": len(self.records),
            "violations": self.violations,
            "mean_p_find": self.mean_p_find,
            "mean_distinguisher_gap": self.mean_gap,
            "averaged_bound": self.averaged_bound,
            "holds": self.holds,
            "max_equality_gap": max((abs(r.equality_gap) for r in self.records),
                                    default=0.0),
        }


def check_o2h_single(real: OracleBinding, shadow: OracleBinding,
                     flags: FlagPredicates, tag: int, state: State) -> O2hRecord:
    """Compare one real against one shadow call on the same pure input state.

    P_find is computed by the semi-classical flag toggle, the Bures
    distance from the two output states directly; both the inequality
    B <= sqrt(2 P_find) and the single-call equality B^2 = 2 P_find are
    recorded.  The input state must be independent of the hidden sets
    (callers enforce this by sampling it first) and must carry the find
    flag at zero.
    """
    layout = real.layout
    val_off = layout.offset("val")
    find_qubit = layout.offset("find")
    p_find, _ = find_probability(state, flags, [(tag, val_off)], find_qubit)
    out_real = real.apply(state, tag)
    out_shadow = shadow.apply(state, tag)
    b = bures_pure(out_real, out_shadow)
    bound = math.sqrt(2.0 * p_find)
    return O2hRecord(tag=tag, p_find=p_find, bures=b, bound=bound,
                     slack=bound - b, equality_gap=b * b - 2.0 * p_find)


# ---------------------------------------------------------------------------
# Distinguishers and the Monte Carlo expectation form

def _predicate(name: str, layout: RegisterLayout, n: int, d: int):
    if name == "ignore":
        return lambda index: False
    if name == "xi-flag":
        offsets = [layout.offset(f"xi{j}") for j in range(1, d + 1)]
        return lambda index: any((index >> off) & 1 for off in offsets)
    if name == "value-parity":
        val_off, v = layout.offset("val"), embed_width(n, d)
        mask = ((1 << v) - 1) << val_off
        return lambda index: bool((index & mask).bit_count() & 1)
    raise ContractViolation(f"unknown distinguisher {name!r}")


def outcome_probability(state: State, predicate) -> float:
    """Exact probability that a full computational measurement satisfies predicate."""
    return float(sum(abs(a) ** 2 for i, a in state.items() if predicate(i)))


def estimate_o2h_expectation(n: int, d: int, level: int, distinguisher: str,
                             trials: int, seed: int, threads: int = 1,
                             c: int = 1) -> O2hReport:
    """Monte Carlo over oracle and hidden-set samples of the single-call bound.

    Each trial samples a fresh oracle, runs the solver prefix up to a
    shadowed call slot, then records P_find, the Bures distance and the
    exact output-probability gap of the named distinguisher.  The report
    checks zero per-sample violations and the averaged form
    mean gap <= sqrt(2 E[P_find]) within a 3-sigma allowance.
    """
    if trials < 100:
        raise ContractViolation("expectation estimates need at least 100 trials")
    layout = o2h_layout(n, d)
    predicate = _predicate(distinguisher, layout, n, d)

    def trial(k: int) -> O2hRecord:
        tseed = derive_seed(seed, "o2h-trial", k)
        oracle = sample_bssp_oracle(n, d, MODE_SIMON, derive_seed(tseed, "oracle"))
        tag = level + int(rng_from(tseed, "slot").integers(0, d - level + 1))
        real = search_binding(oracle, layout)
        state = prefix_state(oracle, tag, real)
        shadow = shadow_bssp_oracle(oracle.fb, level,
                                    derive_seed(tseed, "hidden"), c=c)
        flags = flags_from_shadow(shadow.shadow)
        shadow_binding = search_binding(shadow, layout)
        record = check_o2h_single(real, shadow_binding, flags, tag, state)
        out_real = real.apply(state, tag)
        out_shadow = shadow_binding.apply(state, tag)
        record.distinguisher_gap = abs(outcome_probability(out_real, predicate)
                                       - outcome_probability(out_shadow, predicate))
        return record

    report = O2hReport()
    report.records = parallel_map(trial, range(trials), threads)
    return report


# ---------------------------------------------------------------------------
# Finding-probability bound over parallel query states

@dataclass
class BfpReport:
    estimate: float
    bound: float      # p * q
    q: int
    p: float
    sigma: float      # standard error of the estimate
    trials: int
    family: str

    @property
    def ratio(self) -> float:
        return self.estimate / self.bound if self.bound else math.inf

    @property
    def holds(self) -> bool:
        return self.estimate <= self.bound + 3 * self.sigma + O2H_TOL

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "bound": self.bound, "q": self.q,
                "p": self.p, "sigma": self.sigma, "ratio": self.ratio,
                "trials": self.trials, "family": self.family,
                "holds": self.holds}


def _query_layout(v: int, q: int) -> RegisterLayout:
    fields = tuple(Field(f"slot{i}", v, "query") for i in range(q))
    return RegisterLayout(fields + (Field("find", 1, "ancilla"),))


def _query_state(layout: RegisterLayout, v: int, q: int, family: str,
                 seed: int) -> State:
    """A q-slot parallel query state, sampled before the hidden sets."""
    rng = rng_from(seed, "query-state")
    if family == "classical":
        # q distinct fixed query points, one per slot.
        points = rng.choice(1 << v, size=q, replace=False)
        index = 0
        for i, point in enumerate(points):
            index |= int(point) << layout.offset(f"slot{i}")
        return SparseState.basis(layout.width, index)
    if family == "uniform":
        state: State = SparseState.basis(layout.width)
        gates = [H(qubit) for i in range(q) for qubit in layout.qubits(f"slot{i}")]
        return state.apply_layer(GateLayer(tuple(gates)))
    raise ContractViolation(f"unknown query-state family {family!r}")


def check_bfp(n: int, d: int, level: int, q: int, trials: int, seed: int,
              family: str = "classical", threads: int = 1) -> BfpReport:
    """Estimate E[P_find] of a q-slot query state over hidden-set resamples.

    Each slot queries one oracle layer at the hidden level; the state and
    the oracle are sampled before the hidden sets, so the expected flagged
    mass is bounded by p*q with p = 2^-n (the extremal hidden-set ratio).
    """
    if not 1 <= level <= d:
        raise ContractViolation(f"level {level} outside 1..{d}")
    v = embed_width(n, d)
    layout = _query_layout(v, q)
    find_qubit = layout.offset("find")
    slots = [(level, layout.offset(f"slot{i}")) for i in range(q)]

    def trial(k: int) -> float:
        tseed = derive_seed(seed, "bfp-trial", k)
        oracle = sample_bssp_oracle(n, d, MODE_SIMON, derive_seed(tseed, "oracle"))
        state = _query_state(layout, v, q, family, derive_seed(tseed, "state"))
        chain = sample_hidden_chain(oracle.fb, level, derive_seed(tseed, "hidden"))
        flags = semiclassical_flag_sets(chain[-1])
        p_find, _ = find_probability(state, flags, slots, find_qubit)
        return p_find

    values = np.array(parallel_map(trial, range(trials), threads))
    return BfpReport(estimate=float(values.mean()), bound=(2.0 ** -n) * q,
                     q=q, p=2.0 ** -n,
                     sigma=float(values.std(ddof=1) / math.sqrt(trials)),
                     trials=trials, family=family)


# ---------------------------------------------------------------------------
# Shadow opacity experiment

@dataclass
class OpacityRow:
    arm: str
    trials: int
    successes: int
    baseline: float

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.successes, self.trials)

    def to_dict(self) -> dict:
        low, high = self.ci
        return {"arm": self.arm, "trials": self.trials,
                "successes": self.successes, "rate": self.rate,
                "baseline": self.baseline, "ci_low": low, "ci_high": high}


def _guessing_search(oracle: BsspOracle, seed: int,
                     strict_zeta: bool = True) -> int:
    """Run the search and fall back to a uniform nonzero guess on failure."""
    result = run_bssp_search(oracle, seed, strict_zeta=strict_zeta)
    if result.period is not None:
        return result.period
    return int(rng_from(seed, "opacity-guess").integers(1, 1 << oracle.n))


def shadow_indistinguishability_experiment(n: int, d: int, trials: int,
                                           seed: int,
                                           threads: int = 1) -> list[OpacityRow]:
    """Paired-seed recovery rates: real oracle vs level-1 shadows (c=0 and c=1).

    Against a shadow the hidden slice carries no information about the
    period, so the recovery rate should sit at the 1/(2^n - 1) guessing
    baseline; the paired real-oracle runs recover reliably.
    """
    baseline = 1.0 / ((1 << n) - 1)

    def trial(k: int) -> tuple[bool, bool, bool]:
        tseed = derive_seed(seed, "opacity-trial", k)
        oracle = sample_bssp_oracle(n, d, MODE_SIMON, derive_seed(tseed, "oracle"))
        run_seed = derive_seed(tseed, "run")
        real_hit = _guessing_search(oracle, run_seed) == oracle.period
        hits = []
        for c in (1, 0):
            shadow = shadow_bssp_oracle(oracle.fb, 1,
                                        derive_seed(tseed, "hidden"), c=c)
            answer = _guessing_search(shadow, run_seed, strict_zeta=False)
            hits.append(answer == oracle.period)
        return real_hit, hits[0], hits[1]

    outcomes = parallel_map(trial, range(trials), threads)
    arms = ["real", "shadow-c1", "shadow-c0"]
    bases = [None, baseline, baseline]
    rows = []
    for idx, (arm, base) in enumerate(zip(arms, bases)):
        successes = sum(1 for out in outcomes if out[idx])
        rows.append(OpacityRow(arm=arm, trials=trials, successes=successes,
                               baseline=base if base is not None else 1.0))
    return rows
