"""Quantum state simulation over declared register layouts.

Two engines share one interface: a dense amplitude vector (cap 24 qubits,
the correctness oracle) and a sparse basis-index map (the default for
oracle-query algorithms, whose layers only permute basis states).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, ResourceError

DENSE_CAP = 24
NORM_TOL = 1e-9

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


# ---------------------------------------------------------------------------
# Layouts and gates

@dataclass(frozen=True)
class Field:
    name: str
    width: int
    role: str = "work"


@dataclass(frozen=True)
class RegisterLayout:
    """Named contiguous qubit fields; offsets assigned in declaration order."""

    fields: tuple[Field, ...]

    def __post_init__(self):
        names = [f.name for f in self.fields]
        if len(set(names)) != len(names):
            raise ContractViolation("duplicate field names")

    @property
    def width(self) -> int:
        return sum(f.width for f in self.fields)

    def offset(self, name: str) -> int:
        pos = 0
        for f in self.fields:
            if f.name == name:
                return pos
            pos += f.width
        raise ContractViolation(f"no field named {name!r}")

    def qubits(self, name: str) -> list[int]:
        off = self.offset(name)
        width = next(f.width for f in self.fields if f.name == name)
        return list(range(off, off + width))


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    matrix: np.ndarray | None = None


def H(q: int) -> Gate:
    return Gate("H", (q,))


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def U1(q: int, matrix: np.ndarray) -> Gate:
    return Gate("U1", (q,), np.asarray(matrix, dtype=np.complex128))


def U2(qa: int, qb: int, matrix: np.ndarray) -> Gate:
    return Gate("U2", (qa, qb), np.asarray(matrix, dtype=np.complex128))


@dataclass(frozen=True)
class GateLayer:
    """A one-depth layer: gates acting on pairwise disjoint qubits."""

    gates: tuple[Gate, ...]

    def __post_init__(self):
        seen: set[int] = set()
        for gate in self.gates:
            for q in gate.qubits:
                if q in seen:
                    raise ContractViolation(
                        f"qubit {q} targeted twice in one layer (depth violation)")
                seen.add(q)


# ---------------------------------------------------------------------------
# Block field specs

@dataclass(frozen=True)
class FieldSpec:
    """How a block's input bits map onto state qubits, low bits first.

    Segments with offset None are constant-zero padding: the block sees 0
    there and must return 0 for the result to be representable.
    """

    segments: tuple[tuple[int | None, int], ...]

    @property
    def width(self) -> int:
        return sum(w for _, w in self.segments)


@dataclass(frozen=True)
class MeasureResult:
    outcome: int
    probability: float
    state: "State"


# ---------------------------------------------------------------------------
# States

class State:
    width: int

    def copy(self) -> "State":
        raise NotImplementedError

    def norm_sq(self) -> float:
        raise NotImplementedError

    def items(self):
        """Iterate (basis_index, amplitude) over the support."""
        raise NotImplementedError

    def amplitude(self, index: int) -> complex:
        raise NotImplementedError

    def apply_layer(self, layer: GateLayer) -> "State":
        raise NotImplementedError

    def apply_block(self, block, spec: FieldSpec) -> "State":
        raise NotImplementedError

    def apply_index_map(self, fn) -> "State":
        """Relabel basis states by an injective index map."""
        raise NotImplementedError

    def probabilities(self, qubits: list[int]) -> dict[int, float]:
        probs: dict[int, float] = {}
        for index, amp in self.items():
            out = _extract(index, qubits)
            probs[out] = probs.get(out, 0.0) + abs(amp) ** 2
        return probs

    def measure(self, qubits: list[int], rng: np.random.Generator,
                basis: str = "computational") -> MeasureResult:
        """Born-rule measurement via inverse CDF; hadamard basis rotates first."""
        if not qubits:
            raise ContractViolation("empty measurement qubit set")
        state = self
        if basis == "hadamard":
            state = state.apply_layer(GateLayer(tuple(H(q) for q in qubits)))
        elif basis != "computational":
            raise ContractViolation(f"unknown basis {basis!r}")
        probs = state.probabilities(qubits)
        outcome = _sample_outcome(probs, rng)
        post = state.project(qubits, outcome)
        return MeasureResult(outcome=outcome, probability=probs[outcome], state=post)

    def project(self, qubits: list[int], outcome: int) -> "State":
        raise NotImplementedError

    def check_norm(self):
        if abs(self.norm_sq() - 1.0) > NORM_TOL:
            raise ContractViolation(f"state norm drifted to {self.norm_sq()}")


def _extract(index: int, qubits: list[int]) -> int:
    out = 0
    for k, q in enumerate(qubits):
        out |= ((index >> q) & 1) << k
    return out


def _sample_outcome(probs: dict[int, float], rng: np.random.Generator) -> int:
    u = rng.random()
    acc = 0.0
    last = None
    for outcome in sorted(probs):
        acc += probs[outcome]
        last = outcome
        if u < acc:
            return outcome
    return last  # u landed in the rounding tail


def _pack_fields(index: int, spec: FieldSpec) -> int:
    packed = 0
    pos = 0
    for offset, width in spec.segments:
        if offset is not None:
            packed |= ((index >> offset) & ((1 << width) - 1)) << pos
        pos += width
    return packed


def _unpack_fields(index: int, packed: int, spec: FieldSpec) -> int:
    pos = 0
    out = index
    for offset, width in spec.segments:
        chunk = (packed >> pos) & ((1 << width) - 1)
        if offset is None:
            if chunk:
                raise ContractViolation(
                    "block wrote a nonzero value into constant-zero padding")
        else:
            out &= ~(((1 << width) - 1) << offset)
            out |= chunk << offset
        pos += width
    return out


class SparseState(State):
    """Basis-index -> amplitude map; the default engine for promised runs."""

    def __init__(self, width: int, amps: dict[int, complex]):
        self.width = width
        self.amps = {i: a for i, a in amps.items() if a != 0}

    @classmethod
    def basis(cls, width: int, index: int = 0) -> "SparseState":
        return cls(width, {index: 1.0 + 0j})

    def copy(self) -> "SparseState":
        return SparseState(self.width, dict(self.amps))

    def norm_sq(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.amps.values()))

    def items(self):
        return self.amps.items()

    def amplitude(self, index: int) -> complex:
        return self.amps.get(index, 0j)

    @property
    def support_size(self) -> int:
        return len(self.amps)

    def apply_layer(self, layer: GateLayer) -> "SparseState":
        state = self
        for gate in layer.gates:
            state = state._apply_gate(gate)
        return state

    def _apply_gate(self, gate: Gate) -> "SparseState":
        if gate.name == "CNOT":
            c, t = gate.qubits
            return SparseState(self.width, {
                (i ^ (((i >> c) & 1) << t)): a for i, a in self.amps.items()})
        if gate.name == "H":
            mat, qs = _H, gate.qubits
        elif gate.name == "U1":
            mat, qs = gate.matrix, gate.qubits
        elif gate.name == "U2":
            mat, qs = gate.matrix, gate.qubits
        else:
            raise ContractViolation(f"unknown gate {gate.name!r}")
        new: dict[int, complex] = {}
        for i, a in self.amps.items():
            col = _extract(i, list(qs))
            base = i
            for q in qs:
                base &= ~(1 << q)
            for row in range(len(mat)):
                coeff = mat[row, col]
                if coeff == 0:
                    continue
                j = base
                for k, q in enumerate(qs):
                    j |= ((row >> k) & 1) << q
                new[j] = new.get(j, 0j) + coeff * a
        return SparseState(self.width, {i: a for i, a in new.items()
                                        if abs(a) > 1e-15})

    def apply_block(self, block, spec: FieldSpec) -> "SparseState":
        new: dict[int, complex] = {}
        for i, a in self.amps.items():
            packed = _pack_fields(i, spec)
            new[_unpack_fields(i, block.apply_index(packed), spec)] = a
        if len(new) != len(self.amps):
            raise ContractViolation("block application collided basis states")
        return SparseState(self.width, new)

    def apply_index_map(self, fn) -> "SparseState":
        new = {fn(i): a for i, a in self.amps.items()}
        if len(new) != len(self.amps):
            raise ContractViolation("index map is not injective on the support")
        return SparseState(self.width, new)

    def project(self, qubits: list[int], outcome: int) -> "SparseState":
        kept = {i: a for i, a in self.amps.items()
                if _extract(i, qubits) == outcome}
        norm = np.sqrt(sum(abs(a) ** 2 for a in kept.values()))
        if norm == 0:
            raise ContractViolation("projection onto a zero-probability outcome")
        return SparseState(self.width, {i: a / norm for i, a in kept.items()})

    def to_dense(self) -> "DenseState":
        dense = DenseState.zero(self.width)
        for i, a in self.amps.items():
            dense.vector[i] = a
        return dense

    def inner(self, other: "SparseState") -> complex:
        acc = 0j
        for i, a in self.amps.items():
            b = other.amps.get(i)
            if b is not None:
                acc += np.conj(a) * b
        return acc


class DenseState(State):
    """Dense complex amplitude vector; the equivalence oracle for the sparse engine."""

    def __init__(self, width: int, vector: np.ndarray):
        if width > DENSE_CAP:
            raise ResourceError(f"dense state of {width} qubits exceeds cap",
                                required=width, available=DENSE_CAP)
        if vector.shape != (1 << width,):
            raise ContractViolation("vector length does not match width")
        self.width = width
        self.vector = np.asarray(vector, dtype=np.complex128)

    @classmethod
    def zero(cls, width: int) -> "DenseState":
        vec = np.zeros(1 << width, dtype=np.complex128)
        return cls(width, vec)

    @classmethod
    def basis(cls, width: int, index: int = 0) -> "DenseState":
        state = cls.zero(width)
        state.vector[index] = 1.0
        return state

    def copy(self) -> "DenseState":
        return DenseState(self.width, self.vector.copy())

    def norm_sq(self) -> float:
        return float(np.vdot(self.vector, self.vector).real)

    def items(self):
        support = np.flatnonzero(np.abs(self.vector) > 0)
        return ((int(i), complex(self.vector[i])) for i in support)

    def amplitude(self, index: int) -> complex:
        return complex(self.vector[index])

    def apply_layer(self, layer: GateLayer) -> "DenseState":
        state = self.copy()
        for gate in layer.gates:
            state._apply_gate_inplace(gate)
        return state

    def _apply_gate_inplace(self, gate: Gate):
        if gate.name == "H":
            _apply_1q(self.vector, gate.qubits[0], _H)
        elif gate.name == "U1":
            _apply_1q(self.vector, gate.qubits[0], gate.matrix)
        elif gate.name == "CNOT":
            c, t = gate.qubits
            idx = np.arange(len(self.vector))
            self.vector = self.vector[idx ^ (((idx >> c) & 1) << t)]
        elif gate.name == "U2":
            _apply_2q(self.vector, gate.qubits[0], gate.qubits[1], gate.matrix)
        else:
            raise ContractViolation(f"unknown gate {gate.name!r}")

    def apply_block(self, block, spec: FieldSpec) -> "DenseState":
        idx = np.arange(len(self.vector), dtype=np.int64)
        packed = np.zeros_like(idx)
        pos = 0
        for offset, width in spec.segments:
            if offset is not None:
                packed |= ((idx >> offset) & ((1 << width) - 1)) << pos
            pos += width
        out = block.apply_indices(packed)
        dest = idx.copy()
        pos = 0
        bad = np.zeros(len(idx), dtype=bool)
        for offset, width in spec.segments:
            chunk = (out >> pos) & ((1 << width) - 1)
            if offset is None:
                bad |= chunk != 0
            else:
                dest &= ~(((1 << width) - 1) << offset)
                dest |= chunk << offset
            pos += width
        if np.any(bad & (np.abs(self.vector) > 1e-15)):
            raise ContractViolation(
                "block wrote a nonzero value into constant-zero padding")
        new = DenseState.zero(self.width)
        good = ~bad
        new.vector[dest[good]] = self.vector[good]
        return new

    def apply_index_map(self, fn) -> "DenseState":
        idx = np.arange(len(self.vector), dtype=np.int64)
        dest = fn(idx) if callable(fn) else np.asarray(fn)[idx]
        new = DenseState.zero(self.width)
        new.vector[dest] = self.vector
        return new

    def probabilities(self, qubits: list[int]) -> dict[int, float]:
        idx = np.arange(len(self.vector))
        out = np.zeros(len(self.vector), dtype=np.int64)
        for k, q in enumerate(qubits):
            out |= ((idx >> q) & 1) << k
        weights = np.abs(self.vector) ** 2
        totals = np.bincount(out, weights=weights, minlength=1 << len(qubits))
        return {int(o): float(p) for o, p in enumerate(totals) if p > 0}

    def project(self, qubits: list[int], outcome: int) -> "DenseState":
        idx = np.arange(len(self.vector))
        out = np.zeros(len(self.vector), dtype=np.int64)
        for k, q in enumerate(qubits):
            out |= ((idx >> q) & 1) << k
        keep = out == outcome
        vec = np.where(keep, self.vector, 0)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ContractViolation("projection onto a zero-probability outcome")
        return DenseState(self.width, vec / norm)

    def inner(self, other: "DenseState") -> complex:
        return complex(np.vdot(self.vector, other.vector))


def _apply_1q(psi: np.ndarray, q: int, mat: np.ndarray):
    step = 1 << q
    block = step << 1
    base = np.arange(0, len(psi), block)
    off = np.arange(step)
    idx0 = (base[:, None] + off[None, :]).ravel()
    idx1 = idx0 + step
    a, b = psi[idx0].copy(), psi[idx1].copy()
    psi[idx0] = mat[0, 0] * a + mat[0, 1] * b
    psi[idx1] = mat[1, 0] * a + mat[1, 1] * b


def _apply_2q(psi: np.ndarray, qa: int, qb: int, mat: np.ndarray):
    # mat rows/cols ordered (qb, qa) little-endian: col = bit(qa) | bit(qb)<<1? no:
    # col index bit 0 = qa, bit 1 = qb.
    idx = np.arange(len(psi))
    bases = idx[((idx >> qa) & 1 == 0) & (((idx >> qb) & 1) == 0)]
    cols = [bases, bases | (1 << qa), bases | (1 << qb),
            bases | (1 << qa) | (1 << qb)]
    v = np.stack([psi[c] for c in cols])
    r = mat @ v
    for k, c in enumerate(cols):
        psi[c] = r[k]


# ---------------------------------------------------------------------------
# Semi-classical flag toggle and finding probability

def apply_semiclassical_toggle(state: State, pack, slots: list[tuple[int, int]],
                               flag_qubit: int) -> State:
    """Flip the flag qubit on basis states whose query values hit the hidden sets.

    slots maps layer j -> offset of that slot's value register in the layout.
    """
    mask = (1 << pack.width) - 1

    def toggle(i: int) -> int:
        for layer, offset in slots:
            if pack.members[layer][(i >> offset) & mask]:
                return i ^ (1 << flag_qubit)
        return i

    if isinstance(state, SparseState):
        return state.apply_index_map(toggle)
    idx = np.arange(1 << state.width, dtype=np.int64)
    hit = np.zeros(len(idx), dtype=bool)
    for layer, offset in slots:
        hit |= pack.members[layer][(idx >> offset) & mask]
    return state.apply_index_map(np.where(hit, idx ^ (1 << flag_qubit), idx))


def find_probability(state: State, pack, slots: list[tuple[int, int]],
                     flag_qubit: int) -> tuple[float, State]:
    """Toggle the semi-classical flag, then return the flagged squared mass.

    The state must carry the flag qubit at 0; the subsequent oracle call
    permutes basis states without touching the flag, so the flagged mass
    after the toggle equals the finding probability of the full call.
    """
    toggled = apply_semiclassical_toggle(state, pack, slots, flag_qubit)
    prob = 0.0
    for i, a in toggled.items():
        if (i >> flag_qubit) & 1:
            prob += abs(a) ** 2
    return prob, toggled
