"""State-distance metrics: fidelity, Bures distance, density-matrix helpers."""
from __future__ import annotations

import numpy as np

from .engine import State
from .errors import ContractViolation, ResourceError

DENSITY_CAP_QUBITS = 12
PSD_TOL = 1e-9
# sqrt(2 - 2F) turns a 1e-16 fidelity error into 1e-8 of Bures distance,
# so fidelities within the algebraic tolerance of 1 are snapped to 1.
SNAP_TOL = 1e-12


def _clip_fidelity(value: float) -> float:
    if value > 1.0 - SNAP_TOL:
        return 1.0
    return max(value, 0.0)


def check_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Validate Hermiticity, positivity and unit trace within 1e-9."""
    rho = np.asarray(rho, dtype=np.complex128)
    dim = rho.shape[0]
    if rho.shape != (dim, dim):
        raise ContractViolation("density matrix must be square")
    if dim > (1 << DENSITY_CAP_QUBITS):
        raise ResourceError(f"density matrix dimension {dim} exceeds the "
                            f"2^{DENSITY_CAP_QUBITS} cap")
    if not np.allclose(rho, rho.conj().T, atol=PSD_TOL):
        raise ContractViolation("density matrix is not Hermitian")
    eigs = np.linalg.eigvalsh(rho)
    if eigs.min() < -PSD_TOL:
        raise ContractViolation(f"density matrix not PSD (min eig {eigs.min()})")
    if abs(np.trace(rho).real - 1.0) > PSD_TOL:
        raise ContractViolation(f"trace {np.trace(rho)} != 1")
    return rho


def _sqrtm_psd(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """F(rho, sigma) = tr sqrt(sqrt(rho) sigma sqrt(rho)), clipped to [0, 1]."""
    rho = check_density_matrix(rho)
    sigma = check_density_matrix(sigma)
    if rho.shape != sigma.shape:
        raise ContractViolation("dimension mismatch")
    # tr sqrt(sqrt(rho) sigma sqrt(rho)) equals the nuclear norm of
    # sqrt(rho) sqrt(sigma).
    product = _sqrtm_psd(rho) @ _sqrtm_psd(sigma)
    value = float(np.linalg.svd(product, compute_uv=False).sum())
    return _clip_fidelity(min(value, 1.0))


def bures(rho: np.ndarray, sigma: np.ndarray) -> float:
    """B(rho, sigma) = sqrt(2 - 2 F(rho, sigma))."""
    return float(np.sqrt(max(2.0 - 2.0 * fidelity(rho, sigma), 0.0)))


def fidelity_pure(psi: State, phi: State) -> float:
    """|<psi|phi>| shortcut when both states are pure."""
    return _clip_fidelity(min(abs(psi.inner(phi)), 1.0))


def bures_pure(psi: State, phi: State) -> float:
    return float(np.sqrt(max(2.0 - 2.0 * fidelity_pure(psi, phi), 0.0)))


def density_from_state(state: State, dim: int | None = None) -> np.ndarray:
    dim = dim if dim is not None else (1 << state.width)
    vec = np.zeros(dim, dtype=np.complex128)
    for i, a in state.items():
        vec[i] = a
    return np.outer(vec, vec.conj())


def density_from_samples(samples: list[tuple[State, float]]) -> np.ndarray:
    """Convex combination of pure states (a Monte Carlo mixture surrogate)."""
    if not samples:
        raise ContractViolation("empty sample list")
    total = sum(w for _, w in samples)
    if abs(total - 1.0) > 1e-9:
        raise ContractViolation(f"weights sum to {total}, not 1")
    width = samples[0][0].width
    if any(s.width != width for s, _ in samples):
        raise ContractViolation("dimension mismatch across samples")
    if width > DENSITY_CAP_QUBITS:
        raise ResourceError(f"{width}-qubit density matrix exceeds the "
                            f"{DENSITY_CAP_QUBITS}-qubit cap")
    rho = np.zeros((1 << width, 1 << width), dtype=np.complex128)
    for state, weight in samples:
        rho += weight * density_from_state(state)
    return rho
