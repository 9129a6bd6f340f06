import numpy as np
import pytest

from bssp.engine import GateLayer, H, SparseState
from bssp.errors import ContractViolation, ResourceError
from bssp.metrics import (bures, bures_pure, check_density_matrix,
                          density_from_samples, density_from_state, fidelity,
                          fidelity_pure)

SQ2 = 1 / np.sqrt(2)


def _rho(vec):
    v = np.asarray(vec, dtype=complex)
    return np.outer(v, v.conj())


def test_self_distance_zero():
    rho = _rho([SQ2, SQ2])
    assert bures(rho, rho) < 1e-9
    assert abs(fidelity(rho, rho) - 1.0) < 1e-9


def test_orthogonal_pure_states():
    assert abs(bures(_rho([1, 0]), _rho([0, 1])) - np.sqrt(2)) < 1e-9


def test_zero_vs_plus_closed_form():
    f = fidelity(_rho([1, 0]), _rho([SQ2, SQ2]))
    assert abs(f - SQ2) < 1e-9
    b = bures(_rho([1, 0]), _rho([SQ2, SQ2]))
    assert abs(b - np.sqrt(2 - np.sqrt(2))) < 1e-9


def test_pure_shortcut_agrees_with_density_path():
    zero = SparseState.basis(1)
    plus = zero.apply_layer(GateLayer((H(0),)))
    f_pure = fidelity_pure(zero, plus)
    f_full = fidelity(density_from_state(zero), density_from_state(plus))
    assert abs(f_pure - f_full) < 1e-9
    assert abs(bures_pure(zero, plus)
               - bures(density_from_state(zero), density_from_state(plus))) < 1e-9


def test_density_validation():
    with pytest.raises(ContractViolation):
        check_density_matrix(np.array([[1, 1], [0, 0]], dtype=complex))
    with pytest.raises(ContractViolation):
        check_density_matrix(np.eye(2, dtype=complex))  # trace 2
    with pytest.raises(ResourceError):
        check_density_matrix(np.eye(1 << 13, dtype=complex) / (1 << 13))


def test_mixture_construction():
    zero = SparseState.basis(1)
    one = SparseState(1, {1: 1.0})
    rho = density_from_samples([(zero, 0.5), (one, 0.5)])
    assert np.allclose(rho, np.eye(2) / 2)
    assert abs(fidelity(rho, rho) - 1.0) < 1e-9
    with pytest.raises(ContractViolation):
        density_from_samples([(zero, 0.7), (one, 0.7)])


def test_bures_bounds_probability_gap():
    # any projective distinguisher's probability gap is at most B
    rng = np.random.default_rng(5)
    for _ in range(25):
        a = rng.normal(size=4) + 1j * rng.normal(size=4)
        b = rng.normal(size=4) + 1j * rng.normal(size=4)
        a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
        gap = max(abs(abs(a[i]) ** 2 - abs(b[i]) ** 2) for i in range(4))
        bb = bures(_rho(a), _rho(b))
        assert gap <= bb + 1e-9
