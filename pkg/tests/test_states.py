import numpy as np
import pytest

from manakit.states import (
    DensityMatrix,
    basis_state,
    maximally_mixed,
    mix,
    partial_trace_last,
    pure_state,
    random_mixed,
    random_pure,
    tensor,
)
from manakit.system import QuditSystem

S3 = QuditSystem(3, 1)


def test_validation_rejects_non_hermitian():
    m = np.eye(3, dtype=complex)
    m[0, 1] = 1e-6
    with pytest.raises(ValueError, match="Hermitian"):
        DensityMatrix(S3, m)


def test_validation_rejects_bad_trace():
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix(S3, np.eye(3, dtype=complex))


def test_validation_rejects_negative_eigenvalue():
    m = np.diag([1.1, -0.1, 0.0]).astype(complex)
    with pytest.raises(ValueError, match="negative eigenvalue"):
        DensityMatrix(S3, m)


def test_matrix_is_read_only():
    rho = maximally_mixed(S3)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 2.0


def test_pure_state_normalizes():
    rho = pure_state(S3, [0, 2, -2])
    assert abs(rho.purity() - 1.0) < 1e-12
    assert abs(np.trace(rho.matrix) - 1.0) < 1e-12


def test_basis_and_mixed():
    assert basis_state(S3, 2).matrix[2, 2] == 1.0
    assert np.allclose(maximally_mixed(S3).matrix, np.eye(3) / 3)


def test_mix_validates_weights():
    with pytest.raises(ValueError):
        mix([maximally_mixed(S3), basis_state(S3, 0)], [0.7, 0.7])


def test_tensor_and_partial_trace_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = random_mixed(S3, rng)
        b = random_mixed(S3, rng)
        ab = tensor(a, b)
        assert ab.sys == QuditSystem(3, 2)
        back = partial_trace_last(ab)
        assert np.max(np.abs(back.matrix - a.matrix)) < 1e-12


def test_partial_trace_against_explicit_sum():
    rng = np.random.default_rng(4)
    rho = random_mixed(QuditSystem(3, 2), rng)
    expected = np.zeros((3, 3), dtype=complex)
    for j in range(3):
        ket = np.zeros(3)
        ket[j] = 1.0
        proj = np.kron(np.eye(3), ket.reshape(1, 3))
        expected += proj @ rho.matrix @ proj.conj().T
    assert np.max(np.abs(partial_trace_last(rho).matrix - expected)) < 1e-12


def test_random_states_are_valid():
    rng = np.random.default_rng(5)
    for _ in range(20):
        DensityMatrix(S3, random_mixed(S3, rng).matrix)
        DensityMatrix(S3, random_pure(S3, rng).matrix)
