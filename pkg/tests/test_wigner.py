import io

import numpy as np
import pytest

from manakit.algebra import clifford_generators, random_clifford
from manakit.states import (
    basis_state,
    maximally_mixed,
    partial_trace_last,
    pure_state,
    random_mixed,
    random_pure,
    tensor,
)
from manakit.system import QuditSystem
from manakit.wigner import (
    WignerFunction,
    clifford_covariance_check,
    phase_point_operator,
    reconstruct,
    trace_inner_product_check,
    wigner_basis,
    wigner_coefficients,
    wigner_marginal_last,
    wigner_of_povm_element,
    wigner_of_state,
    wigner_tensor,
)

from reference import ref_a_ops, ref_wigner

S3 = QuditSystem(3, 1)


def test_phase_point_operators_match_reference():
    for d, n in [(3, 1), (5, 1), (3, 2)]:
        sys = QuditSystem(d, n)
        stack = wigner_basis(sys).stack
        for a_lib, a_ref in zip(stack, ref_a_ops(d, n)):
            assert np.max(np.abs(a_lib - a_ref)) < 1e-12


def test_a00_eigenvalues():
    eigs = np.linalg.eigvalsh(phase_point_operator(S3, (0, 0)).matrix)
    assert np.allclose(sorted(eigs), [-1, 1, 1], atol=1e-12)


@pytest.mark.parametrize("d", [3, 5])
def test_unit_trace_and_hermiticity(d):
    sys = QuditSystem(d, 1)
    for a in wigner_basis(sys).stack:
        assert abs(np.trace(a) - 1.0) < 1e-12
        assert np.max(np.abs(a - a.conj().T)) < 1e-12


def test_tensor_product_structure():
    a1 = wigner_basis(S3).stack
    a2 = wigner_basis(QuditSystem(3, 2)).stack
    for i in range(9):
        for j in range(9):
            assert np.max(np.abs(a2[i * 9 + j] - np.kron(a1[i], a1[j]))) < 1e-12


def test_wigner_of_maximally_mixed():
    w = wigner_of_state(maximally_mixed(S3))
    assert np.allclose(w.values, np.full(9, 1 / 9), atol=1e-15)


def test_wigner_strange_single_negative_entry():
    w = wigner_of_state(pure_state(S3, [0, 1, -1]))
    negatives = w.values[w.values < -1e-12]
    assert len(negatives) == 1
    assert abs(negatives[0] + 1 / 3) < 1e-12


def test_wigner_norrell_two_negative_entries():
    w = wigner_of_state(pure_state(S3, [-1, 2, -1]))
    negatives = np.sort(w.values[w.values < -1e-12])
    assert len(negatives) == 2
    assert np.allclose(negatives, [-1 / 6, -1 / 6], atol=1e-12)


def test_wigner_matches_reference_on_random_states():
    rng = np.random.default_rng(6)
    for d, n in [(3, 1), (5, 1), (3, 2)]:
        sys = QuditSystem(d, n)
        rho = random_mixed(sys, rng)
        assert np.max(np.abs(wigner_of_state(rho).values
                             - ref_wigner(d, n, rho.matrix))) < 1e-12


def test_wigner_sums_to_one():
    rng = np.random.default_rng(7)
    for _ in range(20):
        w = wigner_of_state(random_mixed(S3, rng))
        assert abs(w.total() - 1.0) < 1e-12


def test_imaginary_residue_raises():
    bad = np.eye(3, dtype=complex) / 3
    bad[0, 1] = 0.1j  # not Hermitian
    with pytest.raises(ValueError, match="imaginary residue"):
        wigner_coefficients(S3, bad)


def test_povm_identity_all_ones():
    w = wigner_of_povm_element(S3, np.eye(3))
    assert np.allclose(w.values, 1.0, atol=1e-12)


def test_povm_basis_state_is_line_indicator():
    w = wigner_of_povm_element(S3, basis_state(S3, 0).matrix)
    # computed against the independent trace oracle
    expected = np.array([np.trace(a @ basis_state(S3, 0).matrix).real
                         for a in ref_a_ops(3, 1)])
    assert np.max(np.abs(w.values - expected)) < 1e-12
    assert np.allclose(np.sort(w.values), [0, 0, 0, 0, 0, 0, 1, 1, 1], atol=1e-12)


def test_povm_completeness():
    total = sum(wigner_of_povm_element(S3, basis_state(S3, i).matrix).values
                for i in range(3))
    assert np.allclose(total, 1.0, atol=1e-12)


def test_povm_rejects_bad_effects():
    with pytest.raises(ValueError):
        wigner_of_povm_element(S3, 2 * np.eye(3))


def test_reconstruct_round_trip_100_states():
    rng = np.random.default_rng(8)
    for _ in range(100):
        rho = random_pure(S3, rng)
        back = reconstruct(wigner_of_state(rho))
        assert np.max(np.abs(back - rho.matrix)) < 1e-12


def test_reconstruct_uniform_vector_is_identity():
    w = WignerFunction(S3, np.full(9, 1 / 9))
    assert np.max(np.abs(reconstruct(w) - np.eye(3) / 3)) < 1e-12


def test_trace_inner_product_purity():
    rho = basis_state(S3, 0)
    lhs, rhs, diff = trace_inner_product_check(rho, rho)
    assert abs(lhs - 1) < 1e-12 and diff < 1e-12


def test_trace_inner_product_with_mixed():
    rng = np.random.default_rng(9)
    lhs, rhs, diff = trace_inner_product_check(maximally_mixed(S3),
                                               random_mixed(S3, rng))
    assert abs(lhs - 1 / 3) < 1e-12 and diff < 1e-12


def test_trace_inner_product_random_pairs():
    rng = np.random.default_rng(10)
    for _ in range(100):
        a, b = random_mixed(S3, rng), random_pure(S3, rng)
        assert trace_inner_product_check(a, b)[2] < 1e-12


def test_covariance_identity_zero_residual():
    from manakit.algebra import CliffordUnitary

    eye = CliffordUnitary.from_matrix(S3, np.eye(3))
    rng = np.random.default_rng(20)
    assert clifford_covariance_check(eye, random_pure(S3, rng)) == 0.0


def test_covariance_fourier_and_random_words():
    rng = np.random.default_rng(11)
    fourier = clifford_generators(S3)[0]
    for _ in range(20):
        rho = random_pure(S3, rng)
        assert clifford_covariance_check(fourier, rho) < 1e-12
        assert clifford_covariance_check(random_clifford(S3, rng), rho) < 1e-12


def test_covariance_sum_gate_on_products():
    sys2 = QuditSystem(3, 2)
    summ = next(g for g in clifford_generators(sys2) if g.name == "SUM01")
    rng = np.random.default_rng(12)
    for _ in range(10):
        rho = tensor(random_pure(S3, rng), random_pure(S3, rng))
        assert clifford_covariance_check(summ, rho) < 1e-12


def test_product_rule():
    rng = np.random.default_rng(13)
    for _ in range(20):
        a, b = random_mixed(S3, rng), random_pure(S3, rng)
        w = wigner_tensor(wigner_of_state(a), wigner_of_state(b))
        assert np.max(np.abs(w.values - wigner_of_state(tensor(a, b)).values)) < 1e-12


def test_marginal_matches_partial_trace():
    rng = np.random.default_rng(14)
    for _ in range(10):
        rho = random_mixed(QuditSystem(3, 2), rng)
        marg = wigner_marginal_last(wigner_of_state(rho))
        direct = wigner_of_state(partial_trace_last(rho))
        assert np.max(np.abs(marg.values - direct.values)) < 1e-12


def test_csv_and_json_serialization():
    w = wigner_of_state(pure_state(S3, [0, 1, -1]))
    buf = io.StringIO()
    w.to_csv(buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0].startswith("#")
    assert lines[1] == "a1_0,a2_0,value"
    assert len(lines) == 2 + 9
    first = lines[2].split(",")
    assert first[:2] == ["0", "0"]
    assert abs(float(first[2]) + 1 / 3) < 1e-15
    obj = w.to_json_obj()
    assert obj["d"] == 3 and len(obj["values"]) == 9
