import numpy as np
import pytest

from manakit.algebra import (
    CliffordUnitary,
    NotCliffordError,
    clifford_generators,
    fourier_matrix,
    half_inverse,
    is_clifford,
    make_boost_shift,
    omega,
    pauli,
    pauli_basis,
    pauli_matrix_1q,
    random_clifford,
    symplectic_group_qutrit,
    symplectic_twirl_qutrit,
)
from manakit.states import basis_state, maximally_mixed, pure_state, random_mixed
from manakit.system import QuditSystem, symplectic_product

from reference import inv2, ref_t, ref_t_multi, ref_x, ref_z

S3 = QuditSystem(3, 1)


def test_half_inverse():
    for d in (3, 5, 7, 11):
        assert (2 * half_inverse(d)) % d == 1


def test_boost_is_omega_diagonal():
    z = make_boost_shift(S3, "Z").matrix
    w = omega(3)
    assert np.allclose(z, np.diag([1, w, w ** 2]), atol=1e-15)


def test_shift_wraps_cyclically():
    x = make_boost_shift(S3, "X").matrix
    ket2 = np.array([0, 0, 1.0])
    assert np.allclose(x @ ket2, [1, 0, 0])


def test_shift_has_order_d():
    x5 = make_boost_shift(QuditSystem(5, 1), "X").matrix
    assert np.allclose(np.linalg.matrix_power(x5, 5), np.eye(5), atol=1e-12)


def test_boost_shift_embedding_and_range():
    sys = QuditSystem(3, 2)
    z1 = make_boost_shift(sys, "Z", 1).matrix
    assert np.allclose(z1, np.kron(np.eye(3), ref_z(3)), atol=1e-13)
    with pytest.raises(IndexError):
        make_boost_shift(sys, "Z", 2)


def test_pauli_identity_at_origin():
    assert np.allclose(pauli(S3, (0, 0)).matrix, np.eye(3))


def test_pauli_z_label():
    assert np.allclose(pauli(S3, (1, 0)).matrix, ref_z(3), atol=1e-15)


def test_pauli_11_matches_direct_product():
    # omega^(-1/2) Z X with the exponent taken mod 3
    expected = omega(3) ** (-inv2(3) % 3) * ref_z(3) @ ref_x(3)
    assert np.allclose(pauli(S3, (1, 1)).matrix, expected, atol=1e-14)


@pytest.mark.parametrize("d,n", [(3, 1), (5, 1), (3, 2)])
def test_pauli_stack_matches_reference(d, n):
    sys = QuditSystem(d, n)
    stack = pauli_basis(sys).stack
    for idx in range(sys.num_points):
        label = [c for pair in sys.point_pairs(idx) for c in pair]
        assert np.max(np.abs(stack[idx] - ref_t_multi(d, label))) < 1e-12


def test_pauli_d2_convention():
    # i^(a1 a2) Z X = [[0, i], [-i, 0]]
    t11 = pauli_matrix_1q(2, 1, 1)
    assert np.allclose(t11, np.array([[0, 1j], [-1j, 0]]), atol=1e-15)
    assert np.allclose(pauli_matrix_1q(2, 1, 0), np.diag([1, -1]), atol=1e-15)


@pytest.mark.parametrize("d,n", [(3, 1), (5, 1), (3, 2)])
def test_pauli_unitarity_and_order(d, n):
    sys = QuditSystem(d, n)
    stack = pauli_basis(sys).stack
    eye = np.eye(sys.dim)
    for t in stack:
        assert np.max(np.abs(t @ t.conj().T - eye)) < 1e-12
        power = np.linalg.matrix_power(t, d)
        # T^d is proportional to the identity
        assert np.max(np.abs(power - power[0, 0] * eye)) < 1e-11
        assert abs(abs(power[0, 0]) - 1.0) < 1e-11


@pytest.mark.parametrize("d,n", [(3, 1), (5, 1), (3, 2), (5, 2)])
def test_pauli_commutation_all_pairs(d, n):
    sys = QuditSystem(d, n)
    stack = pauli_basis(sys).stack
    labels = sys.labels()
    w = omega(d)
    phases = (labels[:, 0::2] @ labels[:, 1::2].T
              - labels[:, 1::2] @ labels[:, 0::2].T) % d
    for i in range(sys.num_points):
        lhs = stack[i] @ stack            # T_i T_v for all v
        rhs = stack @ stack[i]            # T_v T_i for all v
        factors = w ** phases[i]
        err = np.abs(lhs - factors[:, None, None] * rhs).max()
        assert err < 1e-11, (d, n, i, err)


def test_symplectic_product_drives_commutation():
    sys = QuditSystem(3, 2)
    rng = np.random.default_rng(2)
    stack = pauli_basis(sys).stack
    for _ in range(20):
        i, j = rng.integers(0, sys.num_points, size=2)
        phase = omega(3) ** symplectic_product(sys, sys.labels()[i], sys.labels()[j])
        assert np.allclose(stack[i] @ stack[j], phase * stack[j] @ stack[i],
                           atol=1e-12)


# ---------------------------------------------------------------------------
# Cliffords
# ---------------------------------------------------------------------------


def test_fourier_action_is_quarter_rotation():
    ok, action = is_clifford(S3, fourier_matrix(3))
    assert ok
    # (a1, a2) -> (a2, -a1): X label (0,1) maps to Z label (1,0)
    assert np.array_equal(action.linear, np.array([[0, 1], [2, 0]]))
    assert np.array_equal(action.translation, [0, 0])


def test_fourier_maps_x_to_z_up_to_phase():
    f = fourier_matrix(3)
    conj = f @ ref_t(3, 0, 1) @ f.conj().T
    matches = []
    for a1 in range(3):
        for a2 in range(3):
            t = ref_t(3, a1, a2)
            overlap = np.trace(t.conj().T @ conj) / 3
            if abs(abs(overlap) - 1) < 1e-10:
                matches.append((a1, a2))
    assert matches == [(1, 0)]


def test_identity_is_clifford():
    ok, action = is_clifford(S3, np.eye(3))
    assert ok
    assert np.array_equal(action.perm, np.arange(9))


def test_phase_perturbation_rejected():
    ok, action = is_clifford(S3, np.diag([1, 1, np.exp(1j * np.pi / 7)]))
    assert not ok and action is None


def test_non_unitary_raises():
    with pytest.raises(ValueError, match="unitary"):
        is_clifford(S3, np.ones((3, 3)))


def test_haar_random_rejected_100_seeds():
    rng = np.random.default_rng(0)
    for _ in range(100):
        g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        q, r = np.linalg.qr(g)
        q = q @ np.diag(np.diag(r) / np.abs(np.diag(r)))
        ok, _ = is_clifford(S3, q)
        assert not ok


@pytest.mark.parametrize("d,n", [(3, 1), (3, 2), (5, 1), (3, 3)])
def test_generators_verified_and_words_pass(d, n):
    sys = QuditSystem(d, n)
    gens = clifford_generators(sys)
    for g in gens:
        ok, action = is_clifford(sys, g.matrix)
        assert ok
        assert np.array_equal(np.sort(action.perm), np.arange(sys.num_points))
    rng = np.random.default_rng(1)
    for _ in range(5):
        length = int(rng.integers(1, 6))
        word = np.eye(sys.dim, dtype=complex)
        for _ in range(length):
            word = gens[rng.integers(0, len(gens))].matrix @ word
        ok, action = is_clifford(sys, word)
        assert ok
        assert len(np.unique(action.perm)) == sys.num_points


def test_clifford_composition_matches_reverification():
    rng = np.random.default_rng(9)
    a = random_clifford(S3, rng)
    b = random_clifford(S3, rng)
    composed = a @ b
    _, action = is_clifford(S3, composed.matrix)
    assert np.array_equal(composed.action.perm, action.perm)


def test_from_matrix_rejects_non_clifford():
    with pytest.raises(NotCliffordError):
        CliffordUnitary.from_matrix(S3, np.diag([1, 1, np.exp(0.3j)]))


# ---------------------------------------------------------------------------
# Symplectic twirl
# ---------------------------------------------------------------------------


def test_symplectic_group_size_and_linearity():
    group = symplectic_group_qutrit()
    assert len(group) == 24
    for g in group:
        assert np.array_equal(g.action.translation, [0, 0])
        det = round(np.linalg.det(g.action.linear))
        assert det % 3 == 1


def test_twirl_fixes_maximally_mixed():
    out = symplectic_twirl_qutrit(maximally_mixed(S3))
    assert np.max(np.abs(out.matrix - np.eye(3) / 3)) < 1e-12


def test_twirl_fixes_strange_state():
    s = pure_state(S3, [0, 1, -1])
    out = symplectic_twirl_qutrit(s)
    assert np.max(np.abs(out.matrix - s.matrix)) < 1e-12


def test_twirl_output_form_and_idempotence():
    s = pure_state(S3, [0, 1, -1])
    rng = np.random.default_rng(11)
    for rho in [basis_state(S3, 0)] + [random_mixed(S3, rng) for _ in range(5)]:
        out = symplectic_twirl_qutrit(rho)
        # epsilon follows from the preserved overlap with the fixed point
        fid = float(np.real(np.trace(rho.matrix @ s.matrix)))
        eps = 3.0 * (1.0 - fid) / 2.0
        predicted = (1 - eps) * s.matrix + eps * np.eye(3) / 3
        assert np.max(np.abs(out.matrix - predicted)) < 1e-12
        again = symplectic_twirl_qutrit(out)
        assert np.max(np.abs(again.matrix - out.matrix)) < 1e-12
