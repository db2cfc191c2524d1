"""Independent reference constructions used as test oracles.

Everything here is built from first principles with explicit loops and
matrix powers, deliberately avoiding the library's vectorized code paths.
"""

import numpy as np


def omega(d):
    return np.exp(2j * np.pi / d)


def inv2(d):
    return next(k for k in range(d) if (2 * k) % d == 1)


def ref_x(d):
    m = np.zeros((d, d), dtype=complex)
    for j in range(d):
        m[(j + 1) % d, j] = 1.0
    return m


def ref_z(d):
    return np.diag([omega(d) ** j for j in range(d)])


def ref_t(d, a1, a2):
    """omega^(-a1*a2/2) Z^a1 X^a2 via explicit matrix powers."""
    phase = omega(d) ** (-(a1 * a2 * inv2(d)) % d)
    za = np.linalg.matrix_power(ref_z(d), a1 % d)
    xb = np.linalg.matrix_power(ref_x(d), a2 % d)
    return phase * za @ xb


def ref_t_multi(d, label):
    """Tensor product of single-qudit operators for a flat label of 2n ints."""
    out = np.eye(1, dtype=complex)
    for k in range(0, len(label), 2):
        out = np.kron(out, ref_t(d, label[k], label[k + 1]))
    return out


def ref_labels(d, n):
    labels = [[]]
    for _ in range(2 * n):
        labels = [lab + [c] for lab in labels for c in range(d)]
    return labels


def ref_a_ops(d, n):
    """Phase-point operators A_u = T_u A_0 T_u^dag, in flat label order."""
    labels = ref_labels(d, n)
    a0 = sum(ref_t_multi(d, lab) for lab in labels) / d ** n
    return [ref_t_multi(d, lab) @ a0 @ ref_t_multi(d, lab).conj().T
            for lab in labels]


def ref_wigner(d, n, rho):
    """W(u) = Tr(A_u rho) / d^n by explicit trace loops."""
    return np.array([np.trace(a @ rho).real / d ** n for a in ref_a_ops(d, n)])


def ref_symplectic(d, n, u, v):
    total = 0
    for k in range(n):
        total += u[2 * k] * v[2 * k + 1] - u[2 * k + 1] * v[2 * k]
    return total % d
