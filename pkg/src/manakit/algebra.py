"""Heisenberg-Weyl (generalized Pauli) operators and Clifford unitaries.

The single-qudit operator labeled ``(a1, a2)`` is
``omega**(-a1*a2/2) * Z**a1 @ X**a2`` with ``omega = exp(2*pi*i/d)``; the
fractional exponent is evaluated in ``Z_d`` through the inverse of 2, which
exists because ``d`` is odd.  Multi-qudit operators are slot-wise tensor
products.  Clifford unitaries permute these operators up to phase; their
phase-space action is affine, ``u -> S u + t``, with ``S`` symplectic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import TOL
from .states import DensityMatrix
from .system import PhasePoint, QuditSystem, labels_to_indices


def omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


def half_inverse(d: int) -> int:
    """Multiplicative inverse of 2 in Z_d, for odd d."""
    if d % 2 == 0:
        raise ValueError("2 is not invertible modulo an even number")
    return (d + 1) // 2


def shift_matrix(d: int) -> np.ndarray:
    """X |j> = |j+1 mod d>."""
    m = np.zeros((d, d), dtype=complex)
    for j in range(d):
        m[(j + 1) % d, j] = 1.0
    return m


def boost_matrix(d: int) -> np.ndarray:
    """Z |j> = omega**j |j>."""
    return np.diag(omega(d) ** np.arange(d))


def pauli_matrix_1q(d: int, a1: int, a2: int) -> np.ndarray:
    """Single-qudit Heisenberg-Weyl operator for the label ``(a1, a2)``.

    ``d = 2`` uses the ``i**(a1*a2)`` prefactor and is provided for
    completeness only; phase-space machinery elsewhere requires odd ``d``.
    """
    a1 %= d
    a2 %= d
    if d == 2:
        phase = 1j ** (a1 * a2)
    else:
        phase = omega(d) ** (-(a1 * a2 * half_inverse(d)) % d)
    m = np.zeros((d, d), dtype=complex)
    w = omega(d)
    for j in range(d):
        m[(j + a2) % d, j] = phase * w ** (a1 * ((j + a2) % d))
    return m


@dataclass(frozen=True)
class PauliOperator:
    sys: QuditSystem
    label: PhasePoint
    matrix: np.ndarray


@dataclass(frozen=True)
class PauliBasis:
    """All d**(2n) Heisenberg-Weyl operators of a system, in label order."""

    sys: QuditSystem
    stack: np.ndarray       # (num_points, dim, dim)
    flat_conj: np.ndarray   # (num_points, dim*dim), rows are conj(T_u) flattened

    def decompose(self, op: np.ndarray) -> np.ndarray:
        """Coefficients c_u = Tr(T_u^dag op) / dim."""
        return self.flat_conj @ op.ravel() / self.sys.dim


@lru_cache(maxsize=None)
def pauli_basis(sys: QuditSystem) -> PauliBasis:
    d = sys.d
    single = np.empty((d * d, d, d), dtype=complex)
    for a1 in range(d):
        for a2 in range(d):
            single[a1 * d + a2] = pauli_matrix_1q(d, a1, a2)
    stack = single
    for _ in range(sys.n - 1):
        p, m = stack.shape[0], stack.shape[1]
        stack = np.einsum("aij,bkl->abikjl", stack, single).reshape(
            p * d * d, m * d, m * d
        )
    stack.setflags(write=False)
    flat = stack.conj().reshape(sys.num_points, sys.dim * sys.dim)
    flat.setflags(write=False)
    return PauliBasis(sys, stack, flat)


def pauli(sys: QuditSystem, u) -> PauliOperator:
    """The Heisenberg-Weyl operator labeled by phase point ``u``."""
    idx = sys.point_index(u)
    return PauliOperator(sys, PhasePoint.of(sys, u), pauli_basis(sys).stack[idx])


def make_boost_shift(sys: QuditSystem, which: str, qudit_index: int = 0) -> PauliOperator:
    """Single-qudit X or Z embedded at the given tensor slot."""
    if which not in ("X", "Z"):
        raise ValueError(f"which must be 'X' or 'Z', got {which!r}")
    if not 0 <= qudit_index < sys.n:
        raise IndexError(f"qudit index {qudit_index} out of range for n={sys.n}")
    pairs = [(0, 0)] * sys.n
    pairs[qudit_index] = (1, 0) if which == "Z" else (0, 1)
    return pauli(sys, pairs)


# ---------------------------------------------------------------------------
# Clifford unitaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseSpaceAction:
    """Affine symplectic action ``u -> S u + t`` of a Clifford unitary.

    ``perm[i]`` is the flat index of the image of point ``i``; phase-point
    operators transform as ``U A_u U^dag = A_{S u + t}``.
    """

    sys: QuditSystem
    linear: np.ndarray       # (2n, 2n) over Z_d, columns are images of basis labels
    translation: np.ndarray  # (2n,) over Z_d
    perm: np.ndarray         # (num_points,)
    inverse_perm: np.ndarray

    @classmethod
    def build(cls, sys: QuditSystem, linear, translation) -> "PhaseSpaceAction":
        linear = np.asarray(linear, dtype=np.int64) % sys.d
        translation = np.asarray(translation, dtype=np.int64) % sys.d
        images = (sys.labels() @ linear.T + translation) % sys.d
        perm = labels_to_indices(sys, images)
        if len(np.unique(perm)) != sys.num_points:
            raise ValueError("phase-space action is not a bijection")
        inv = np.empty_like(perm)
        inv[perm] = np.arange(sys.num_points)
        for a in (linear, translation, perm, inv):
            a.setflags(write=False)
        return cls(sys, linear, translation, perm, inv)

    def apply_to_wigner(self, values: np.ndarray) -> np.ndarray:
        """Push a Wigner vector forward: out[perm[i]] = in[i]."""
        return np.asarray(values)[self.inverse_perm]

    def compose(self, other: "PhaseSpaceAction") -> "PhaseSpaceAction":
        """Action of ``U_self @ U_other``."""
        lin = (self.linear @ other.linear) % self.sys.d
        t = (self.linear @ other.translation + self.translation) % self.sys.d
        return PhaseSpaceAction.build(self.sys, lin, t)


class NotCliffordError(ValueError):
    pass


def _match_single_pauli(coeffs: np.ndarray, tol: float) -> int | None:
    """Index of the unique unit-modulus coefficient, or None."""
    mags = np.abs(coeffs)
    j = int(np.argmax(mags))
    if abs(mags[j] - 1.0) > tol:
        return None
    mags[j] = 0.0
    if np.max(mags) > tol:
        return None
    return j


def is_clifford(sys: QuditSystem, unitary, *, tol: float | None = None):
    """Test whether a unitary maps every Heisenberg-Weyl operator to another
    one up to phase; on success also recover the phase-space action.

    Returns ``(True, PhaseSpaceAction)`` or ``(False, None)``.  Raises
    ``ValueError`` for non-unitary input.
    """
    tol = TOL.structural if tol is None else tol
    u = np.asarray(unitary, dtype=complex)
    if u.shape != (sys.dim, sys.dim):
        raise ValueError(f"expected a {sys.dim}x{sys.dim} matrix, got {u.shape}")
    if np.max(np.abs(u @ u.conj().T - np.eye(sys.dim))) > 1e-10:
        raise ValueError("input is not unitary")

    basis = pauli_basis(sys)
    d, n = sys.d, sys.n
    uh = u.conj().T

    # Images of the elementary labels give the columns of S.  Conjugation is
    # multiplicative, so matching the 2n generators (plus the phase check on
    # A_0 below) certifies every other point.
    linear = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for k in range(n):
        for comp, col in ((0, 2 * k), (1, 2 * k + 1)):  # Z then X at slot k
            label = [0] * (2 * n)
            label[2 * k + comp] = 1
            idx = sys.point_index(label)
            conj = u @ basis.stack[idx] @ uh
            j = _match_single_pauli(basis.decompose(conj), tol)
            if j is None:
                return False, None
            linear[:, col] = sys.labels()[j]

    # Translation part, read from the phases of U A_0 U^dag in the T basis:
    # A_t has coefficients omega**([t, v]) / d**n over labels v.
    a0 = basis.stack.sum(axis=0) / sys.dim
    c0 = basis.decompose(u @ a0 @ uh) * sys.dim
    angles = np.angle(c0) * d / (2 * np.pi)
    t = np.zeros(2 * n, dtype=np.int64)
    for k in range(n):
        z_idx = sys.point_index([0] * (2 * k) + [1, 0] + [0] * (2 * (n - k - 1)))
        x_idx = sys.point_index([0] * (2 * k) + [0, 1] + [0] * (2 * (n - k - 1)))
        t[2 * k] = int(np.rint(angles[x_idx])) % d       # [t, X_k-label] = +t_a1
        t[2 * k + 1] = int(np.rint(-angles[z_idx])) % d  # [t, Z_k-label] = -t_a2
    labels = sys.labels()
    sp = (labels[:, 1::2] @ t[0::2] - labels[:, 0::2] @ t[1::2]) % d
    predicted = omega(d) ** sp
    if np.max(np.abs(c0 - predicted)) > tol:
        return False, None

    try:
        action = PhaseSpaceAction.build(sys, linear, t)
    except ValueError:
        return False, None

    # Exhaustive label check for small systems; generators already certify
    # the rest mathematically.
    if sys.num_points <= 100:
        images = labels_to_indices(sys, labels @ action.linear.T)
        for i in range(sys.num_points):
            conj = u @ basis.stack[i] @ uh
            j = _match_single_pauli(basis.decompose(conj), tol)
            if j is None or j != images[i]:
                return False, None
    return True, action


@dataclass(frozen=True)
class CliffordUnitary:
    sys: QuditSystem
    matrix: np.ndarray
    action: PhaseSpaceAction
    name: str | None = None

    @classmethod
    def from_matrix(cls, sys: QuditSystem, matrix, name: str | None = None):
        m = np.array(matrix, dtype=complex)
        ok, action = is_clifford(sys, m)
        if not ok:
            raise NotCliffordError(
                "unitary does not normalize the Heisenberg-Weyl group"
            )
        m.setflags(write=False)
        return cls(sys, m, action, name)

    def __matmul__(self, other: "CliffordUnitary") -> "CliffordUnitary":
        if other.sys != self.sys:
            raise ValueError("systems differ")
        name = None
        if self.name and other.name:
            name = f"{self.name}*{other.name}"
        m = self.matrix @ other.matrix
        m.setflags(write=False)
        return CliffordUnitary(self.sys, m, self.action.compose(other.action), name)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def fourier_matrix(d: int) -> np.ndarray:
    j = np.arange(d)
    return omega(d) ** np.outer(j, j) / np.sqrt(d)


def phase_gate_matrix(d: int) -> np.ndarray:
    """diag(omega**(j(j+1)/2)); maps X to ZX up to phase."""
    j = np.arange(d)
    return np.diag(omega(d) ** ((j * (j + 1) * half_inverse(d)) % d))


def quadratic_phase_matrix(d: int) -> np.ndarray:
    """diag(omega**(j^2/2)); like the phase gate but with a linear (t = 0) action."""
    j = np.arange(d)
    return np.diag(omega(d) ** ((j * j * half_inverse(d)) % d))


def embed_single(sys: QuditSystem, gate_1q: np.ndarray, slot: int) -> np.ndarray:
    if not 0 <= slot < sys.n:
        raise IndexError(f"slot {slot} out of range for n={sys.n}")
    m = np.eye(1, dtype=complex)
    for k in range(sys.n):
        m = np.kron(m, gate_1q if k == slot else np.eye(sys.d))
    return m


def sum_gate_matrix(sys: QuditSystem, control: int, target: int) -> np.ndarray:
    """|..., j, ..., k, ...> -> |..., j, ..., j + k mod d, ...>."""
    if control == target:
        raise ValueError("control and target must differ")
    d, n = sys.d, sys.n
    m = np.zeros((sys.dim, sys.dim), dtype=complex)
    for src in range(sys.dim):
        digits = list(np.unravel_index(src, (d,) * n))
        digits[target] = (digits[target] + digits[control]) % d
        dst = int(np.ravel_multi_index(digits, (d,) * n))
        m[dst, src] = 1.0
    return m


@lru_cache(maxsize=None)
def clifford_generators(sys: QuditSystem) -> tuple[CliffordUnitary, ...]:
    """A verified generating set: per-qudit Fourier, phase, X and Z gates,
    and the SUM gate for every ordered qudit pair."""
    gens = []
    for k in range(sys.n):
        gens.append(CliffordUnitary.from_matrix(
            sys, embed_single(sys, fourier_matrix(sys.d), k), name=f"F{k}"))
        gens.append(CliffordUnitary.from_matrix(
            sys, embed_single(sys, phase_gate_matrix(sys.d), k), name=f"P{k}"))
        gens.append(CliffordUnitary.from_matrix(
            sys, embed_single(sys, boost_matrix(sys.d), k), name=f"Z{k}"))
        gens.append(CliffordUnitary.from_matrix(
            sys, embed_single(sys, shift_matrix(sys.d), k), name=f"X{k}"))
    for c in range(sys.n):
        for t in range(sys.n):
            if c != t:
                gens.append(CliffordUnitary.from_matrix(
                    sys, sum_gate_matrix(sys, c, t), name=f"SUM{c}{t}"))
    return tuple(gens)


def random_clifford(
    sys: QuditSystem, rng: np.random.Generator, word_length: int = 8
) -> CliffordUnitary:
    """Product of up to ``word_length`` uniformly drawn generators, re-verified."""
    gens = clifford_generators(sys)
    length = int(rng.integers(1, word_length + 1))
    word = rng.integers(0, len(gens), size=length)
    m = np.eye(sys.dim, dtype=complex)
    for g in word:
        m = gens[g].matrix @ m
    return CliffordUnitary.from_matrix(sys, m, name="word")


# ---------------------------------------------------------------------------
# Qutrit symplectic twirl
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def symplectic_group_qutrit() -> tuple[CliffordUnitary, ...]:
    """The 24 qutrit Cliffords with strictly linear phase-space action.

    Generated by closing {Fourier, quadratic phase} under multiplication,
    deduplicating by linear action; each element is re-verified and must fix
    the origin (zero translation).
    """
    sys = QuditSystem(3, 1)
    gens = [fourier_matrix(3), quadratic_phase_matrix(3)]
    elements: dict[bytes, CliffordUnitary] = {}
    frontier = [np.eye(3, dtype=complex)]
    while frontier:
        nxt = []
        for m in frontier:
            ok, action = is_clifford(sys, m)
            if not ok:
                raise RuntimeError("symplectic generator product is not Clifford")
            if np.any(action.translation != 0):
                raise RuntimeError("symplectic element acquired a translation part")
            key = action.linear.tobytes()
            if key in elements:
                continue
            elements[key] = CliffordUnitary(sys, m, action)
            nxt.extend(g @ m for g in gens)
        frontier = nxt
    if len(elements) != 24:
        raise RuntimeError(f"expected 24 symplectic elements, found {len(elements)}")
    return tuple(elements.values())


def symplectic_twirl_qutrit(rho: DensityMatrix) -> DensityMatrix:
    """Average of rho over the 24 linear-action qutrit Cliffords."""
    if rho.sys != QuditSystem(3, 1):
        raise ValueError("the symplectic twirl is defined for a single qutrit")
    group = symplectic_group_qutrit()
    acc = np.zeros((3, 3), dtype=complex)
    for g in group:
        acc += g.matrix @ rho.matrix @ g.matrix.conj().T
    return DensityMatrix(rho.sys, acc / len(group), validate=False)
