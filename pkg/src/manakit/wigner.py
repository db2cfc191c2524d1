"""Phase-point operators and discrete Wigner functions.

States map to quasi-probability vectors ``W_rho(u) = Tr(A_u rho) / d**n``
over the ``d**(2n)`` phase points; measurement effects use the unnormalized
convention ``W_E(u) = Tr(A_u E)``.  The flat ordering of points is the one
fixed in :mod:`manakit.system`: row-major over ``(a1_1, a2_1, a1_2, ...)``
with ``a1`` the boost (Z) exponent.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import CliffordUnitary, pauli_basis
from .config import TOL
from .states import DensityMatrix
from .system import PhasePoint, QuditSystem

IMAG_RESIDUE_LIMIT = 1e-10


@dataclass(frozen=True)
class PhasePointOperator:
    sys: QuditSystem
    label: PhasePoint
    matrix: np.ndarray


@dataclass(frozen=True)
class WignerBasis:
    """All phase-point operators of a system, stacked in point order."""

    sys: QuditSystem
    stack: np.ndarray  # (num_points, dim, dim)
    _flat: np.ndarray  # stack reshaped to (num_points, dim*dim)

    def traces_with(self, op: np.ndarray) -> np.ndarray:
        """Tr(A_u op) for every point u."""
        return self._flat @ op.T.ravel()


@lru_cache(maxsize=None)
def wigner_basis(sys: QuditSystem) -> WignerBasis:
    t_stack = pauli_basis(sys).stack
    a0 = t_stack.sum(axis=0) / sys.dim
    stack = np.einsum("pab,bc,pdc->pad", t_stack, a0, t_stack.conj(), optimize=True)
    stack.setflags(write=False)
    flat = stack.reshape(sys.num_points, sys.dim * sys.dim)
    flat.setflags(write=False)
    return WignerBasis(sys, stack, flat)


def phase_point_operator(sys: QuditSystem, u) -> PhasePointOperator:
    idx = sys.point_index(u)
    return PhasePointOperator(sys, PhasePoint.of(sys, u), wigner_basis(sys).stack[idx])


@dataclass(frozen=True)
class WignerFunction:
    """Real quasi-probability vector indexed by phase points."""

    sys: QuditSystem
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.sys.num_points,):
            raise ValueError(
                f"expected {self.sys.num_points} entries, got shape {v.shape}"
            )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def total(self) -> float:
        return float(self.values.sum())

    def min_entry(self) -> float:
        return float(self.values.min())

    def to_csv(self, stream: io.TextIOBase, float_format: str = ".17g") -> None:
        n = self.sys.n
        header = ",".join(f"a1_{k},a2_{k}" for k in range(n))
        stream.write(f"# d={self.sys.d} n={n} layout=(a1=Z exponent, a2=X exponent)\n")
        stream.write(f"{header},value\n")
        labels = self.sys.labels()
        for lab, val in zip(labels, self.values):
            coords = ",".join(str(int(c)) for c in lab)
            stream.write(f"{coords},{format(val, float_format)}\n")

    def to_json_obj(self) -> dict:
        return {
            "schema_version": 1,
            "d": self.sys.d,
            "n": self.sys.n,
            "values": [float(v) for v in self.values],
        }


def _real_part(sys: QuditSystem, raw: np.ndarray) -> np.ndarray:
    residue = float(np.max(np.abs(raw.imag)))
    if residue > IMAG_RESIDUE_LIMIT:
        raise ValueError(
            f"Wigner entries have imaginary residue {residue:.3e}; "
            "input is not Hermitian"
        )
    return raw.real


def wigner_coefficients(sys: QuditSystem, op: np.ndarray) -> np.ndarray:
    """Expansion coefficients of an operator over the phase-point basis,
    Tr(A_u op) / d**n; for Hermitian input these are real."""
    raw = wigner_basis(sys).traces_with(np.asarray(op, dtype=complex)) / sys.dim
    return _real_part(sys, raw)


def wigner_of_state(rho: DensityMatrix) -> WignerFunction:
    return WignerFunction(rho.sys, wigner_coefficients(rho.sys, rho.matrix))


def wigner_of_povm_element(sys: QuditSystem, effect) -> WignerFunction:
    """Unnormalized Wigner vector Tr(A_u E) of an effect 0 <= E <= I."""
    e = np.asarray(effect, dtype=complex)
    if e.shape != (sys.dim, sys.dim):
        raise ValueError(f"expected a {sys.dim}x{sys.dim} matrix, got {e.shape}")
    if np.max(np.abs(e - e.conj().T)) > TOL.equality:
        raise ValueError("effect is not Hermitian")
    eigs = np.linalg.eigvalsh(e)
    if eigs[0] < TOL.psd_floor or eigs[-1] > 1 + 1e-10:
        raise ValueError("effect does not satisfy 0 <= E <= I")
    raw = wigner_basis(sys).traces_with(e)
    return WignerFunction(sys, _real_part(sys, raw))


def reconstruct(w: WignerFunction) -> np.ndarray:
    """Operator sum_u W(u) A_u; inverts :func:`wigner_of_state`."""
    basis = wigner_basis(w.sys)
    return np.tensordot(w.values, basis.stack, axes=1)


def trace_inner_product_check(rho: DensityMatrix, sigma: DensityMatrix):
    """Both sides of Tr(rho sigma) = d**n * sum_u W_rho(u) W_sigma(u)."""
    if rho.sys != sigma.sys:
        raise ValueError("states live on different systems")
    lhs = float(np.real(np.trace(rho.matrix @ sigma.matrix)))
    rhs = rho.sys.dim * float(
        np.dot(wigner_of_state(rho).values, wigner_of_state(sigma).values)
    )
    return lhs, rhs, abs(lhs - rhs)


def clifford_covariance_check(gate: CliffordUnitary, rho: DensityMatrix) -> float:
    """Max residual of W_{U rho U^dag} against W_rho pushed through the
    recovered phase-space permutation."""
    if gate.sys != rho.sys:
        raise ValueError("gate and state live on different systems")
    w_in = wigner_of_state(rho).values
    w_out = wigner_of_state(rho.conjugate_by(gate.matrix)).values
    return float(np.max(np.abs(w_out - gate.action.apply_to_wigner(w_in))))


def wigner_tensor(a: WignerFunction, b: WignerFunction) -> WignerFunction:
    """Wigner vector of a product state from the factors' vectors."""
    return WignerFunction(a.sys.combine(b.sys), np.kron(a.values, b.values))


def wigner_marginal_last(w: WignerFunction) -> WignerFunction:
    """Sum over the last qudit's phase-space block; matches the partial trace."""
    sub = w.sys.drop_last()
    d2 = w.sys.d ** 2
    return WignerFunction(sub, w.values.reshape(-1, d2).sum(axis=1))
