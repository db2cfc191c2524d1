"""Density matrices on qudit systems, with validation and basic constructions."""

from __future__ import annotations

import numpy as np

from .config import TOL
from .system import QuditSystem


class DensityMatrix:
    """Validated density operator on an n-qudit Hilbert space.

    Hermiticity and unit trace are checked to ``TOL.equality``; eigenvalues
    must stay above ``TOL.psd_floor``.  The stored array is read-only.
    """

    __slots__ = ("sys", "matrix")

    def __init__(self, sys: QuditSystem, matrix, *, validate: bool = True):
        arr = np.array(matrix, dtype=complex)
        if arr.shape != (sys.dim, sys.dim):
            raise ValueError(
                f"expected a {sys.dim}x{sys.dim} matrix, got shape {arr.shape}"
            )
        if validate:
            herm = np.max(np.abs(arr - arr.conj().T))
            if herm > TOL.equality:
                raise ValueError(f"matrix is not Hermitian (residual {herm:.3e})")
            tr = arr.trace()
            if abs(tr - 1.0) > TOL.equality:
                raise ValueError(f"trace is {tr}, expected 1")
            lo = float(np.linalg.eigvalsh(arr)[0])
            if lo < TOL.psd_floor:
                raise ValueError(f"matrix has negative eigenvalue {lo:.3e}")
        arr.setflags(write=False)
        self.sys = sys
        self.matrix = arr

    def __repr__(self):
        return f"DensityMatrix(d={self.sys.d}, n={self.sys.n})"

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def conjugate_by(self, unitary: np.ndarray) -> "DensityMatrix":
        return DensityMatrix(
            self.sys, unitary @ self.matrix @ unitary.conj().T, validate=False
        )


def pure_state(sys: QuditSystem, vector) -> DensityMatrix:
    """Projector onto a (normalized copy of a) state vector."""
    v = np.asarray(vector, dtype=complex).reshape(-1)
    if v.shape != (sys.dim,):
        raise ValueError(f"expected a vector of length {sys.dim}, got {v.shape}")
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        raise ValueError("cannot normalize the zero vector")
    v = v / norm
    return DensityMatrix(sys, np.outer(v, v.conj()), validate=False)


def basis_state(sys: QuditSystem, index: int) -> DensityMatrix:
    v = np.zeros(sys.dim, dtype=complex)
    v[index] = 1.0
    return pure_state(sys, v)


def maximally_mixed(sys: QuditSystem) -> DensityMatrix:
    return DensityMatrix(
        sys, np.eye(sys.dim, dtype=complex) / sys.dim, validate=False
    )


def mix(states: list[DensityMatrix], weights) -> DensityMatrix:
    """Convex mixture of states on a common system."""
    w = np.asarray(weights, dtype=float)
    if len(states) != len(w):
        raise ValueError("one weight per state required")
    if np.any(w < -TOL.equality) or abs(w.sum() - 1.0) > 1e-10:
        raise ValueError("weights must form a probability vector")
    sys = states[0].sys
    acc = np.zeros((sys.dim, sys.dim), dtype=complex)
    for s, wi in zip(states, w):
        if s.sys != sys:
            raise ValueError("states live on different systems")
        acc += wi * s.matrix
    return DensityMatrix(sys, acc, validate=False)


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(
        a.sys.combine(b.sys), np.kron(a.matrix, b.matrix), validate=False
    )


def partial_trace_last(rho: DensityMatrix) -> DensityMatrix:
    """Trace out the final qudit."""
    sys = rho.sys
    sub = sys.drop_last()
    m = rho.matrix.reshape(sub.dim, sys.d, sub.dim, sys.d)
    return DensityMatrix(sub, np.einsum("ajbj->ab", m), validate=False)


def random_pure(sys: QuditSystem, rng: np.random.Generator) -> DensityMatrix:
    v = rng.normal(size=sys.dim) + 1j * rng.normal(size=sys.dim)
    return pure_state(sys, v)


def random_mixed(
    sys: QuditSystem, rng: np.random.Generator, rank: int | None = None
) -> DensityMatrix:
    """Ginibre-sampled density matrix of the given rank (full rank by default)."""
    r = sys.dim if rank is None else rank
    g = rng.normal(size=(sys.dim, r)) + 1j * rng.normal(size=(sys.dim, r))
    m = g @ g.conj().T
    return DensityMatrix(sys, m / np.real(m.trace()), validate=False)
