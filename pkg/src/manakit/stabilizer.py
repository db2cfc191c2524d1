"""Pure stabilizer states, the stabilizer polytope, and membership tests.

Vertices are generated in phase space: each pure stabilizer state is the
uniform Wigner indicator of an affine Lagrangian subspace (a maximal
isotropic subspace of ``Z_d^{2n}`` plus a translation).  This gives exactly
``N = d**n * prod_{i<=n} (d**i + 1)`` vertices.  Membership in the convex
hull is decided by a phase-1 linear program in Wigner coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog, nnls

from .config import MAX_POLYTOPE_VERTICES, TOL
from .states import DensityMatrix, maximally_mixed
from .system import QuditSystem, labels_to_indices
from .wigner import WignerFunction, reconstruct, wigner_of_state


class MembershipSolverError(RuntimeError):
    """The LP solver failed to converge; distinct from a 'not member' answer."""


# HiGHS defaults (1e-7) are too loose for the boundary localization done by
# the p_T bisection; tighten to the solver's floor of 1e-10.
_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


def vertex_count(sys: QuditSystem) -> int:
    count = sys.d ** sys.n
    for i in range(1, sys.n + 1):
        count *= sys.d ** i + 1
    return count


def lagrangian_subspaces(sys: QuditSystem) -> list[np.ndarray]:
    """Bases (n x 2n, reduced row echelon form over Z_d) of all maximal
    isotropic subspaces of the symplectic space Z_d^{2n}."""
    d, n = sys.d, sys.n
    bases = []
    for pivots in itertools.combinations(range(2 * n), n):
        free_cols = [
            [c for c in range(p + 1, 2 * n) if c not in pivots] for p in pivots
        ]
        slots = sum(len(f) for f in free_cols)
        for assignment in itertools.product(range(d), repeat=slots):
            basis = np.zeros((n, 2 * n), dtype=np.int64)
            pos = 0
            for r, p in enumerate(pivots):
                basis[r, p] = 1
                for c in free_cols[r]:
                    basis[r, c] = assignment[pos]
                    pos += 1
            if _is_isotropic(d, basis):
                bases.append(basis)
    return bases


def _is_isotropic(d: int, basis: np.ndarray) -> bool:
    a1, a2 = basis[:, 0::2], basis[:, 1::2]
    form = (a1 @ a2.T - a2 @ a1.T) % d
    return not form.any()


@dataclass(frozen=True)
class StabilizerVertex:
    """A pure stabilizer state with its Wigner indicator and density matrix."""

    sys: QuditSystem
    wigner: WignerFunction
    matrix: DensityMatrix
    subspace_basis: np.ndarray  # (n, 2n) over Z_d
    translation: np.ndarray     # (2n,) over Z_d

    @property
    def support(self) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.wigner.values > 0.5 / self.sys.dim))


def _make_vertex(sys: QuditSystem, basis: np.ndarray, translation: np.ndarray,
                 *, validate: bool) -> StabilizerVertex:
    d, n = sys.d, sys.n
    coeffs = np.array(list(itertools.product(range(d), repeat=n)), dtype=np.int64)
    points = (coeffs @ basis + translation) % d
    support = labels_to_indices(sys, points)
    values = np.zeros(sys.num_points)
    values[support] = 1.0 / sys.dim
    w = WignerFunction(sys, values)
    mat = reconstruct(w)
    if validate:
        herm = np.max(np.abs(mat - mat.conj().T))
        purity = np.real(np.trace(mat @ mat))
        if herm > TOL.equality or abs(purity - 1.0) > 1e-10:
            raise RuntimeError(
                "affine Lagrangian indicator did not reconstruct to a pure state"
            )
    rho = DensityMatrix(sys, mat, validate=False)
    basis = basis.copy()
    translation = translation.copy()
    basis.setflags(write=False)
    translation.setflags(write=False)
    return StabilizerVertex(sys, w, rho, basis, translation)


@dataclass(frozen=True)
class StabilizerPolytope:
    sys: QuditSystem
    vertices: tuple[StabilizerVertex, ...]
    wigner_matrix: np.ndarray = field(repr=False)  # (N, num_points)
    matrix_stack: np.ndarray = field(repr=False)   # (N, dim, dim)

    def __len__(self):
        return len(self.vertices)

    def mix(self, distribution) -> DensityMatrix:
        """Convex combination of vertex states with the given weights."""
        p = np.asarray(distribution, dtype=float)
        return DensityMatrix(
            self.sys, np.tensordot(p, self.matrix_stack, axes=1), validate=False
        )

    def to_json_obj(self) -> dict:
        return {
            "schema_version": 1,
            "d": self.sys.d,
            "n": self.sys.n,
            "vertex_count": len(self.vertices),
            "vertices": [
                {
                    "basis": v.subspace_basis.tolist(),
                    "translation": v.translation.tolist(),
                    "support": sorted(int(i) for i in v.support),
                }
                for v in self.vertices
            ],
        }


@lru_cache(maxsize=8)
def enumerate_vertices(sys: QuditSystem, validate: bool = True) -> StabilizerPolytope:
    """All pure stabilizer states of the system, as polytope vertices."""
    expected = vertex_count(sys)
    if expected > MAX_POLYTOPE_VERTICES:
        raise ValueError(
            f"vertex count {expected} exceeds the enumeration budget "
            f"of {MAX_POLYTOPE_VERTICES}"
        )
    d, n = sys.d, sys.n
    vertices = []
    for basis in lagrangian_subspaces(sys):
        pivots = [int(np.flatnonzero(row)[0]) for row in basis]
        free = [c for c in range(2 * n) if c not in pivots]
        for vals in itertools.product(range(d), repeat=len(free)):
            translation = np.zeros(2 * n, dtype=np.int64)
            translation[free] = vals
            vertices.append(_make_vertex(sys, basis, translation, validate=validate))
    if len(vertices) != expected:
        raise RuntimeError(
            f"enumerated {len(vertices)} vertices, expected {expected}"
        )
    supports = {v.support for v in vertices}
    if len(supports) != expected:
        raise RuntimeError("enumerated vertices are not pairwise distinct")
    wmat = np.stack([v.wigner.values for v in vertices])
    mstack = np.stack([v.matrix.matrix for v in vertices])
    wmat.setflags(write=False)
    mstack.setflags(write=False)
    return StabilizerPolytope(sys, tuple(vertices), wmat, mstack)


def polytope_from_json_obj(obj: dict) -> StabilizerPolytope:
    sys = QuditSystem(int(obj["d"]), int(obj["n"]))
    vertices = [
        _make_vertex(
            sys,
            np.asarray(v["basis"], dtype=np.int64),
            np.asarray(v["translation"], dtype=np.int64),
            validate=True,
        )
        for v in obj["vertices"]
    ]
    wmat = np.stack([v.wigner.values for v in vertices])
    mstack = np.stack([v.matrix.matrix for v in vertices])
    return StabilizerPolytope(sys, tuple(vertices), wmat, mstack)


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolytopeWitness:
    member: bool
    distribution: np.ndarray | None = None
    separating_certificate: np.ndarray | None = None
    distance: float = 0.0  # phase-1 objective: l1 Wigner distance to the hull

    def to_json_obj(self) -> dict:
        obj: dict = {"schema_version": 1, "member": self.member}
        if self.distribution is not None:
            obj["distribution"] = [float(p) for p in self.distribution]
        if self.separating_certificate is not None:
            obj["separating_certificate"] = [
                float(c) for c in self.separating_certificate
            ]
        obj["distance"] = float(self.distance)
        return obj


def _as_wigner(polytope: StabilizerPolytope, state) -> np.ndarray:
    if isinstance(state, WignerFunction):
        if state.sys != polytope.sys:
            raise ValueError("Wigner function lives on a different system")
        return state.values
    if isinstance(state, DensityMatrix):
        if state.sys != polytope.sys:
            raise ValueError("state lives on a different system")
        return wigner_of_state(state).values
    raise TypeError("expected a DensityMatrix or WignerFunction")


def membership(state, polytope: StabilizerPolytope, tol: float = 1e-9) -> PolytopeWitness:
    """Decide whether a state lies in the stabilizer polytope.

    Solves the phase-1 feasibility program
    ``min |s|_1  s.t.  W_vertices^T p + s = W_state, sum p = 1, p >= 0``;
    a member's decomposition is then polished by nonnegative least squares,
    a non-member gets a separating hyperplane assembled from the LP duals.
    """
    w = _as_wigner(polytope, state)
    n_vert = len(polytope)
    n_pts = polytope.sys.num_points
    # Columns: p (n_vert), s+ (n_pts), s- (n_pts).
    a_eq = np.hstack([
        polytope.wigner_matrix.T,
        np.eye(n_pts),
        -np.eye(n_pts),
    ])
    a_eq = np.vstack([a_eq, np.concatenate([np.ones(n_vert), np.zeros(2 * n_pts)])])
    b_eq = np.concatenate([w, [1.0]])
    cost = np.concatenate([np.zeros(n_vert), np.ones(2 * n_pts)])
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs",
                  options=_HIGHS_OPTIONS)
    if res.status != 0:
        raise MembershipSolverError(
            f"LP solver failed with status {res.status}: {res.message}"
        )
    distance = float(res.fun)
    if distance <= tol:
        a_aug = np.vstack([polytope.wigner_matrix.T, np.ones(n_vert)])
        p, _ = nnls(a_aug, b_eq)
        total = p.sum()
        if total <= 0:
            raise MembershipSolverError("NNLS polish returned the zero vector")
        p /= total
        residual = np.max(np.abs(polytope.wigner_matrix.T @ p - w))
        if residual > 1e-8:
            raise MembershipSolverError(
                f"membership decomposition residual {residual:.3e} exceeds 1e-8"
            )
        return PolytopeWitness(True, distribution=p, distance=distance)
    cert = _separating_certificate(polytope, w, res, tol)
    return PolytopeWitness(False, separating_certificate=cert, distance=distance)


def _separating_certificate(polytope, w, res, tol) -> np.ndarray:
    n_pts = polytope.sys.num_points
    for sign in (1.0, -1.0):
        try:
            y = sign * np.asarray(res.eqlin.marginals[:n_pts], dtype=float)
        except (AttributeError, TypeError):
            break
        if _certificate_margin(polytope, w, y) > tol:
            return y
    # Fall back to solving the dual program explicitly:
    # max y.w + z  s.t.  y.W_i + z <= 0, -1 <= y <= 1.
    c = -np.concatenate([w, [1.0]])
    a_ub = np.hstack([polytope.wigner_matrix, np.ones((len(polytope), 1))])
    bounds = [(-1, 1)] * n_pts + [(None, None)]
    dual = linprog(c, A_ub=a_ub, b_ub=np.zeros(len(polytope)), bounds=bounds,
                   method="highs", options=_HIGHS_OPTIONS)
    if dual.status != 0:
        raise MembershipSolverError(
            f"dual certificate solve failed with status {dual.status}"
        )
    y = dual.x[:n_pts]
    if _certificate_margin(polytope, w, y) <= tol:
        raise MembershipSolverError("could not certify non-membership")
    return y


def _certificate_margin(polytope, w, y) -> float:
    return float(y @ w - np.max(polytope.wigner_matrix @ y))


# ---------------------------------------------------------------------------
# Twirl boundary p_T
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PTResult:
    value: float
    lower: float  # largest p certified as a member
    upper: float  # smallest p certified as not a member (1.0 if stabilizer)
    is_stabilizer: bool
    iterations: int
    trace: tuple[tuple[float, bool], ...] = ()


def p_t(state: DensityMatrix, polytope: StabilizerPolytope,
        tol: float = 1e-10, membership_tol: float = 1e-9) -> PTResult:
    """Largest mixing weight p for which ``p rho + (1-p) I/d**n`` stays in the
    stabilizer polytope, located by bisection over the membership oracle."""
    if state.sys != polytope.sys:
        raise ValueError("state lives on a different system")
    w_state = wigner_of_state(state).values
    w_mixed = wigner_of_state(maximally_mixed(state.sys)).values

    def is_member(p: float) -> bool:
        w = WignerFunction(state.sys, p * w_state + (1.0 - p) * w_mixed)
        return membership(w, polytope, tol=membership_tol).member

    trace = []
    if is_member(1.0):
        return PTResult(1.0, 1.0, 1.0, True, 0, ((1.0, True),))
    lo, hi = 0.0, 1.0
    iterations = 0
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        member = is_member(mid)
        trace.append((mid, member))
        if member:
            lo = mid
        else:
            hi = mid
        iterations += 1
    return PTResult(0.5 * (lo + hi), lo, hi, False, iterations, tuple(trace))
