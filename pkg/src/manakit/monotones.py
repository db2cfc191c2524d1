"""Magic monotones: Wigner 1-norm, sum negativity, mana, and the relative
entropy of magic.

The relative entropy of magic is minimized over the stabilizer polytope by
conditional-gradient (Frank-Wolfe) iteration over the vertex simplex.  The
linear subproblem picks the vertex with the most negative directional
derivative ``-Tr(rho Dlog_sigma[S_i])``, where the Frechet derivative of the
matrix logarithm is evaluated by eigendecomposition with the
divided-difference kernel.  Away steps and a periodic fully-corrective
polish of the active set accelerate convergence; the returned certificate
is always the plain Frank-Wolfe duality gap, which bounds the distance of
the reported value from the true minimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize

from .config import TOL
from .states import DensityMatrix, tensor
from .stabilizer import StabilizerPolytope, p_t
from .system import QuditSystem
from .wigner import WignerFunction, wigner_of_state


def _as_wigner_values(state) -> np.ndarray:
    if isinstance(state, DensityMatrix):
        return wigner_of_state(state).values
    if isinstance(state, WignerFunction):
        return state.values
    raise TypeError("expected a DensityMatrix or WignerFunction")


def wnorm(state) -> float:
    """Wigner 1-norm sum_u |W(u)|; 1 exactly for positively represented states."""
    return float(np.abs(_as_wigner_values(state)).sum())


def sum_negativity(state) -> float:
    """Magnitude of the total negative Wigner mass, (wnorm - 1) / 2."""
    return (wnorm(state) - 1.0) / 2.0


def mana(state, log_base: str = "e") -> float:
    """log of the Wigner 1-norm; additive under tensor products."""
    value = math.log(wnorm(state))
    if log_base == "2":
        value /= math.log(2.0)
    elif log_base != "e":
        raise ValueError(f"log_base must be 'e' or '2', got {log_base!r}")
    return value


def maxneg(state) -> float:
    """Most negative Wigner entry, sign-flipped; not a monotone (it shrinks
    by d**2 under composition with I/d) and provided as the counterexample."""
    return max(0.0, -float(_as_wigner_values(state).min()))


@dataclass(frozen=True)
class MonotoneReport:
    wnorm: float
    sum_negativity: float
    mana: float
    maxneg: float
    log_base: str = "e"

    def to_json_obj(self) -> dict:
        return {
            "schema_version": 1,
            "wnorm": self.wnorm,
            "sum_negativity": self.sum_negativity,
            "mana": self.mana,
            "maxneg": self.maxneg,
            "log_base": self.log_base,
        }


def report(state, log_base: str = "e") -> MonotoneReport:
    w = wnorm(state)
    return MonotoneReport(
        wnorm=w,
        sum_negativity=(w - 1.0) / 2.0,
        mana=mana(state, log_base),
        maxneg=maxneg(state),
        log_base=log_base,
    )


# ---------------------------------------------------------------------------
# Relative entropy
# ---------------------------------------------------------------------------


def _entropy_term(rho: np.ndarray) -> float:
    """Tr(rho log rho) with zero eigenvalues contributing zero."""
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 1e-15]
    return float(np.sum(lam * np.log(lam)))


def _rel_ent(rho: DensityMatrix, sigma: DensityMatrix,
             support_tol: float, floor: float) -> tuple[float, bool]:
    if rho.sys != sigma.sys:
        raise ValueError("states live on different systems")
    lam, u = np.linalg.eigh(sigma.matrix)
    weights = np.real(np.einsum("ai,ab,bi->i", u.conj(), rho.matrix, u))
    dead = lam < support_tol
    if np.any(dead) and np.max(weights[dead]) > support_tol:
        return math.inf, False
    floored = bool(np.any(lam < floor))
    lam_f = np.clip(lam, floor, None)
    cross = float(weights @ np.log(lam_f))
    return _entropy_term(rho.matrix) - cross, floored


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """S(rho||sigma) in nats; +inf when supp(rho) escapes supp(sigma)."""
    value, _ = _rel_ent(rho, sigma, TOL.support, TOL.log_floor)
    return value


# ---------------------------------------------------------------------------
# Relative entropy of magic via Frank-Wolfe over the vertex simplex
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelEntResult:
    """Outcome of the convex minimization; ``value`` is in nats and is
    certified optimal to within ``duality_gap``."""

    value: float
    argmin_distribution: np.ndarray
    duality_gap: float
    iterations: int
    converged: bool
    floor_activated: bool

    def to_json_obj(self) -> dict:
        return {
            "schema_version": 1,
            "value": self.value,
            "duality_gap": self.duality_gap,
            "iterations": self.iterations,
            "converged": self.converged,
            "floor_activated": self.floor_activated,
            "argmin_distribution": [float(p) for p in self.argmin_distribution],
        }


def _log_kernel(lam: np.ndarray) -> np.ndarray:
    """Divided differences (log a - log b)/(a - b) with 1/a on the diagonal."""
    diff = lam[:, None] - lam[None, :]
    close = np.abs(diff) <= 1e-12 * max(lam.max(), 1e-300)
    safe = np.where(close, 1.0, diff)
    kernel = (np.log(lam)[:, None] - np.log(lam)[None, :]) / safe
    mid = 2.0 / (lam[:, None] + lam[None, :])
    return np.where(close, mid, kernel)


class _Objective:
    """f(p) = S(rho || sum_i p_i S_i) restricted to the vertex simplex."""

    def __init__(self, rho: DensityMatrix, polytope: StabilizerPolytope,
                 floor: float):
        self.rho = rho.matrix
        self.mstack = polytope.matrix_stack
        self.mflat = polytope.matrix_stack.reshape(len(polytope), -1)
        self.floor = floor
        self.entropy = _entropy_term(self.rho)
        self.floored = False

    def sigma(self, p: np.ndarray) -> np.ndarray:
        return np.tensordot(p, self.mstack, axes=1)

    def _eig(self, sigma: np.ndarray):
        lam, u = np.linalg.eigh(sigma)
        if lam[0] < self.floor:
            self.floored = True
        return np.clip(lam, self.floor, None), u

    def value_and_grad(self, p: np.ndarray):
        lam, u = self._eig(self.sigma(p))
        r = u.conj().T @ self.rho @ u
        value = self.entropy - float(np.real(np.diag(r)) @ np.log(lam))
        g_mat = u @ (_log_kernel(lam) * r) @ u.conj().T
        grad = -np.real(self.mflat @ g_mat.T.ravel())
        return value, grad

    def value(self, p: np.ndarray) -> float:
        lam, u = self._eig(self.sigma(p))
        weights = np.real(np.einsum("ai,ab,bi->i", u.conj(), self.rho, u))
        return self.entropy - float(weights @ np.log(lam))

    def dphi(self, sigma: np.ndarray, delta: np.ndarray, gamma: float) -> float:
        """Derivative of gamma -> S(rho || sigma + gamma*delta)."""
        lam, u = self._eig(sigma + gamma * delta)
        r = u.conj().T @ self.rho @ u
        b = u.conj().T @ delta @ u
        return -float(np.real(np.einsum("ij,ji->", r, _log_kernel(lam) * b)))


def _exact_line_search(obj: _Objective, sigma, delta, gamma_max: float) -> float:
    d0 = obj.dphi(sigma, delta, 0.0)
    if d0 >= 0.0:
        return 0.0
    d1 = obj.dphi(sigma, delta, gamma_max)
    if d1 <= 0.0:
        return gamma_max
    return brentq(lambda g: obj.dphi(sigma, delta, g), 0.0, gamma_max,
                  xtol=1e-14, maxiter=200)


def _corrective_polish(obj: _Objective, p: np.ndarray, active: np.ndarray) -> np.ndarray:
    """High-precision solve restricted to the active vertex set."""

    def fun(q):
        full = np.zeros(len(p))
        full[active] = q
        value, grad = obj.value_and_grad(full)
        return value, grad[active]

    res = minimize(
        fun, p[active], jac=True, method="SLSQP",
        bounds=[(0.0, 1.0)] * len(active),
        constraints=[{"type": "eq", "fun": lambda q: q.sum() - 1.0,
                      "jac": lambda q: np.ones_like(q)}],
        options={"ftol": 1e-14, "maxiter": 200},
    )
    if not res.success:
        return p
    q = np.clip(res.x, 0.0, None)
    total = q.sum()
    if total <= 0:
        return p
    candidate = np.zeros(len(p))
    candidate[active] = q / total
    if obj.value(candidate) <= obj.value(p):
        return candidate
    return p


def rel_ent_magic(
    rho: DensityMatrix,
    polytope: StabilizerPolytope,
    gap_tol: float = 1e-8,
    max_iters: int = 50_000,
    initial: np.ndarray | None = None,
    polish_every: int = 25,
) -> RelEntResult:
    """Minimize S(rho || sigma) over the stabilizer polytope.

    Returns once the Frank-Wolfe duality gap drops to ``gap_tol`` (the true
    minimum then lies within ``gap_tol`` below the reported value), or after
    ``max_iters`` iterations with ``converged=False`` and the best gap seen.
    """
    if rho.sys != polytope.sys:
        raise ValueError("state and polytope live on different systems")
    n_vert = len(polytope)
    obj = _Objective(rho, polytope, TOL.log_floor)
    if initial is None:
        p = np.full(n_vert, 1.0 / n_vert)
    else:
        p = np.asarray(initial, dtype=float)
        if p.shape != (n_vert,) or np.any(p < -1e-15) or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("initial point must be a distribution over vertices")
        p = np.clip(p, 0.0, None)
        p /= p.sum()

    value, grad = obj.value_and_grad(p)
    gap = float(grad @ p - grad.min())
    iterations = 0
    while gap > gap_tol and iterations < max_iters:
        iterations += 1
        fw = int(np.argmin(grad))
        active = np.flatnonzero(p > 1e-14)
        away = int(active[np.argmax(grad[active])])
        gap_fw = float(grad @ p - grad[fw])
        gap_aw = float(grad[away] - grad @ p)
        sigma = obj.sigma(p)
        if gap_fw >= gap_aw:
            delta = obj.mstack[fw] - sigma
            gamma = _exact_line_search(obj, sigma, delta, 1.0)
            p = (1.0 - gamma) * p
            p[fw] += gamma
        else:
            p_a = p[away]
            gamma_max = p_a / (1.0 - p_a) if p_a < 1.0 else 0.0
            delta = sigma - obj.mstack[away]
            gamma = _exact_line_search(obj, sigma, delta, gamma_max)
            p = (1.0 + gamma) * p
            p[away] = max(p[away] - gamma, 0.0)
        p = np.clip(p, 0.0, None)
        p[p < 1e-13] = 0.0  # prune stragglers so the active set shrinks
        p /= p.sum()
        if polish_every and iterations % polish_every == 0:
            active = np.union1d(np.flatnonzero(p > 1e-13), [fw])
            if len(active) <= 80:  # SLSQP cost grows cubically with set size
                p = _corrective_polish(obj, p, active)
        value, grad = obj.value_and_grad(p)
        gap = float(grad @ p - grad.min())

    return RelEntResult(
        value=max(value, 0.0),
        argmin_distribution=p,
        duality_gap=gap,
        iterations=iterations,
        converged=gap <= gap_tol,
        floor_activated=obj.floored,
    )


def rel_ent_magic_restarts(
    rho: DensityMatrix,
    polytope: StabilizerPolytope,
    gap_tol: float = 1e-8,
    restarts: int = 5,
    seed: int = 0,
    **kwargs,
) -> tuple[RelEntResult, list[float]]:
    """Best result over the default start plus ``restarts`` Dirichlet draws;
    also returns every restart's converged value for stability checks."""
    rng = np.random.default_rng(seed)
    best = rel_ent_magic(rho, polytope, gap_tol=gap_tol, **kwargs)
    values = [best.value]
    for _ in range(restarts):
        start = rng.dirichlet(np.ones(len(polytope)))
        result = rel_ent_magic(rho, polytope, gap_tol=gap_tol, initial=start,
                               **kwargs)
        values.append(result.value)
        if result.value < best.value:
            best = result
    return best, values


# ---------------------------------------------------------------------------
# Twirl closed form
# ---------------------------------------------------------------------------


def rel_ent_magic_twirl_closed_form(
    state: DensityMatrix,
    epsilon: float,
    polytope: StabilizerPolytope,
    pt_value: float | None = None,
) -> float:
    """Relative entropy of magic of ``(1-eps)|M><M| + eps I/dim`` when |M> is
    a twirl fixed point, evaluated in the common eigenbasis of the mixture
    and the boundary state ``p_T |M><M| + (1-p_T) I/dim``."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if abs(state.purity() - 1.0) > 1e-10:
        raise ValueError("the twirl closed form needs a pure state")
    dim = state.sys.dim
    if pt_value is None:
        pt_result = p_t(state, polytope)
        if pt_result.is_stabilizer:
            return 0.0
        pt_value = pt_result.value
    if 1.0 - epsilon <= pt_value:
        return 0.0
    a = 1.0 - epsilon + epsilon / dim   # mixture weight on |M>
    c = epsilon / dim                   # mixture weight on each complement axis
    b = pt_value + (1.0 - pt_value) / dim
    e = (1.0 - pt_value) / dim
    value = a * math.log(a / b)
    if c > 0.0:
        value += (dim - 1) * c * math.log(c / e)
    return value


# ---------------------------------------------------------------------------
# Subadditivity witness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubadditivityWitness:
    sigma_star: DensityMatrix
    lhs: float   # r(S tensor S) against the joint polytope
    rhs: float   # 2 r(S)
    restart_values: tuple[float, ...]


def subadditivity_witness(
    polytope_two_qutrit: StabilizerPolytope,
    gap_tol: float = 1e-8,
    restarts: int = 5,
    seed: int = 0,
) -> SubadditivityWitness:
    """Entangled stabilizer state certifying r(S tensor S) < 2 r(S)."""
    from .extremal import strange_state  # local import to avoid a cycle

    sys2 = polytope_two_qutrit.sys
    if sys2 != QuditSystem(3, 2):
        raise ValueError("expected the two-qutrit polytope")
    from .states import pure_state

    single = pure_state(QuditSystem(3, 1), strange_state())
    double = tensor(single, single)
    from .stabilizer import enumerate_vertices

    single_result = rel_ent_magic(single, enumerate_vertices(QuditSystem(3, 1)),
                                  gap_tol=gap_tol)
    best, values = rel_ent_magic_restarts(double, polytope_two_qutrit,
                                          gap_tol=gap_tol, restarts=restarts,
                                          seed=seed)
    rhs = 2.0 * single_result.value
    if not best.value < rhs - 1e-4:
        raise RuntimeError(
            f"subadditivity witness failed: {best.value} !< {rhs} - 1e-4; "
            "this indicates an optimizer regression"
        )
    sigma_star = polytope_two_qutrit.mix(best.argmin_distribution)
    return SubadditivityWitness(sigma_star, best.value, rhs, tuple(values))


# ---------------------------------------------------------------------------
# Distillation bound
# ---------------------------------------------------------------------------


def distillation_bound(
    rho_resource: DensityMatrix,
    sigma_target: DensityMatrix,
    m: int = 1,
    zero_mana_tol: float = 1e-12,
) -> float:
    """Average number of resource copies needed per batch of ``m`` targets,
    ``m * mana(target) / mana(resource)``.  Positively represented resources
    give ``inf``: no protocol distills magic from them."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    resource_mana = mana(rho_resource)
    if resource_mana <= zero_mana_tol:
        return math.inf
    return m * mana(sigma_target) / resource_mana


# ---------------------------------------------------------------------------
# Ancilla equalizer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AncillaEqualizerResult:
    ancilla_a: DensityMatrix | None
    ancilla_b: DensityMatrix | None
    negatives_a: np.ndarray
    negatives_b: np.ndarray
    max_mismatch: float


def _negative_entries(state) -> np.ndarray:
    values = _as_wigner_values(state)
    return np.sort(values[values < -TOL.negativity])


def ancilla_equalizer(
    rho_a: DensityMatrix,
    rho_b: DensityMatrix,
    tol: float = 1e-10,
) -> AncillaEqualizerResult:
    """Diagonal stabilizer ancillas that align the negative Wigner multisets
    of two states with equal sum negativity.

    Each state is paired with the ancilla built from the *other* state's
    negative entries; after composition both products carry the multiset
    ``{N_i N_j' / (N d**m)}`` with every element repeated ``d**m`` times.
    """
    neg_a = -_negative_entries(rho_a)
    neg_b = -_negative_entries(rho_b)
    total = float(neg_a.sum())
    if abs(neg_a.sum() - neg_b.sum()) > tol:
        raise ValueError(
            f"sum negativities differ: {neg_a.sum()} vs {neg_b.sum()}"
        )
    if total <= TOL.negativity:
        raise ValueError("both states must have nonzero sum negativity")
    d = rho_a.sys.d
    k_a, k_b = len(neg_a), len(neg_b)
    m = max(_ceil_log(k_a, d), _ceil_log(k_b, d))

    def diagonal_ancilla(weights: np.ndarray) -> DensityMatrix | None:
        if m == 0:
            return None
        sys_m = QuditSystem(d, m)
        diag = np.zeros(sys_m.dim)
        diag[: len(weights)] = weights / total
        return DensityMatrix(sys_m, np.diag(diag.astype(complex)), validate=False)

    ancilla_a = diagonal_ancilla(neg_b)  # built from the partner's negatives
    ancilla_b = diagonal_ancilla(neg_a)
    prod_a = rho_a if ancilla_a is None else tensor(rho_a, ancilla_a)
    prod_b = rho_b if ancilla_b is None else tensor(rho_b, ancilla_b)
    mult_a = _negative_entries(prod_a)
    mult_b = _negative_entries(prod_b)
    if len(mult_a) != len(mult_b):
        raise RuntimeError(
            f"negative multisets have different sizes: {len(mult_a)} vs {len(mult_b)}"
        )
    mismatch = float(np.max(np.abs(mult_a - mult_b))) if len(mult_a) else 0.0
    return AncillaEqualizerResult(ancilla_a, ancilla_b, mult_a, mult_b, mismatch)


def _ceil_log(k: int, d: int) -> int:
    m = 0
    while d ** m < k:
        m += 1
    return m

