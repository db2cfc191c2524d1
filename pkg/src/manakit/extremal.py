"""Extremal qutrit analysis: maximal-sum-negativity search, the mana plane,
and the asymptotic-continuity counterexample.

Maximally negative states are eigenvectors of subset sums of phase-point
operators, so an exhaustive sweep over the 2**9 subsets of qutrit phase
space finds them all.  Two classes emerge: states with a single -1/3 entry
(Strange class) and states with two -1/6 entries (Norrell class), both with
sum negativity 1/3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .config import TOL
from .states import DensityMatrix, pure_state
from .system import QuditSystem
from .stabilizer import StabilizerPolytope, membership
from .wigner import WignerFunction, wigner_basis, wigner_coefficients

QUTRIT = QuditSystem(3, 1)


def strange_state() -> np.ndarray:
    """(0, 1, -1)/sqrt(2); one Wigner entry of -1/3."""
    return np.array([0.0, 1.0, -1.0]) / math.sqrt(2.0)


def norrell_state() -> np.ndarray:
    """(-1, 2, -1)/sqrt(6); two Wigner entries of -1/6."""
    return np.array([-1.0, 2.0, -1.0]) / math.sqrt(6.0)


def strange_density() -> DensityMatrix:
    return pure_state(QUTRIT, strange_state())


def norrell_density() -> DensityMatrix:
    return pure_state(QUTRIT, norrell_state())


@dataclass(frozen=True)
class ExtremalSearchResult:
    max_sum_negativity: float
    states: tuple[tuple[np.ndarray, frozenset[int]], ...]
    class_counts: dict[int, int]

    def to_json_obj(self) -> dict:
        return {
            "schema_version": 1,
            "max_sum_negativity": self.max_sum_negativity,
            "class_counts": {str(k): v for k, v in sorted(self.class_counts.items())},
            "states": [
                {
                    "vector": [[float(c.real), float(c.imag)] for c in vec],
                    "negative_support": sorted(int(i) for i in support),
                }
                for vec, support in self.states
            ],
        }


def _vector_negativity(a_stack: np.ndarray, vec: np.ndarray) -> tuple[float, np.ndarray]:
    w = np.real(np.einsum("pab,b,a->p", a_stack, vec, vec.conj())) / 3.0
    return float(-w[w < 0].sum()), w


def _eigenvector_candidates(
    h: np.ndarray, rng: np.random.Generator, degeneracy_samples: int
) -> list[np.ndarray]:
    lam, vecs = np.linalg.eigh(h)
    candidates = [vecs[:, i] for i in range(len(lam))]
    # Degenerate eigenspaces hold continuous families; sample random bases so
    # extremal vectors hiding inside them are not missed.
    i = 0
    while i < len(lam):
        j = i
        while j + 1 < len(lam) and abs(lam[j + 1] - lam[i]) < 1e-8:
            j += 1
        if j > i:
            block = vecs[:, i : j + 1]
            k = j - i + 1
            for _ in range(degeneracy_samples):
                g = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
                q, _ = np.linalg.qr(g)
                candidates.extend((block @ q).T)
        i = j + 1
    return candidates


def exhaustive_qutrit_search(
    degeneracy_samples: int = 20,
    dedup_tol: float = 1e-9,
    seed: int = 7,
    a_stack: np.ndarray | None = None,
) -> ExtremalSearchResult:
    """Sweep all 2**9 phase-point subsets, eigendecompose each subset sum of
    phase-point operators, and collect the unit vectors of maximal sum
    negativity (deduplicated up to global phase).

    ``a_stack`` overrides the phase-point operators, which lets relabeling
    invariance be tested directly.
    """
    if a_stack is None:
        a_stack = wigner_basis(QUTRIT).stack
    rng = np.random.default_rng(seed)
    best = 0.0
    kept: list[tuple[np.ndarray, float]] = []
    for size in range(1, 10):
        for subset in combinations(range(9), size):
            h = a_stack[list(subset)].sum(axis=0)
            for vec in _eigenvector_candidates(h, rng, degeneracy_samples):
                sn, _ = _vector_negativity(a_stack, vec)
                if sn > best + 1e-10:
                    best = sn
                    kept = [(vec, sn)]
                elif sn >= best - 1e-10:
                    kept.append((vec, sn))
    # Deduplicate up to global phase.
    unique: list[np.ndarray] = []
    for vec, _ in kept:
        if all(abs(np.vdot(u, vec)) < 1.0 - dedup_tol for u in unique):
            unique.append(vec)
    states = []
    class_counts: dict[int, int] = {}
    for vec in unique:
        sn, w = _vector_negativity(a_stack, vec)
        support = frozenset(int(i) for i in np.flatnonzero(w < -1e-9))
        states.append((vec, support))
        class_counts[len(support)] = class_counts.get(len(support), 0) + 1
    return ExtremalSearchResult(best, tuple(states), class_counts)


# ---------------------------------------------------------------------------
# Mana plane
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ManaPlaneRow:
    x: float
    y: float
    physical: bool
    mana: float | None
    in_polytope: bool | None
    in_wigner_simplex: bool | None


def mana_plane_row(x: float, y: float, polytope: StabilizerPolytope) -> ManaPlaneRow:
    """One sample of the plane ``(1-x-y) I/3 + x S + y N``."""
    mat = ((1.0 - x - y) * np.eye(3) / 3.0
           + x * strange_density().matrix + y * norrell_density().matrix)
    if np.linalg.eigvalsh(mat)[0] < -1e-10:
        return ManaPlaneRow(float(x), float(y), False, None, None, None)
    w = wigner_coefficients(QUTRIT, mat)
    in_wigner = bool(w.min() >= -1e-12)
    in_poly = bool(membership(WignerFunction(QUTRIT, w), polytope).member)
    return ManaPlaneRow(float(x), float(y), True,
                        float(np.log(np.abs(w).sum())), in_poly, in_wigner)


def mana_plane_grid(
    resolution: int,
    polytope: StabilizerPolytope,
    x_range: tuple[float, float] = (-0.6, 1.1),
    y_range: tuple[float, float] = (-0.6, 1.1),
    threads: int = 1,
) -> list[ManaPlaneRow]:
    """Sample the plane ``(1-x-y) I/3 + x S + y N`` on a resolution^2 grid.

    Non-physical points (an eigenvalue below -1e-10) are emitted with null
    mana rather than clipped, so consumers see the physical boundary.
    Rows come back in deterministic (x-major) order regardless of ``threads``.
    """
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    if polytope.sys != QUTRIT:
        raise ValueError("expected the single-qutrit polytope")
    points = [(float(x), float(y))
              for x in np.linspace(*x_range, resolution)
              for y in np.linspace(*y_range, resolution)]
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda xy: mana_plane_row(*xy, polytope), points))
    return [mana_plane_row(x, y, polytope) for x, y in points]


def mana_plane_csv(rows: list[ManaPlaneRow], resolution: int, stream) -> None:
    stream.write(
        f"# mana plane grid: resolution={resolution} "
        "basis=((1-x-y)*I/3 + x*S + y*N) psd_tol=-1e-10 wigner_tol=-1e-12\n"
    )
    stream.write("x,y,physical,mana,in_polytope,in_wigner_simplex\n")
    for r in rows:
        mana_str = "" if r.mana is None else format(r.mana, ".17g")
        in_p = "" if r.in_polytope is None else str(r.in_polytope).lower()
        in_w = "" if r.in_wigner_simplex is None else str(r.in_wigner_simplex).lower()
        stream.write(
            f"{format(r.x, '.17g')},{format(r.y, '.17g')},"
            f"{str(r.physical).lower()},{mana_str},{in_p},{in_w}\n"
        )


# ---------------------------------------------------------------------------
# Asymptotic-continuity counterexample
# ---------------------------------------------------------------------------


class CounterexampleInapplicable(ValueError):
    """No admissible spike state: the input already has maximal W-norm on its
    negative support."""


@dataclass(frozen=True)
class AsymptoticContinuityRow:
    n: int
    delta: float
    closed_form_gap: float
    direct_gap: float | None


def _max_negativity_state_on(support: frozenset[int],
                             degeneracy_samples: int = 20,
                             seed: int = 11) -> np.ndarray | None:
    """Unit vector of maximal sum negativity whose negative Wigner support is
    exactly the given point set, or None if no eigenvector candidate fits."""
    a_stack = wigner_basis(QUTRIT).stack
    h = a_stack[sorted(support)].sum(axis=0)
    rng = np.random.default_rng(seed)
    best_vec, best_sn = None, 0.0
    for vec in _eigenvector_candidates(h, rng, degeneracy_samples):
        sn, w = _vector_negativity(a_stack, vec)
        if sn <= best_sn:
            continue
        if frozenset(int(i) for i in np.flatnonzero(w < -1e-9)) == support:
            best_vec, best_sn = vec, sn
    return best_vec


def asymptotic_continuity_demo(
    sigma: DensityMatrix,
    n_max: int,
    delta_schedule=None,
    direct_up_to: int = 3,
) -> list[AsymptoticContinuityRow]:
    """Mana gap per copy between ``sigma^(x)n`` and its spiked perturbation
    ``(1-delta_n) sigma^(x)n + delta_n eta^(x)n``.

    ``eta`` is the maximal-sum-negativity state negative on exactly the same
    points as ``sigma``; sharing signs entrywise makes the perturbed W-norm
    ``(1-d)||sigma||^n + d||eta||^n`` exact, which is also re-verified against
    the explicit tensor-product Wigner function for small ``n``.  With
    ``delta_n = 1/n`` the gap stays bounded away from zero, so the mana is
    not asymptotically continuous.
    """
    if sigma.sys != QUTRIT:
        raise ValueError("the demo runs on single-qutrit states")
    if delta_schedule is None:
        delta_schedule = lambda n: 1.0 / n
    w_sigma = wigner_coefficients(QUTRIT, sigma.matrix)
    support = frozenset(int(i) for i in np.flatnonzero(w_sigma < -TOL.negativity))
    if not support:
        raise ValueError("sigma must have at least one negative Wigner entry")
    eta_vec = _max_negativity_state_on(support)
    if eta_vec is None:
        raise CounterexampleInapplicable(
            "no maximal-negativity state matches the negative support"
        )
    eta = pure_state(QUTRIT, eta_vec)
    w_eta = wigner_coefficients(QUTRIT, eta.matrix)
    norm_sigma = float(np.abs(w_sigma).sum())
    norm_eta = float(np.abs(w_eta).sum())
    if norm_eta <= norm_sigma + 1e-12:
        raise CounterexampleInapplicable(
            f"spike state W-norm {norm_eta} does not exceed sigma's {norm_sigma}; "
            "sigma is already maximal on its negative support"
        )
    rows = []
    for n in range(1, n_max + 1):
        delta = float(delta_schedule(n))
        if not 0.0 <= delta <= 1.0:
            raise ValueError(f"delta_schedule({n}) = {delta} outside [0, 1]")
        ratio = norm_eta / norm_sigma
        closed = math.log((1.0 - delta) + delta * ratio ** n) / n
        direct = None
        if n <= direct_up_to:
            ws_n = _kron_power(w_sigma, n)
            we_n = _kron_power(w_eta, n)
            both = (np.abs(np.sign(ws_n) - np.sign(we_n)) < 0.5) | (ws_n == 0) | (we_n == 0)
            if not both.all():
                raise RuntimeError("tensor powers disagree in sign; demo assumptions broken")
            mixed = (1.0 - delta) * ws_n + delta * we_n
            direct = (math.log(np.abs(mixed).sum()) - n * math.log(norm_sigma)) / n
            if abs(direct - closed) > 1e-10:
                raise RuntimeError(
                    f"closed form and direct evaluation disagree at n={n}: "
                    f"{closed} vs {direct}"
                )
        rows.append(AsymptoticContinuityRow(n, delta, closed, direct))
    return rows


def _kron_power(values: np.ndarray, n: int) -> np.ndarray:
    out = values
    for _ in range(n - 1):
        out = np.kron(out, values)
    return out


def asymptotic_continuity_csv(rows: list[AsymptoticContinuityRow], stream) -> None:
    stream.write("# mana gap per copy for the spiked tensor-power family\n")
    stream.write("n,delta,closed_form_gap,direct_gap\n")
    for r in rows:
        direct = "" if r.direct_gap is None else format(r.direct_gap, ".17g")
        stream.write(
            f"{r.n},{format(r.delta, '.17g')},"
            f"{format(r.closed_form_gap, '.17g')},{direct}\n"
        )
