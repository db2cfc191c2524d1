"""Stabilizer protocols as branching programs over density matrices.

A protocol is an ordered list of steps; the admissible kinds are Clifford
gates, composition with a stabilizer (polytope-member) ancilla,
computational-basis measurement of the final qudit, partial trace of the
final qudit, and classical conditioning (probabilistic mixtures of
sub-protocols, or branching on the last measurement outcome).  Branch trees
are evaluated exactly; zero-probability branches are pruned and counted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import CliffordUnitary, clifford_generators, random_clifford
from .states import DensityMatrix, partial_trace_last, tensor
from .stabilizer import StabilizerPolytope, enumerate_vertices, membership
from .system import QuditSystem
from .monotones import mana, rel_ent_magic, sum_negativity, wnorm
from .wigner import wigner_of_state

PRUNE_THRESHOLD = 1e-14


class ProtocolError(ValueError):
    """Inconsistent protocol structure or a dimension mismatch at some step."""


@dataclass(frozen=True)
class CliffordGate:
    gate: CliffordUnitary

    @property
    def delta(self) -> int:
        return 0


@dataclass(frozen=True)
class ComposeStabilizer:
    """Append an ancilla that is certified to lie in the stabilizer polytope.

    Pass ``distribution`` (a convex decomposition over the ancilla system's
    polytope vertices) to skip the membership LP; the decomposition is then
    only re-verified against the ancilla's Wigner vector.
    """

    state: DensityMatrix
    distribution: np.ndarray | None = None

    def __post_init__(self):
        polytope = enumerate_vertices(self.state.sys)
        if self.distribution is not None:
            p = np.asarray(self.distribution, dtype=float)
            residual = np.max(np.abs(
                polytope.wigner_matrix.T @ p - wigner_of_state(self.state).values
            ))
            if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9 or residual > 1e-8:
                raise ProtocolError("supplied decomposition does not certify the ancilla")
        elif not membership(self.state, polytope).member:
            raise ProtocolError("ancilla state is not a stabilizer state")

    @property
    def delta(self) -> int:
        return self.state.sys.n


@dataclass(frozen=True)
class MeasureLastQudit:
    @property
    def delta(self) -> int:
        return 0


@dataclass(frozen=True)
class TraceLastQudit:
    @property
    def delta(self) -> int:
        return -1


@dataclass(frozen=True)
class ClassicalMix:
    weights: tuple[float, ...]
    protocols: tuple["StabilizerProtocol", ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.protocols) or len(w) == 0:
            raise ProtocolError("one weight per sub-protocol required")
        if np.any(w < -1e-12) or abs(w.sum() - 1.0) > 1e-12:
            raise ProtocolError("mix weights must form a probability vector")
        deltas = {p.delta for p in self.protocols}
        if len(deltas) != 1:
            raise ProtocolError("mixed sub-protocols change dimension differently")

    @property
    def delta(self) -> int:
        return self.protocols[0].delta


@dataclass(frozen=True)
class Branch:
    """Apply ``protocols[i]`` to branches whose last measured outcome was i."""

    protocols: tuple["StabilizerProtocol", ...]

    def __post_init__(self):
        deltas = {p.delta for p in self.protocols}
        if len(deltas) != 1:
            raise ProtocolError("branch sub-protocols change dimension differently")

    @property
    def delta(self) -> int:
        return self.protocols[0].delta


Step = CliffordGate | ComposeStabilizer | MeasureLastQudit | TraceLastQudit | ClassicalMix | Branch


@dataclass(frozen=True)
class StabilizerProtocol:
    sys_in: QuditSystem
    steps: tuple[Step, ...]
    sys_out: QuditSystem = field(init=False)

    def __post_init__(self):
        n = self.sys_in.n
        measured = False
        for i, step in enumerate(self.steps):
            if isinstance(step, CliffordGate) and step.gate.sys.n != n:
                raise ProtocolError(f"step {i}: gate acts on n={step.gate.sys.n}, have n={n}")
            if isinstance(step, TraceLastQudit) and n < 2:
                raise ProtocolError(f"step {i}: cannot trace below one qudit")
            if isinstance(step, Branch):
                if not measured:
                    raise ProtocolError(f"step {i}: branch without a prior measurement")
                if len(step.protocols) != self.sys_in.d:
                    raise ProtocolError(f"step {i}: need one sub-protocol per outcome")
            if isinstance(step, (ClassicalMix, Branch)):
                for sub in step.protocols:
                    if sub.sys_in.d != self.sys_in.d or sub.sys_in.n != n:
                        raise ProtocolError(f"step {i}: sub-protocol expects {sub.sys_in}")
            if isinstance(step, MeasureLastQudit):
                measured = True
            n += step.delta
            if n < 1:
                raise ProtocolError(f"step {i}: dimension bookkeeping dropped below one qudit")
        object.__setattr__(self, "sys_out", QuditSystem(self.sys_in.d, n))

    @property
    def delta(self) -> int:
        return self.sys_out.n - self.sys_in.n


@dataclass(frozen=True)
class OutcomeDistribution:
    sys: QuditSystem
    branches: tuple[tuple[float, DensityMatrix], ...]
    pruned_probability: float = 0.0

    def total_probability(self) -> float:
        return sum(p for p, _ in self.branches)

    def expected(self, functional) -> float:
        return sum(p * functional(state) for p, state in self.branches)


@dataclass
class _BranchRecord:
    probability: float
    matrix: np.ndarray
    n: int
    last_outcome: int | None = None


def _apply_step(step: Step, rec: _BranchRecord, d: int) -> list[_BranchRecord]:
    if isinstance(step, CliffordGate):
        u = step.gate.matrix
        return [_BranchRecord(rec.probability, u @ rec.matrix @ u.conj().T,
                              rec.n, rec.last_outcome)]
    if isinstance(step, ComposeStabilizer):
        return [_BranchRecord(rec.probability,
                              np.kron(rec.matrix, step.state.matrix),
                              rec.n + step.state.sys.n, rec.last_outcome)]
    if isinstance(step, MeasureLastQudit):
        dim_rest = d ** (rec.n - 1)
        blocks = rec.matrix.reshape(dim_rest, d, dim_rest, d)
        out = []
        for i in range(d):
            block = blocks[:, i, :, i]
            prob = float(np.real(np.trace(block)))
            if prob < PRUNE_THRESHOLD:
                continue
            post = np.zeros_like(rec.matrix).reshape(dim_rest, d, dim_rest, d)
            post[:, i, :, i] = block / prob
            out.append(_BranchRecord(rec.probability * prob,
                                     post.reshape(rec.matrix.shape), rec.n, i))
        return out
    if isinstance(step, TraceLastQudit):
        dim_rest = d ** (rec.n - 1)
        m = rec.matrix.reshape(dim_rest, d, dim_rest, d)
        return [_BranchRecord(rec.probability, np.einsum("ajbj->ab", m),
                              rec.n - 1, rec.last_outcome)]
    if isinstance(step, ClassicalMix):
        out = []
        for w, sub in zip(step.weights, step.protocols):
            if w < PRUNE_THRESHOLD:
                continue
            scaled = _BranchRecord(rec.probability * w, rec.matrix, rec.n,
                                   rec.last_outcome)
            out.extend(_run_records(sub.steps, [scaled], d))
        return out
    if isinstance(step, Branch):
        if rec.last_outcome is None:
            raise ProtocolError("branch step reached with no recorded outcome")
        return _run_records(step.protocols[rec.last_outcome].steps, [rec], d)
    raise TypeError(f"unknown step kind {type(step).__name__}")


def _run_records(steps, records: list[_BranchRecord], d: int) -> list[_BranchRecord]:
    for step in steps:
        nxt = []
        for rec in records:
            nxt.extend(_apply_step(step, rec, d))
        records = nxt
    return records


def run(protocol: StabilizerProtocol, rho: DensityMatrix) -> OutcomeDistribution:
    """Exact branch-tree evaluation of the protocol on an input state."""
    if rho.sys != protocol.sys_in:
        raise ProtocolError(
            f"input lives on {rho.sys}, protocol expects {protocol.sys_in}"
        )
    records = _run_records(
        protocol.steps,
        [_BranchRecord(1.0, np.asarray(rho.matrix), rho.sys.n)],
        protocol.sys_in.d,
    )
    out_sys = protocol.sys_out
    branches = []
    for rec in records:
        if rec.n != out_sys.n:
            raise ProtocolError("branch terminated at an unexpected dimension")
        branches.append((rec.probability, DensityMatrix(out_sys, rec.matrix,
                                                        validate=False)))
    total = sum(p for p, _ in branches)
    if not branches or abs(total - 1.0) > 1e-10:
        # Pruned mass must stay accounted for.
        pruned = 1.0 - total
        if pruned > 1e-6:
            raise ProtocolError(f"lost {pruned:.3e} probability mass")
    return OutcomeDistribution(out_sys, tuple(branches), 1.0 - total)


# ---------------------------------------------------------------------------
# Monotone audit
# ---------------------------------------------------------------------------

MONOTONES = ("mana", "wnorm", "sum_negativity", "rel_ent_magic")


@dataclass(frozen=True)
class AuditResult:
    monotone: str
    value_in: float
    expected_value_out: float
    slack: float
    branch_count: int

    def to_json_obj(self) -> dict:
        return {
            "schema_version": 1,
            "monotone": self.monotone,
            "value_in": self.value_in,
            "expected_value_out": self.expected_value_out,
            "slack": self.slack,
            "branch_count": self.branch_count,
        }


def _monotone_functional(name: str):
    if name == "mana":
        return mana
    if name == "wnorm":
        return wnorm
    if name == "sum_negativity":
        return sum_negativity
    if name == "rel_ent_magic":
        def value(state: DensityMatrix) -> float:
            return rel_ent_magic(state, enumerate_vertices(state.sys),
                                 gap_tol=1e-9).value
        return value
    raise ValueError(f"unknown monotone {name!r}; choose from {MONOTONES}")


def monotone_audit(protocol: StabilizerProtocol, rho: DensityMatrix,
                   monotone: str = "mana") -> AuditResult:
    """Compare a monotone's input value against its branch-averaged output.

    ``slack = value_in - sum_i p_i value(sigma_i)``; a valid monotone keeps
    the slack nonnegative up to numerics, though an individual post-selected
    branch may exceed the input value.
    """
    functional = _monotone_functional(monotone)
    value_in = functional(rho)
    outcome = run(protocol, rho)
    expected = outcome.expected(functional)
    return AuditResult(monotone, value_in, expected, value_in - expected,
                       len(outcome.branches))


# ---------------------------------------------------------------------------
# Random protocols
# ---------------------------------------------------------------------------


def _random_ancilla(rng: np.random.Generator, d: int) -> ComposeStabilizer:
    polytope = enumerate_vertices(QuditSystem(d, 1))
    p = rng.dirichlet(np.ones(len(polytope)))
    return ComposeStabilizer(polytope.mix(p), distribution=p)


def _random_gate_protocol(rng, sys: QuditSystem, max_gates: int = 2) -> StabilizerProtocol:
    steps = tuple(CliffordGate(random_clifford(sys, rng, word_length=4))
                  for _ in range(int(rng.integers(0, max_gates + 1))))
    return StabilizerProtocol(sys, steps)


def random_protocol(seed: int, sys: QuditSystem, depth: int,
                    max_qudits: int = 3) -> StabilizerProtocol:
    """Seed-deterministic random protocol of the given depth.

    Draws uniformly among the step kinds that respect the dimension budget;
    Clifford gates are random generator words, ancillas random polytope
    mixtures, and conditioning steps carry gate-only sub-protocols.
    """
    if depth > 12:
        raise ValueError("depth is capped at 12")
    rng = np.random.default_rng(seed)
    steps: list[Step] = []
    n = sys.n
    measured = False
    for _ in range(depth):
        kinds = ["clifford"]
        if n < max_qudits:
            kinds.append("compose")
        kinds.append("measure")
        if n >= 2:
            kinds.append("trace")
        kinds.append("mix")
        if measured:
            kinds.append("branch")
        kind = kinds[int(rng.integers(0, len(kinds)))]
        current = QuditSystem(sys.d, n)
        if kind == "clifford":
            steps.append(CliffordGate(random_clifford(current, rng)))
        elif kind == "compose":
            steps.append(_random_ancilla(rng, sys.d))
            n += 1
        elif kind == "measure":
            steps.append(MeasureLastQudit())
            measured = True
        elif kind == "trace":
            steps.append(TraceLastQudit())
            n -= 1
        elif kind == "mix":
            k = int(rng.integers(2, 4))
            weights = rng.dirichlet(np.ones(k))
            subs = tuple(_random_gate_protocol(rng, current) for _ in range(k))
            steps.append(ClassicalMix(tuple(float(w) for w in weights), subs))
        elif kind == "branch":
            subs = tuple(_random_gate_protocol(rng, current) for _ in range(sys.d))
            steps.append(Branch(subs))
    return StabilizerProtocol(sys, tuple(steps))
