"""Deterministic JSON serialization and the on-disk file schemas.

All floats are printed with 17 significant digits so identical inputs give
byte-identical output.  State files carry ``d``, ``n`` and a row-major
``matrix`` of ``[re, im]`` pairs; a 1-dimensional ``matrix`` is treated as a
pure-state vector and promoted to its projector.
"""

from __future__ import annotations

import json
import math
from importlib import resources

import numpy as np

from .states import DensityMatrix, pure_state
from .system import QuditSystem

SCHEMA_VERSION = 1


def _emit(obj, pieces: list[str]) -> None:
    if obj is None:
        pieces.append("null")
    elif obj is True:
        pieces.append("true")
    elif obj is False:
        pieces.append("false")
    elif isinstance(obj, str):
        pieces.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        pieces.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError("non-finite float in JSON output; encode it explicitly")
        pieces.append(format(x, ".17g"))
    elif isinstance(obj, dict):
        pieces.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                pieces.append(",")
            pieces.append(json.dumps(str(k)))
            pieces.append(":")
            _emit(v, pieces)
        pieces.append("}")
    elif isinstance(obj, (list, tuple)):
        pieces.append("[")
        for i, v in enumerate(obj):
            if i:
                pieces.append(",")
            _emit(v, pieces)
        pieces.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Compact JSON with deterministic float formatting."""
    pieces: list[str] = []
    _emit(obj, pieces)
    return "".join(pieces)


def complex_to_json(arr: np.ndarray) -> list:
    """Nested lists of [re, im] pairs, row-major."""
    if arr.ndim == 1:
        return [[float(c.real), float(c.imag)] for c in arr]
    return [complex_to_json(row) for row in arr]


def complex_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("expected [re, im] pairs in the innermost dimension")
    return arr[..., 0] + 1j * arr[..., 1]


# ---------------------------------------------------------------------------
# State files
# ---------------------------------------------------------------------------


def state_to_json_obj(rho: DensityMatrix, label: str | None = None) -> dict:
    obj = {
        "schema_version": SCHEMA_VERSION,
        "d": rho.sys.d,
        "n": rho.sys.n,
    }
    if label is not None:
        obj["label"] = label
    obj["matrix"] = complex_to_json(np.asarray(rho.matrix))
    return obj


def state_from_json_obj(obj: dict) -> tuple[DensityMatrix, str | None]:
    sys = QuditSystem(int(obj["d"]), int(obj["n"]))
    raw = complex_from_json(obj["matrix"])
    label = obj.get("label")
    if raw.ndim == 1:
        return pure_state(sys, raw), label
    if raw.shape != (sys.dim, sys.dim):
        raise ValueError(
            f"matrix shape {raw.shape} does not match dim {sys.dim}"
        )
    return DensityMatrix(sys, raw), label


def bundled_state_names() -> list[str]:
    root = resources.files("manakit").joinpath("data")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_state(path_or_name: str) -> tuple[DensityMatrix, str | None]:
    """Load a state file from disk, falling back to the bundled states
    (``strange``, ``norrell``, ``mixed-id``) when no such file exists."""
    try:
        with open(path_or_name, "r", encoding="utf-8") as fh:
            return state_from_json_obj(json.load(fh))
    except FileNotFoundError:
        name = path_or_name[:-5] if path_or_name.endswith(".json") else path_or_name
        candidate = resources.files("manakit").joinpath("data", f"{name}.json")
        if candidate.is_file():
            return state_from_json_obj(json.loads(candidate.read_text()))
        raise


# ---------------------------------------------------------------------------
# Protocol files
# ---------------------------------------------------------------------------


def protocol_to_json_obj(protocol) -> dict:
    from . import protocols as proto

    def step_obj(step) -> dict:
        if isinstance(step, proto.CliffordGate):
            obj: dict = {"kind": "clifford"}
            if step.gate.name:
                obj["name"] = step.gate.name
            obj["matrix"] = complex_to_json(np.asarray(step.gate.matrix))
            return obj
        if isinstance(step, proto.ComposeStabilizer):
            obj = {"kind": "compose", "state": state_to_json_obj(step.state)}
            if step.distribution is not None:
                obj["distribution"] = [float(p) for p in step.distribution]
            return obj
        if isinstance(step, proto.MeasureLastQudit):
            return {"kind": "measure"}
        if isinstance(step, proto.TraceLastQudit):
            return {"kind": "trace"}
        if isinstance(step, proto.ClassicalMix):
            return {
                "kind": "mix",
                "weights": [float(w) for w in step.weights],
                "protocols": [protocol_to_json_obj(p) for p in step.protocols],
            }
        if isinstance(step, proto.Branch):
            return {
                "kind": "branch",
                "protocols": [protocol_to_json_obj(p) for p in step.protocols],
            }
        raise TypeError(f"unknown step kind {type(step).__name__}")

    return {
        "schema_version": SCHEMA_VERSION,
        "d": protocol.sys_in.d,
        "n_in": protocol.sys_in.n,
        "steps": [step_obj(s) for s in protocol.steps],
    }


def protocol_from_json_obj(obj: dict):
    from . import protocols as proto
    from .algebra import CliffordUnitary, clifford_generators

    sys_in = QuditSystem(int(obj["d"]), int(obj["n_in"]))

    def parse_step(entry: dict, sys: QuditSystem):
        kind = entry["kind"]
        if kind == "clifford":
            if "matrix" in entry:
                gate = CliffordUnitary.from_matrix(
                    sys, complex_from_json(entry["matrix"]), entry.get("name")
                )
            else:
                by_name = {g.name: g for g in clifford_generators(sys)}
                gate = by_name[entry["ref"]]
            return proto.CliffordGate(gate)
        if kind == "compose":
            state, _ = state_from_json_obj(entry["state"])
            dist = entry.get("distribution")
            return proto.ComposeStabilizer(
                state, None if dist is None else np.asarray(dist, dtype=float)
            )
        if kind == "measure":
            return proto.MeasureLastQudit()
        if kind == "trace":
            return proto.TraceLastQudit()
        if kind == "mix":
            return proto.ClassicalMix(
                tuple(float(w) for w in entry["weights"]),
                tuple(protocol_from_json_obj(p) for p in entry["protocols"]),
            )
        if kind == "branch":
            return proto.Branch(
                tuple(protocol_from_json_obj(p) for p in entry["protocols"]),
            )
        raise ValueError(f"unknown step kind {kind!r}")

    steps = []
    n = sys_in.n
    for entry in obj["steps"]:
        step = parse_step(entry, QuditSystem(sys_in.d, n))
        steps.append(step)
        n += step.delta
    return proto.StabilizerProtocol(sys_in, tuple(steps))
