"""Command-line front end.

All structured output is JSON (stdout or ``--out``) with floats printed at
17 significant digits, so identical invocations are byte-identical; grids
and tables are CSV.  Exit codes: 0 success, 1 domain error (JSON error
object on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .extremal import (
    asymptotic_continuity_csv,
    asymptotic_continuity_demo,
    exhaustive_qutrit_search,
    mana_plane_csv,
    mana_plane_grid,
    norrell_density,
    strange_density,
)
from .jsonio import (
    dumps,
    load_state,
    protocol_from_json_obj,
    state_to_json_obj,
)
from .monotones import (
    distillation_bound,
    mana,
    rel_ent_magic,
    report,
)
from .protocols import MONOTONES, ProtocolError, monotone_audit, random_protocol
from .stabilizer import (
    MembershipSolverError,
    enumerate_vertices,
    membership,
    p_t,
)
from .states import DensityMatrix, maximally_mixed, mix, random_mixed, tensor
from .system import QuditSystem
from .wigner import wigner_of_state


def _write_out(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, obj: dict) -> int:
    _write_out(args, dumps(obj) + "\n")
    return 0


def _log_scale(args) -> float:
    return math.log(2.0) if getattr(args, "log_base", "e") == "2" else 1.0


def _parse_system(text: str) -> QuditSystem:
    try:
        d, n = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise ValueError(f"expected --system d,n, got {text!r}") from exc
    return QuditSystem(d, n)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def cmd_wigner(args) -> int:
    rho, _ = load_state(args.state)
    buf = io.StringIO()
    wigner_of_state(rho).to_csv(buf)
    _write_out(args, buf.getvalue())
    return 0


def cmd_report(args) -> int:
    rho, _ = load_state(args.state)
    return _emit_json(args, report(rho, args.log_base).to_json_obj())


def cmd_member(args) -> int:
    rho, _ = load_state(args.state)
    witness = membership(rho, enumerate_vertices(rho.sys), tol=args.tol)
    return _emit_json(args, witness.to_json_obj())


def cmd_pt(args) -> int:
    rho, _ = load_state(args.state)
    result = p_t(rho, enumerate_vertices(rho.sys), tol=args.tol)
    if args.verbose:
        for p, member in result.trace:
            sys.stderr.write(f"p={p:.12f} member={member}\n")
    return _emit_json(args, {
        "schema_version": 1,
        "p_t": result.value,
        "bracket": [result.lower, result.upper],
        "is_stabilizer": result.is_stabilizer,
        "iterations": result.iterations,
    })


def cmd_relent(args) -> int:
    rho, _ = load_state(args.state)
    state = rho if args.n_copies == 1 else tensor(rho, rho)
    polytope = enumerate_vertices(state.sys)
    result = rel_ent_magic(state, polytope, gap_tol=args.gap_tol)
    scale = _log_scale(args)
    obj = result.to_json_obj()
    obj["value"] = result.value / scale
    obj["duality_gap"] = result.duality_gap / scale
    obj["n_copies"] = args.n_copies
    obj["value_per_copy"] = result.value / scale / args.n_copies
    obj["log_base"] = args.log_base
    return _emit_json(args, obj)


def cmd_bound(args) -> int:
    resource, _ = load_state(args.resource)
    target, _ = load_state(args.target)
    value = distillation_bound(resource, target, args.m)
    return _emit_json(args, {
        "schema_version": 1,
        "m": args.m,
        "infinite": not math.isfinite(value),
        "bound": value if math.isfinite(value) else None,
        "mana_resource": mana(resource, args.log_base),
        "mana_target": mana(target, args.log_base),
        "log_base": args.log_base,
    })


def cmd_audit(args) -> int:
    with open(args.protocol, "r", encoding="utf-8") as fh:
        protocol = protocol_from_json_obj(json.load(fh))
    rho, _ = load_state(args.state)
    result = monotone_audit(protocol, rho, args.monotone)
    return _emit_json(args, result.to_json_obj())


def cmd_audit_random(args) -> int:
    system = _parse_system(args.system)

    def one(seed: int) -> float:
        rng = np.random.default_rng(seed)
        state = random_mixed(system, rng)
        protocol = random_protocol(seed, system, args.depth)
        return monotone_audit(protocol, state, args.monotone).slack

    seeds = range(args.seed, args.seed + args.seeds)
    if args.threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            slacks = list(pool.map(one, seeds))
    else:
        slacks = [one(s) for s in seeds]
    failures = [s for s in slacks if s < -args.slack_tol]
    return _emit_json(args, {
        "schema_version": 1,
        "monotone": args.monotone,
        "system": [system.d, system.n],
        "depth": args.depth,
        "seeds": args.seeds,
        "first_seed": args.seed,
        "passes": len(slacks) - len(failures),
        "failures": len(failures),
        "worst_slack": min(slacks),
        "slack_tol": args.slack_tol,
    })


def cmd_extremal_search(args) -> int:
    result = exhaustive_qutrit_search(seed=args.seed)
    return _emit_json(args, result.to_json_obj())


def cmd_heatmap(args) -> int:
    polytope = enumerate_vertices(QuditSystem(3, 1))
    rows = mana_plane_grid(args.resolution, polytope, threads=args.threads)
    buf = io.StringIO()
    mana_plane_csv(rows, args.resolution, buf)
    _write_out(args, buf.getvalue())
    return 0


def cmd_asymcont(args) -> int:
    sigma, _ = load_state(args.sigma)
    rows = asymptotic_continuity_demo(sigma, args.n_max)
    buf = io.StringIO()
    asymptotic_continuity_csv(rows, buf)
    _write_out(args, buf.getvalue())
    return 0


def cmd_mkstate(args) -> int:
    qutrit = QuditSystem(3, 1)
    if args.name == "strange":
        rho, label = strange_density(), "strange"
    elif args.name == "norrell":
        rho, label = norrell_density(), "norrell"
    elif args.name == "mixed-id":
        rho, label = maximally_mixed(qutrit), "mixed-id"
    elif args.name == "twirl":
        eps = args.epsilon
        if eps is None:
            raise ValueError("--epsilon is required for the twirl family")
        if not 0.0 <= eps <= 1.0:
            raise ValueError("--epsilon must lie in [0, 1]")
        rho = mix([strange_density(), maximally_mixed(qutrit)], [1.0 - eps, eps])
        label = f"twirl-eps={format(eps, '.17g')}"
    else:
        raise ValueError(f"unknown state name {args.name!r}")
    return _emit_json(args, state_to_json_obj(rho, label))


def cmd_vertices(args) -> int:
    polytope = enumerate_vertices(_parse_system(args.system))
    return _emit_json(args, polytope.to_json_obj())


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="manakit",
        description="Discrete Wigner functions, stabilizer polytopes, and "
                    "magic monotones for odd-prime qudits.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--log-base", choices=["e", "2"], default="e",
                        help="logarithm base recorded in reports (default e)")
    common.add_argument("--seed", type=int, default=0, help="base RNG seed")
    common.add_argument("--threads", type=int, default=1,
                        help="worker cap for parallelizable subcommands")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wigner", parents=[common],
                       help="Wigner function of a state, as CSV")
    p.add_argument("state")
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("report", parents=[common],
                       help="wnorm / sum negativity / mana / maxneg report")
    p.add_argument("state")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("member", parents=[common],
                       help="stabilizer-polytope membership witness")
    p.add_argument("state")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("pt", parents=[common],
                       help="largest stabilizer mixing weight p_T")
    p.add_argument("state")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--verbose", action="store_true",
                   help="print the bisection trace to stderr")
    p.set_defaults(func=cmd_pt)

    p = sub.add_parser("relent", parents=[common],
                       help="relative entropy of magic (Frank-Wolfe)")
    p.add_argument("state")
    p.add_argument("--n-copies", type=int, choices=[1, 2], default=1)
    p.add_argument("--gap-tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_relent)

    p = sub.add_parser("bound", parents=[common],
                       help="distillation lower bound m*mana(target)/mana(resource)")
    p.add_argument("--resource", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("-m", type=int, default=1)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("audit", parents=[common],
                       help="monotone audit of a protocol file on a state")
    p.add_argument("--protocol", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--monotone", choices=MONOTONES, default="mana")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("audit-random", parents=[common],
                       help="audit seeded random protocols; summary with worst slack")
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--system", required=True, help="d,n of the input system")
    p.add_argument("--monotone", choices=MONOTONES, default="mana")
    p.add_argument("--slack-tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_audit_random)

    p = sub.add_parser("extremal-search", parents=[common],
                       help="exhaustive qutrit maximal-sum-negativity search")
    p.set_defaults(func=cmd_extremal_search)

    p = sub.add_parser("heatmap", parents=[common],
                       help="mana values over the Strange/Norrell plane, as CSV")
    p.add_argument("--resolution", type=int, default=64)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("asymcont", parents=[common],
                       help="asymptotic-continuity gap table, as CSV")
    p.add_argument("--sigma", required=True)
    p.add_argument("--n-max", type=int, default=50)
    p.set_defaults(func=cmd_asymcont)

    p = sub.add_parser("mkstate", parents=[common],
                       help="emit a bundled state file (strange, norrell, "
                            "mixed-id, or the twirl family)")
    p.add_argument("name", choices=["strange", "norrell", "mixed-id", "twirl"])
    p.add_argument("--epsilon", type=float, default=None,
                   help="mixing weight toward I/3 for the twirl family")
    p.set_defaults(func=cmd_mkstate)

    p = sub.add_parser("vertices", parents=[common],
                       help="stabilizer polytope vertex export")
    p.add_argument("--system", required=True, help="d,n")
    p.set_defaults(func=cmd_vertices)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, ProtocolError,
            MembershipSolverError, RuntimeError) as exc:
        sys.stderr.write(dumps({
            "error": {"type": type(exc).__name__, "message": str(exc)}
        }) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
