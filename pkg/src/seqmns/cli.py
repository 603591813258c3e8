"""Command-line interface.

Exit codes: 0 success, 1 input or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Sequence

from . import _backend
from .constructions import analytic_sd, build_scenario
from .correlations import (
    dual_basis_identity_check,
    evaluate_scenario,
    sequential_joint,
    single_time,
)
from .documents import (
    load_scenario,
    povm_from_document,
    read_json,
    scenario_to_document,
)
from .errors import SeqMnsError
from .matcore import DEFAULT_TOL
from .optimize import MODES, OptConfig, default_workers, maximize
from .quantum import Povm, is_scaled_projector_povm, is_self_commuting

NORMALIZATION_NOTE = (
    "note: the d-dimensional classically correlated state is built with weight 1/d "
    "per |ii><ii| term so that it has unit trace; a weight of 1/2 normalizes only at d = 2"
)


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.10f}"


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _table_rows(joint, single, delta):
    for a1 in range(single.n_a):
        for b in range(single.n_b):
            yield a1, b, float(joint.p[:, a1, b].sum()), float(single.p[a1, b]), float(delta[a1, b])


def _witness_payload(s, report) -> dict:
    return {
        "value": report.value,
        "residuals": report.residuals.tolist(),
        "nsit_residual": report.nsit_residual,
        "scenario": scenario_to_document(s),
    }


def _print_report(s, joint, single, report, out=None) -> None:
    out = out or sys.stdout
    print("sequential table p(a0, a1, b):", file=out)
    for a0 in range(joint.n_a):
        for a1 in range(joint.n_a):
            row = "  ".join(_fmt(joint.p[a0, a1, b]) for b in range(joint.n_b))
            print(f"  a0={a0} a1={a1}: {row}", file=out)
    print("single-time table p(a1, b):", file=out)
    for a1 in range(single.n_a):
        row = "  ".join(_fmt(single.p[a1, b]) for b in range(single.n_b))
        print(f"  a1={a1}: {row}", file=out)
    print("residuals sum_a0 p(a0, a1, b) - p(a1, b):", file=out)
    for a1 in range(single.n_a):
        row = "  ".join(_fmt(report.residuals[a1, b]) for b in range(single.n_b))
        print(f"  a1={a1}: {row}", file=out)
    print(f"NSIT residual: {_fmt(report.nsit_residual)}", file=out)
    print(f"witness S: {_fmt(report.value)}", file=out)


# -- subcommands -------------------------------------------------------------


def cmd_demo(args) -> int:
    kind = args.kind.replace("-", "_")
    d = 2 if args.d is None else args.d
    if kind == "trine" and d != 2:
        raise UsageError("the trine demo is defined for d = 2 only")
    if d < 2:
        raise UsageError("--d must be at least 2")
    s = build_scenario(kind, d)
    joint, single = sequential_joint(s), single_time(s)
    report = evaluate_scenario(s)
    commuting, comm_norm = is_self_commuting(s.alice_povm)
    if args.json:
        payload = _witness_payload(s, report)
        payload.update(
            kind=kind,
            d=d,
            joint=joint.p.tolist(),
            single=single.p.tolist(),
            self_commuting=commuting,
            max_commutator=comm_norm,
        )
        if kind == "dual_basis":
            payload["analytic"] = analytic_sd(d)
        _emit_json(payload)
        return 0
    print(f"construction: {kind} (d = {d})")
    _print_report(s, joint, single, report)
    if kind == "dual_basis":
        print(f"analytic S_d = (1 - 1/d)/2: {_fmt(analytic_sd(d))}")
        print(NORMALIZATION_NOTE)
    print(f"Alice self-commuting: {str(commuting).lower()} (max commutator {comm_norm:.3e})")
    return 0


def cmd_witness(args) -> int:
    s = load_scenario(args.input, args.tol)
    joint, single = sequential_joint(s), single_time(s)
    report = evaluate_scenario(s)
    if args.json:
        payload = _witness_payload(s, report)
        payload.update(joint=joint.p.tolist(), single=single.p.tolist())
        _emit_json(payload)
    elif args.csv:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["a1", "b", "sequential_marginal", "single_time", "residual"])
        for a1, b, seq, sgl, res in _table_rows(joint, single, report.residuals):
            w.writerow([a1, b, repr(seq), repr(sgl), repr(res)])
    else:
        _print_report(s, joint, single, report)
    return 0


def cmd_scan(args) -> int:
    if args.d_max < 2:
        raise UsageError("--d-max must be at least 2")
    rows = []
    for d in range(2, args.d_max + 1):
        report = evaluate_scenario(build_scenario("dual_basis", d))
        exact = analytic_sd(d)
        rows.append((d, report.value, exact, abs(report.value - exact), report.nsit_residual))
    if args.csv:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["d", "simulated", "analytic", "abs_diff", "nsit_residual"])
        for d, sim, ana, diff, nsit in rows:
            w.writerow([d, repr(sim), repr(ana), repr(diff), repr(nsit)])
        print(NORMALIZATION_NOTE, file=sys.stderr)
        return 0
    if args.json:
        keys = ("d", "simulated", "analytic", "abs_diff", "nsit_residual")
        _emit_json({"rows": [dict(zip(keys, r)) for r in rows], "note": NORMALIZATION_NOTE})
        return 0
    print(f"{'d':>3}  {'simulated':>14}  {'analytic':>14}  {'|diff|':>10}  {'NSIT':>10}")
    for d, sim, ana, diff, nsit in rows:
        print(f"{d:>3}  {_fmt(sim):>14}  {_fmt(ana):>14}  {diff:10.3e}  {nsit:10.3e}")
    print(NORMALIZATION_NOTE)
    return 0


def _check_payload(p: Povm, tol: float) -> dict:
    commuting, comm = is_self_commuting(p, tol)
    payload = {
        "valid": True,
        "dim": p.dim,
        "outcomes": len(p),
        "self_commuting": commuting,
        "max_commutator": comm,
        "scaled_projector": is_scaled_projector_povm(p, tol),
        "dual_basis_identity_deviation": None,
    }
    if len(p) == 2 * p.dim:
        payload["dual_basis_identity_deviation"] = dual_basis_identity_check(p, tol)
    return payload


def cmd_check(args) -> int:
    p = povm_from_document(read_json(args.input), args.tol)
    payload = _check_payload(p, args.tol if args.tol is not None else DEFAULT_TOL)
    if args.json:
        _emit_json(payload)
        return 0
    print(f"valid POVM: true ({payload['outcomes']} outcomes on dimension {payload['dim']})")
    print(
        f"self-commuting: {str(payload['self_commuting']).lower()} "
        f"(max commutator {payload['max_commutator']:.3e})"
    )
    print(f"scaled-projector: {str(payload['scaled_projector']).lower()}")
    dev = payload["dual_basis_identity_deviation"]
    if dev is not None:
        print(f"dual-basis identity deviation: {dev:.3e}")
    return 0


def cmd_optimize(args) -> int:
    reference = load_scenario(args.reference) if args.reference else None
    try:
        cfg = OptConfig(
            alice_dim=args.da,
            bob_dim=args.db,
            n_alice_outcomes=args.na,
            n_bob_outcomes=args.nb,
            restarts=args.restarts,
            max_iters=args.iters,
            seed=args.seed,
            tol=args.tol,
            mode=args.mode.replace("-", "_"),
            reference=reference,
            workers=args.threads if args.threads else default_workers(),
        )
    except ValueError as exc:
        if isinstance(exc, SeqMnsError):
            raise
        raise UsageError(str(exc)) from exc
    result = maximize(cfg)
    if args.json:
        _emit_json(
            {
                "best_value": result.best_value,
                "best_restart": result.best_restart,
                "per_restart_values": list(result.per_restart_values),
                "iterations_used": list(result.iterations_used),
                "config": {
                    "da": cfg.alice_dim,
                    "db": cfg.bob_dim,
                    "na": cfg.n_alice_outcomes,
                    "nb": cfg.n_bob_outcomes,
                    "restarts": cfg.restarts,
                    "iters": cfg.max_iters,
                    "seed": cfg.seed,
                    "mode": cfg.mode,
                },
                "scenario": scenario_to_document(result.best_scenario),
            }
        )
        return 0
    print(f"mode: {cfg.mode}; dims (A, B) = ({cfg.alice_dim}, {cfg.bob_dim}); "
          f"outcomes (A, B) = ({cfg.n_alice_outcomes}, {cfg.n_bob_outcomes})")
    print(f"restarts: {cfg.restarts}; max iterations: {cfg.max_iters}; seed: {cfg.seed}")
    print(f"best witness (lower bound on the maximum): {_fmt(result.best_value)}")
    print(f"found by restart {result.best_restart}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqmns",
        description="Sequential-measurement statistics and macroscopic no-signalling witnesses.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s 0.1.0 ({_backend.BACKEND} core)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo", help="evaluate one of the explicit constructions")
    p.add_argument("kind", choices=["trine", "dual-basis"])
    p.add_argument("--d", type=int, default=None, help="local dimension (dual-basis only)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("witness", help="evaluate the witness for a scenario document")
    p.add_argument("input")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.add_argument("--tol", type=float, default=None, help="validation tolerance")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("scan", help="simulated vs analytic S_d for d = 2..N")
    p.add_argument("--d-max", type=int, required=True)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--csv", action="store_true")
    fmt.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("check", help="structural checks of a POVM")
    p.add_argument("input")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("optimize", help="heuristic witness maximization")
    p.add_argument("--da", type=int, default=2)
    p.add_argument("--db", type=int, default=2)
    p.add_argument("--na", type=int, default=3)
    p.add_argument("--nb", type=int, default=2)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--mode", choices=[m.replace("_", "-") for m in MODES] + list(MODES), default="full")
    p.add_argument("--reference", default=None,
                   help="scenario document supplying the fixed parts in fixed-* modes")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: CPU count); output does not depend on it")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_optimize)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except SeqMnsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
