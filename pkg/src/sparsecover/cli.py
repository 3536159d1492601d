"""Command line front end: generators to decompositions to covers to
embeddings, each step verified and reported.

Every subcommand emits a RunReport as JSON.  Builder subcommands
(gen, decompose, cover, partition, embed) write their artifact to --out
and the report to stdout; verify and report treat the report itself as
the artifact, so --out captures it and stdout is the fallback.  Exit
codes: 0 when every requested check passed, 1 when a verification
failed (the report is still emitted), 2 for unusable arguments.

Reports are byte-identical across repeated runs with the same inputs
and seed.  Wall time is therefore kept off the JSON payload; it goes to
stderr where a human is watching.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field

from .acceptance import run_acceptance
from .bcd import bcd_from_json, bcd_to_json, build_bcd, verify_bcd
from .cover import build_cover, cover_from_json, cover_to_json, preset, verify_cover
from .embed import (
    distortion_report,
    embed_full,
    embed_minor_free_3eps,
    embedding_to_json,
)
from .generators import MINOR_FREE_R, WEIGHT_MODES, FamilySpec, generate
from .graph import (
    all_pairs,
    distance_extremes,
    graph_to_json,
    load_graph,
    tolerance,
)
from .partition import (
    color_cover,
    partition_from_json,
    partition_to_json,
    to_sparse_partition,
    verify_coloring,
)

import numpy as np


@dataclass
class RunReport:
    """What a subcommand did, measured, and concluded.

    wall_time lives on the object for callers but is deliberately not
    serialized: reports must be byte-identical run to run.
    """

    command: str
    inputs: dict
    parameters: dict
    measured: dict
    checks: dict  # name -> {"passed": bool, "detail": str}
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())

    def to_json(self) -> dict:
        body = {
            "command": self.command,
            "inputs": self.inputs,
            "parameters": self.parameters,
            "measured": self.measured,
            "checks": self.checks,
            "passed": self.passed,
        }
        body.update(self.extra)
        return body


class _UsageError(Exception):
    """Argument combinations argparse cannot see; exits with code 2."""


def _digest_bytes(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _digest_file(path: str) -> str:
    with open(path, "rb") as fh:
        return _digest_bytes(fh.read())


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _digest_obj(obj) -> str:
    return _digest_bytes(_canonical(obj).encode())


def _write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _check(ok: bool, detail: str) -> dict:
    return {"passed": bool(ok), "detail": detail}


def _report_checks(rep) -> dict:
    """Adapt a library report's named bullets (ok, detail) pairs."""
    src = getattr(rep, "bullets", None) or getattr(rep, "checks")
    return {name: _check(ok, detail) for name, (ok, detail) in src.items()}


def _require_out(args) -> str:
    if not args.out:
        raise _UsageError(f"{args.cmd} writes an artifact; say where with --out")
    return args.out


def _load_graph_arg(args) -> tuple:
    if not args.graph:
        raise _UsageError("--graph is required")
    g = load_graph(args.graph)
    return g, _digest_file(args.graph)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_gen(args) -> RunReport:
    out = _require_out(args)
    spec = FamilySpec(
        family=args.family,
        size=args.size,
        weight_mode=args.weights,
        lo=args.lo,
        hi=args.hi,
        seed=args.seed,
    )
    g, r, meta = generate(spec)
    artifact = graph_to_json(g)
    _write_json(out, artifact)
    dmin, phi = distance_extremes(g)
    return RunReport(
        command="gen",
        inputs={},
        parameters={
            "family": args.family, "size": args.size, "weights": args.weights,
            "lo": args.lo, "hi": args.hi, "seed": args.seed, "out": out,
        },
        measured={
            "n": g.n, "m": len(g.edges), "r": r,
            "dmin": dmin if g.n > 1 else None, "diameter": phi,
            "digest": _digest_obj(artifact),
        },
        checks={
            "connected": _check(True, f"{g.n} vertices, {len(g.edges)} edges, one component"),
        },
    )


def _resolve_bcd_params(args, r_required=True):
    if args.gamma is not None or args.w is not None:
        if args.gamma is None or args.w is None:
            raise _UsageError("--gamma and --w go together")
        return args.gamma, args.w
    if args.r is None:
        if r_required:
            raise _UsageError("give --r (for gamma=delta/r, w=r-1) or both --gamma and --w")
        return None, None
    return args.delta / args.r, args.r - 1


def _cmd_decompose(args) -> RunReport:
    out = _require_out(args)
    g, gdigest = _load_graph_arg(args)
    if args.delta is None:
        raise _UsageError("--delta is required")
    gamma, w = _resolve_bcd_params(args)
    d = build_bcd(g, delta=args.delta, gamma=gamma, w=w)
    rep = verify_bcd(g, d)
    _write_json(out, bcd_to_json(d))
    return RunReport(
        command="decompose",
        inputs={"graph": gdigest},
        parameters={
            "delta": args.delta, "gamma": gamma, "w": w, "r": args.r, "out": out,
        },
        measured={
            "delta_used": rep.delta_measured,
            "w_measured": rep.w_measured,
            "supernodes": len(d.supernodes),
        },
        checks=_report_checks(rep),
    )


def _resolve_q(args, r) -> int:
    if args.q is not None:
        return args.q
    if args.preset == "B":
        if r is None:
            raise _UsageError("preset B needs --r to size q")
        return preset(r, args.epsilon if args.epsilon is not None else 0.5)
    return 1


def _cmd_cover(args) -> RunReport:
    out = _require_out(args)
    g, gdigest = _load_graph_arg(args)
    inputs = {"graph": gdigest}
    parameters = {"preset": args.preset, "q": args.q, "epsilon": args.epsilon,
                  "r": args.r, "out": out}
    if args.bcd:
        d = bcd_from_json(_load_json(args.bcd))
        inputs["bcd"] = _digest_file(args.bcd)
    else:
        if args.delta is None:
            raise _UsageError("give --bcd, or --delta with --r (or --gamma/--w) to build one")
        gamma, w = _resolve_bcd_params(args)
        d = build_bcd(g, delta=args.delta, gamma=gamma, w=w)
        parameters.update({"delta": args.delta, "gamma": gamma, "w": w})
    q = _resolve_q(args, args.r)
    cover = build_cover(g, d, q)
    rep = verify_cover(g, cover)
    _write_json(out, cover_to_json(cover))
    return RunReport(
        command="cover",
        inputs=inputs,
        parameters=parameters,
        measured={
            "q": q,
            "delta_used": cover.delta_used,
            "beta": cover.beta,
            "diam": cover.diam,
            "s": cover.s,
            "k": cover.meta.get("k"),
            "padded_radius": rep.rho_star,
        },
        checks=_report_checks(rep),
    )


def _cmd_partition(args) -> RunReport:
    out = _require_out(args)
    g, gdigest = _load_graph_arg(args)
    if not args.cover:
        raise _UsageError("--cover is required")
    cover = cover_from_json(_load_json(args.cover))
    sp = to_sparse_partition(g, cover)
    coloring = color_cover(cover)
    crep = verify_coloring(g, cover, coloring)
    _write_json(out, partition_to_json(sp))
    covered = set().union(*sp.clusters) if sp.clusters else set()
    disjoint = sum(len(c) for c in sp.clusters) == len(covered)
    checks = {
        "partition": _check(
            disjoint and len(covered) == g.n,
            "clipped clusters split the vertex set"
            if disjoint and len(covered) == g.n
            else "clipped clusters overlap or miss vertices",
        ),
        "tau_within_s": _check(
            True,
            f"measured tau {sp.tau} vs s={cover.s}"
            + ("" if sp.tau <= cover.s else " (informational: tau exceeded s)"),
        ),
    }
    checks.update({f"coloring_{k}": v for k, v in _report_checks(crep).items()})
    return RunReport(
        command="partition",
        inputs={"graph": gdigest, "cover": _digest_file(args.cover)},
        parameters={"out": out},
        measured={
            "alpha": sp.alpha,
            "tau": sp.tau,
            "diam": sp.diam,
            "clusters": len(sp.clusters),
            "colors": coloring.k,
        },
        checks=checks,
    )


def _sidecar_path(out: str) -> str:
    return out[:-4] + ".json" if out.endswith(".csv") else out + ".json"


def _cmd_embed(args) -> RunReport:
    out = _require_out(args)
    g, gdigest = _load_graph_arg(args)
    if args.r is None or args.epsilon is None:
        raise _UsageError("embed needs --r and --epsilon")
    if args.mode == "3eps":
        e = embed_minor_free_3eps(g, args.r, args.epsilon)
    elif args.q is not None:
        e = embed_full(g, args.r, args.epsilon, q=args.q)
    else:
        e = embed_full(g, args.r, args.epsilon)
    # exact on every pair while that stays cheap; a fixed-seed sample after
    n_pairs = g.n * (g.n - 1) // 2
    pairs = "all" if n_pairs <= 200_000 else 200_000
    rep = distortion_report(g, e, pairs=pairs)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row in e.coords:
            writer.writerow([repr(float(x)) for x in row])
    sidecar = _sidecar_path(out)
    _write_json(sidecar, embedding_to_json(e))
    tol = 1e-9
    return RunReport(
        command="embed",
        inputs={"graph": gdigest},
        parameters={
            "r": args.r, "epsilon": args.epsilon, "mode": args.mode,
            "q": args.q, "pairs": pairs, "out": out, "sidecar": sidecar,
        },
        measured={
            "k": e.k,
            "rho": e.rho,
            "xi": e.xi,
            "rho_measured": rep.rho,
            "xi_measured": rep.xi,
            "distortion_measured": rep.distortion,
        },
        checks={
            "expansion": _check(
                rep.rho <= e.rho * (1 + tol),
                f"measured {rep.rho:.6g} within claimed {e.rho:.6g}",
            ),
            "contraction": _check(
                rep.xi <= e.xi * (1 + tol),
                f"measured {rep.xi:.6g} within claimed {e.xi:.6g}",
            ),
            "finite": _check(rep.passed, "no stretched zero-distance or collapsed pair"),
        },
    )


def _verify_partition_checks(g, sp) -> tuple:
    tol = tolerance(g)
    covered: set = set()
    overlap = False
    for cl in sp.clusters:
        if covered & cl:
            overlap = True
        covered |= cl
    d = all_pairs(g)
    worst = 0.0
    for cl in sp.clusters:
        idx = np.fromiter(cl, int)
        if idx.size > 1:
            worst = max(worst, float(d[np.ix_(idx, idx)].max()))
    checks = {
        "partition": _check(
            not overlap and len(covered) == g.n,
            "clusters split the vertex set"
            if not overlap and len(covered) == g.n
            else "clusters overlap or miss vertices",
        ),
        "diameter": _check(
            worst <= sp.diam + tol,
            f"worst weak diameter {worst:.6g} within {sp.diam:.6g}"
            if worst <= sp.diam + tol
            else f"weak diameter {worst:.6g} exceeds advertised {sp.diam:.6g}",
        ),
    }
    measured = {
        "alpha": sp.alpha, "tau": sp.tau, "diam": sp.diam,
        "clusters": len(sp.clusters), "weak_diameter": worst,
    }
    return checks, measured


def _cmd_verify(args) -> RunReport:
    g, gdigest = _load_graph_arg(args)
    given = [name for name in ("bcd", "cover", "partition") if getattr(args, name)]
    if len(given) != 1:
        raise _UsageError("verify wants exactly one of --bcd, --cover, --partition")
    kind = given[0]
    path = getattr(args, kind)
    inputs = {"graph": gdigest, kind: _digest_file(path)}
    if kind == "bcd":
        d = bcd_from_json(_load_json(path))
        rep = verify_bcd(g, d)
        checks = _report_checks(rep)
        measured = {
            "delta_used": rep.delta_measured,
            "w_measured": rep.w_measured,
            "supernodes": len(d.supernodes),
        }
    elif kind == "cover":
        cover = cover_from_json(_load_json(path))
        rep = verify_cover(g, cover)
        checks = _report_checks(rep)
        measured = {
            "beta": cover.beta, "diam": cover.diam, "s": cover.s,
            "padded_radius": rep.rho_star, "max_diameter": rep.max_diameter,
        }
    else:
        sp = partition_from_json(_load_json(path))
        checks, measured = _verify_partition_checks(g, sp)
    return RunReport(
        command="verify",
        inputs=inputs,
        parameters={"target": kind},
        measured=measured,
        checks=checks,
    )


def _cmd_report(args) -> RunReport:
    if args.suite != "acceptance":
        raise _UsageError(f"unknown suite {args.suite!r}; there is one suite: acceptance")
    results = run_acceptance(stream=sys.stderr)
    checks = {
        f"{res.number:02d} {res.name}": _check(res.passed, res.detail)
        for res in results
    }
    return RunReport(
        command="report",
        inputs={},
        parameters={"suite": "acceptance"},
        measured={"criteria": len(results)},
        checks=checks,
    )


# ---------------------------------------------------------------------------
# wiring

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsecover",
        description="sparse partition covers for minor-free graphs, verified end to end",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="generate a benchmark graph")
    p.add_argument("--family", required=True, choices=sorted(MINOR_FREE_R))
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--weights", default="unit", choices=WEIGHT_MODES)
    p.add_argument("--lo", type=float, default=1.0)
    p.add_argument("--hi", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("decompose", help="build and verify a buffered cop decomposition")
    p.add_argument("--graph")
    p.add_argument("--delta", type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--w", type=int)
    p.add_argument("--out")

    p = sub.add_parser("cover", help="build and verify a sparse partition cover")
    p.add_argument("--graph")
    p.add_argument("--bcd")
    p.add_argument("--delta", type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--w", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--preset", choices=("A", "B"), default="A")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--out")

    p = sub.add_parser("partition", help="clip a cover into one sparse partition and color it")
    p.add_argument("--graph")
    p.add_argument("--cover")
    p.add_argument("--out")

    p = sub.add_parser("embed", help="embed into l-infinity, write CSV plus sidecar")
    p.add_argument("--graph")
    p.add_argument("--r", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--mode", choices=("full", "3eps"), default="full")
    p.add_argument("--q", type=int)
    p.add_argument("--out")

    p = sub.add_parser("verify", help="re-verify a stored artifact against its graph")
    p.add_argument("--graph")
    p.add_argument("--bcd")
    p.add_argument("--cover")
    p.add_argument("--partition")
    p.add_argument("--out")

    p = sub.add_parser("report", help="run a verification suite and emit one table")
    p.add_argument("--suite", required=True)
    p.add_argument("--out")

    return parser


_HANDLERS = {
    "gen": _cmd_gen,
    "decompose": _cmd_decompose,
    "cover": _cmd_cover,
    "partition": _cmd_partition,
    "embed": _cmd_embed,
    "verify": _cmd_verify,
    "report": _cmd_report,
}


def run(argv=None) -> int:
    """Parse, execute, emit the report; the exit code, not a SystemExit."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        report = _HANDLERS[args.cmd](args)
    except _UsageError as exc:
        print(f"sparsecover {args.cmd}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        # bad inputs discovered past argparse: still an argument problem
        print(f"sparsecover {args.cmd}: {exc}", file=sys.stderr)
        return 2
    report.wall_time = time.perf_counter() - start
    payload = json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n"
    if args.cmd in ("verify", "report") and args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    print(f"wall time {report.wall_time:.2f}s", file=sys.stderr)
    return 0 if report.passed else 1


def main() -> None:  # console entry point
    sys.exit(run())
