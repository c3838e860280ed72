"""Command-line entry point: ``geosched {gen,reduce,solve,baseline,verify,report,cache}``.

Exit status is 0 on success, 1 on infeasibility or a failed guarantee, and 2
on usage or input-format errors.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import os
import sys
from fractions import Fraction

from . import io
from .audit import AuditError, audit_pipeline, brute_force_gsp
from .exact import MAX_SETS, InfeasibleCoverError, OracleCapError, exact_cover_bb
from .gencache import primal_dual_cache
from .generate import FAMILIES, GeneratorConfig, generate
from .gsp import DeadlineInfeasibleError, InfeasibleScheduleError, InvalidInstanceError, schedule_cost
from .kclp import CuttingPlaneError, pool_to_json
from .light import RoundingError
from .pipeline import PipelineError, solve
from .reduction import ReductionError, reduce_to_r2c, verify_cover
from .rounding import BETA

log = logging.getLogger("geosched")


def _seed(value):
    if value is not None:
        return value
    return int(os.environ.get("GEOSCHED_SEED", "0"))


def _beta(text: str) -> Fraction:
    try:
        beta = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")
    if not 0 < beta <= BETA:
        raise argparse.ArgumentTypeError("beta must lie in (0, 1/12]")
    return beta


def _emit(text: str, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_gen(args):
    cfg = GeneratorConfig(
        args.family, args.n, args.max_size, args.max_release,
        args.weight_lo, args.weight_hi, _seed(args.seed), args.allow_degenerate,
    )
    _emit(io.dumps(io.instance_to_json(generate(cfg))), args.output)
    return 0


def cmd_reduce(args):
    inst = io.instance_from_json(io.load(args.instance))
    _emit(io.dumps(io.r2c_to_json(reduce_to_r2c(inst))), args.output)
    return 0


def cmd_solve(args):
    inst = io.instance_from_json(io.load(args.instance))
    seed = _seed(args.seed)
    res = solve(inst, args.beta, seed, args.heavy_solver, args.jobs)
    doc = {
        "seed": seed,
        "beta": str(args.beta),
        "lp_value": res.lp.objective,
        "cover": io.cover_to_json(res.cover),
        "cover_weight": io.num(res.cover_weight),
        "schedule": io.schedule_to_json(res.schedule),
        "schedule_cost": io.num(res.schedule_cost),
    }
    _emit(io.dumps(doc), args.output)
    if args.emit_audit:
        report = audit_pipeline(inst, [seed], args.beta, args.heavy_solver)
        audit = report.to_dict()
        audit.pop("wall")
        audit["light_classes"] = [vars(a) for a in res.class_audits]
        with open(args.emit_audit, "w") as fh:
            fh.write(io.dumps(audit))
    if args.dump_lp:
        with open(args.dump_lp, "w") as fh:
            fh.write(io.dumps(pool_to_json(res.r2c, res.lp)))
    return 0


def cmd_baseline(args):
    inst = io.instance_from_json(io.load(args.instance))
    out = {}
    try:
        out["opt_gsp"], sched = brute_force_gsp(inst)
        out["schedule"] = io.schedule_to_json(sched)
    except OracleCapError as exc:
        log.warning("GSP oracle skipped: %s", exc)
    r2c = reduce_to_r2c(inst)
    if len(r2c.rects) <= MAX_SETS:
        res = exact_cover_bb(r2c)
        out["opt_r2c"] = res.weight
        out["r2c_cover"] = sorted(res.ids)
    else:
        log.warning("R2C oracle skipped: %d rectangles", len(r2c.rects))
    if args.json:
        _emit(io.dumps(out), args.output)
    else:
        lines = []
        if "opt_gsp" in out:
            lines.append(f"OPT {out['opt_gsp']}")
        if "opt_r2c" in out:
            lines.append(f"OPT_R2C {out['opt_r2c']}")
        _emit("\n".join(lines) + "\n", args.output)
    return 0 if out else 1


def cmd_verify(args):
    inst = io.instance_from_json(io.load(args.instance))
    sol = io.load(args.solution)
    r2c = reduce_to_r2c(inst)
    ok = True
    if "cover" in sol:
        cover = io.cover_from_json(sol["cover"])
        report = verify_cover(r2c, cover)
        if not report.feasible:
            print(f"cover infeasible: point {report.witness} unknown {report.unknown}")
            ok = False
        elif "cover_weight" in sol and io.to_int(sol["cover_weight"]) != report.weight:
            print(f"cover weight {report.weight} differs from claimed {sol['cover_weight']}")
            ok = False
        else:
            print(f"cover feasible, weight {report.weight}")
    if "schedule" in sol:
        sched = io.schedule_from_json(sol["schedule"])
        try:
            cost = schedule_cost(inst, sched)
        except InfeasibleScheduleError as exc:
            print(f"schedule infeasible: {exc}")
            ok = False
        else:
            if "schedule_cost" in sol and io.to_int(sol["schedule_cost"]) != cost:
                print(f"schedule cost {cost} differs from claimed {sol['schedule_cost']}")
                ok = False
            else:
                print(f"schedule feasible, cost {cost}")
    return 0 if ok else 1


REPORT_FIELDS = [
    "file", "n", "weights", "seed", "points", "rects", "lp_value", "cover_weight",
    "schedule_cost", "opt_gsp", "opt_r2c", "schedule/opt_gsp", "cover/lp",
]


def _row(path, audit):
    row = {"file": os.path.basename(path), "seed": audit["seed"]}
    row["n"] = audit["instance"]["n"]
    row["weights"] = audit["instance"]["weights"]
    for key in ("points", "rects", "lp_value", "cover_weight", "schedule_cost", "opt_gsp", "opt_r2c"):
        row[key] = audit.get(key)
    for key in ("schedule/opt_gsp", "cover/lp"):
        row[key] = audit["ratios"].get(key)
    return row


def cmd_report(args):
    rows = [_row(p, io.load(p)) for p in args.audits]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, REPORT_FIELDS)
            writer.writeheader()
            writer.writerows(rows)
    fmt = lambda v: f"{v:.3f}" if isinstance(v, float) else ("" if v is None else str(v))
    buf = _io.StringIO()
    buf.write("| " + " | ".join(REPORT_FIELDS) + " |\n")
    buf.write("|" + "---|" * len(REPORT_FIELDS) + "\n")
    for row in rows:
        buf.write("| " + " | ".join(fmt(row[k]) for k in REPORT_FIELDS) + " |\n")
    ratios = [r["schedule/opt_gsp"] for r in rows if r["schedule/opt_gsp"] is not None]
    if ratios:
        buf.write(f"\nschedule/OPT over {len(ratios)} audits: max {max(ratios):.3f}, "
                  f"mean {sum(ratios) / len(ratios):.3f}\n")
    _emit(buf.getvalue(), args.markdown)
    return 0


def cmd_cache(args):
    inst = io.caching_from_json(io.load(args.instance))
    sol = primal_dual_cache(inst)
    doc = {"chosen": sorted(sol.ids), "weight": sol.weight, "dual": float(sol.dual)}
    _emit(io.dumps(doc), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geosched", description="Preemptive scheduling with monotone costs via geometric covering.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a random instance")
    g.add_argument("--family", choices=FAMILIES, default="wflow")
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--max-size", type=int, default=3)
    g.add_argument("--max-release", type=int, default=3)
    g.add_argument("--weight-lo", type=int, default=1)
    g.add_argument("--weight-hi", type=int, default=8)
    g.add_argument("--seed", type=int)
    g.add_argument("--allow-degenerate", action="store_true")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("reduce", help="write the rectangle-cover instance")
    r.add_argument("instance")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("solve", help="run the full rounding pipeline")
    s.add_argument("instance")
    s.add_argument("--beta", type=_beta, default=BETA)
    s.add_argument("--seed", type=int)
    s.add_argument("--heavy-solver", choices=("greedy", "exact"), default="greedy")
    s.add_argument("--emit-audit", metavar="PATH")
    s.add_argument("--dump-lp", metavar="PATH")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("baseline", help="exact optima for small instances")
    b.add_argument("instance")
    b.add_argument("--json", action="store_true")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_baseline)

    v = sub.add_parser("verify", help="check a solution file against an instance")
    v.add_argument("instance")
    v.add_argument("solution")
    v.set_defaults(func=cmd_verify)

    rp = sub.add_parser("report", help="tabulate audit files")
    rp.add_argument("audits", nargs="+")
    rp.add_argument("--csv")
    rp.add_argument("--markdown")
    rp.set_defaults(func=cmd_report)

    c = sub.add_parser("cache", help="solve a generalized caching instance")
    c.add_argument("instance")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_cache)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (io.DocumentError, InvalidInstanceError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        AuditError, PipelineError, ReductionError, RoundingError, CuttingPlaneError,
        DeadlineInfeasibleError, InfeasibleCoverError, OracleCapError, AssertionError, ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
