"""Command-line driver.

Every run writes one JSON object (sweeps write CSV).  Floats are printed with
17 significant digits, keys are sorted and nothing time-dependent is
recorded, so identical configurations give byte-identical output.

Exit codes: 0 when every claim passes, 1 on any failure, 2 when a claim was
skipped because its hypotheses do not hold.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import covering as cov
from . import polytope as pt
from . import sphere, verify
from .families import FAMILIES, generate
from .rng import RngStream

EXIT_OK, EXIT_FAIL, EXIT_SKIPPED = 0, 1, 2


# ------------------------------------------------------------ output


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "inf" not in text:
        text += ".0"
    return text


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with 17-significant-digit floats and sorted keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, (np.integer,)):
        obj = int(obj)
    if isinstance(obj, (np.bool_,)):
        obj = bool(obj)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}


def _report(args, claims: list[verify.VerificationReport]) -> tuple[dict, int]:
    doc = {
        "version": __version__,
        "command": args.command,
        "config": _config(args),
        "seed": args.seed,
        "claims": [c.to_dict() for c in claims],
    }
    verdicts = [c.verdict for c in claims]
    if verify.FAIL in verdicts:
        code = EXIT_FAIL
    elif verify.SKIPPED in verdicts:
        code = EXIT_SKIPPED
    else:
        code = EXIT_OK
    return doc, code


def _result(args, result: dict) -> tuple[dict, int]:
    doc = {"version": __version__, "command": args.command, "config": _config(args), "seed": args.seed}
    doc.update(result)
    return doc, EXIT_OK


# ------------------------------------------------------------ inputs


def _polytope(args) -> pt.Polytope:
    if args.input:
        return pt.load_polytope(args.input)
    if not args.family:
        raise SystemExit("either --input or --family is required")
    if args.n is None:
        raise SystemExit("--n is required with --family")
    return generate(args.family, args.n, m=args.m, seed=args.seed, a=args.a, b=args.b, radius=args.radius)


def _delta(args, n: int) -> float:
    return args.delta if args.delta is not None else cov.default_delta(n)


def _cover(args, P: pt.Polytope) -> cov.CoveringCertificate:
    delta = _delta(args, P.dim)
    if getattr(args, "centers", None):
        return cov.verify_covering(P, json.loads(args.centers), delta, tau=args.tolerance)
    _, _, cert = cov.greedy_cover_upper(P, delta, RngStream(args.seed, "cover"))
    return cert


# ---------------------------------------------------------- commands


def cmd_cap_measure(args):
    n, h = args.n, args.h
    return _result(args, {
        "exact": sphere.exact_cap_measure(n, h),
        "prop2": sphere.prop2_bound(n, h) if 0 < h < 1 else None,
        "lemma5": sphere.lemma5_bound(n, h) if n >= 3 and 0 < h < 1 else None,
        "lemma5_log10": sphere.lemma5_bound_log10(n, h) if n >= 3 and 0 < h < 1 else None,
    })


def cmd_facets(args):
    P = _polytope(args)
    facets = P.facets
    return _result(args, {
        "dim": P.dim,
        "facet_count": len(facets),
        "vertex_count": len(P.extreme_points if isinstance(P, pt.PolytopeV) else P.vertices),
        "facets": [
            {"normal": f.normal.tolist(), "offset": f.offset, "incident_vertices": list(f.incident_vertices)}
            for f in facets
        ],
    })


def cmd_inradius(args):
    P = _polytope(args)
    return _result(args, {
        "dim": P.dim,
        "inradius": pt.inradius_at_origin(P),
        "circumradius": pt.circumradius_at_origin(P),
    })


def cmd_cover(args):
    P = _polytope(args)
    bounds = cov.covering_number_bounds(P, _delta(args, P.dim), RngStream(args.seed, "cover"), rounds=args.rounds)
    out = bounds.to_dict()
    out["notes"] = bounds.notes
    return _result(args, out)


def cmd_verify_theorem(args):
    if args.facet_count is not None:
        if args.n is None or args.N is None or args.r is None:
            raise SystemExit("synthetic mode needs --n, --N, --r and --facet-count")
        n_low = args.N_low if args.N_low is not None else args.N
        report = verify.check_theorem_inputs(args.n, args.facet_count, args.r, n_low, args.N, "synthetic")
        return _report(args, [report])
    P = _polytope(args)
    bounds = cov.covering_number_bounds(P, _delta(args, P.dim), RngStream(args.seed, "cover"), rounds=args.rounds)
    report = verify.check_theorem(P, bounds)
    report.details["covering"] = bounds.to_dict()
    return _report(args, [report])


def cmd_verify_prop1(args):
    P = _polytope(args)
    if isinstance(P, pt.PolytopeH):
        P = pt.PolytopeV(P.vertices)
    return _report(args, [verify.check_prop1(P, args.tolerance)])


def _sampled(args, check, claim, anchor):
    P = _polytope(args)
    cert = _cover(args, P)
    stream = RngStream(args.seed, claim)
    try:
        report = check(P, cert, args.epsilon, args.samples, stream, args.tolerance)
    except verify.CertificateNotCertified as exc:
        hyp = verify.HypothesisCheck("covering certified", False, {"status": cert.status, "message": str(exc)})
        report = verify.VerificationReport(claim, anchor, [hyp], None, None, verify.SKIPPED, {})
    except pt.OriginNotInterior as exc:
        hyp = verify.HypothesisCheck("0 in int(K)", False, {"message": str(exc)})
        report = verify.VerificationReport(claim, anchor, [hyp], None, None, verify.SKIPPED, {})
    report.details["certificate"] = cert.to_dict()
    return _report(args, [report])


def cmd_verify_prop3(args):
    return _sampled(args, verify.check_prop3, "prop3", "Prop 3")


def cmd_verify_prop4(args):
    return _sampled(args, verify.check_prop4, "prop4", "Prop 4")


def cmd_remark6(args):
    claims = [verify.remark6_consistency(args.n, args.N)]
    return _report(args, claims)


def cmd_sweep_bounds(args):
    rows = []
    steps = int(round(1.0 / args.h_step))
    for n in range(args.n_min, args.n_max + 1):
        for k in range(1, steps):
            h = round(k * args.h_step, 12)
            exact = sphere.exact_cap_measure(n, h)
            prop2 = sphere.prop2_bound(n, h)
            l5 = sphere.lemma5_bound(n, h) if n >= 3 else math.nan
            rows.append({
                "n": n,
                "h": h,
                "exact": exact,
                "prop2": prop2,
                "lemma5": l5,
                "lemma5_log10": sphere.lemma5_bound_log10(n, h) if n >= 3 else math.nan,
                "dominated": int(exact <= prop2 and (n < 3 or exact <= l5)),
            })
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = list(rows[0]) if rows else []
        writer.writerow(cols)
        for row in rows:
            writer.writerow([_fmt_float(v) if isinstance(v, float) else v for v in row.values()])
        return buf.getvalue(), EXIT_OK if all(r["dominated"] for r in rows) else EXIT_FAIL
    doc, _ = _result(args, {"rows": rows})
    return doc, EXIT_OK if all(r["dominated"] for r in rows) else EXIT_FAIL


def cmd_generate(args):
    P = _polytope(args)
    return pt.polytope_to_dict(P), EXIT_OK


# ------------------------------------------------------------ parser


def _add_source(p):
    p.add_argument("--input", help="polytope JSON file")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", type=int, help="dimension")
    p.add_argument("--m", type=int, default=100, help="points for random-hull")
    p.add_argument("--a", type=float, default=1.8, help="slab half-length")
    p.add_argument("--b", type=float, default=0.1, help="slab half-width")
    p.add_argument("--radius", type=float, default=1.0, help="random-hull radius")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="facetlab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help, source=True):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tolerance", type=float, default=pt.TAU)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="output path (default: stdout)")
        if source:
            _add_source(p)
        return p

    p = command("cap-measure", cmd_cap_measure, "exact cap measure and its two upper bounds", source=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=float, required=True)

    command("facets", cmd_facets, "enumerate facets")
    command("inradius", cmd_inradius, "inradius and circumradius about the origin")

    p = command("cover", cmd_cover, "covering number bounds with certificates")
    p.add_argument("--delta", type=float)
    p.add_argument("--rounds", type=int, default=32)

    p = command("verify-theorem", cmd_verify_theorem, "facet bound from inradius and covering number")
    p.add_argument("--delta", type=float)
    p.add_argument("--rounds", type=int, default=32)
    p.add_argument("--N", type=int, help="covering number (synthetic mode)")
    p.add_argument("--N-low", dest="N_low", type=int, help="lower covering bound (synthetic mode)")
    p.add_argument("--r", type=float, help="inradius (synthetic mode)")
    p.add_argument("--facet-count", dest="facet_count", type=int, help="facet count (synthetic mode)")

    command("verify-prop1", cmd_verify_prop1, "facets and vertices of P with rB inside P inside B")

    for name, func in (("verify-prop3", cmd_verify_prop3), ("verify-prop4", cmd_verify_prop4)):
        p = command(name, func, "sampled check on the eps-orthogonal set")
        p.add_argument("--epsilon", type=float, default=0.3)
        p.add_argument("--samples", type=int, default=100_000)
        p.add_argument("--delta", type=float)
        p.add_argument("--centers", help="JSON list of covering centres (default: greedy cover)")

    p = command("remark6", cmd_remark6, "r = 1 simplification against the full bound", source=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)

    p = command("sweep-bounds", cmd_sweep_bounds, "cap measure against both bounds on an (n, h) grid", source=False)
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--h-step", type=float, default=0.05)

    command("generate", cmd_generate, "write a polytope JSON file")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    doc, code = args.func(args)
    _emit(doc if isinstance(doc, str) else dumps(doc) + "\n", args.out)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
