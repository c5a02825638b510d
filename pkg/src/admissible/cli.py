"""Command-line front end: ``admissible {classify,region,growth,verify}``.

Exit codes: 0 completed, 2 input error, 3 geometry or sampling failure,
4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .errors import CatalogError, DimensionError, GeometryError, InvariantError, ParseError, SamplingError
from .expr import catalog, function
from .geometry import Ellipsoid, GraphDomain, UnitBall, boundary_frame
from .limits import DEFAULTS, classify, ext_to_json, growth_verdict, _jsonable
from .regions import FAMILIES, RegionSpec, format_region, parse_region, parse_vertex, sample_region

SCHEMA = 1
EXIT_OK, EXIT_INPUT, EXIT_GEOMETRY, EXIT_INVARIANT = 0, 2, 3, 4


class InputError(ValueError):
    pass


def parse_domain(text: str, dim: int = 2):
    """``ball:<n>``, ``ellipsoid:a1,a2,...``, ``graph:<psi>``, ``paraboloid``, ``flat``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip()
    if kind == "ball":
        try:
            n = int(arg)
        except ValueError:
            raise InputError(f"ball needs an integer dimension, got {arg!r}") from None
        return UnitBall(n)
    if kind == "ellipsoid":
        try:
            return Ellipsoid([float(a) for a in arg.split(",")])
        except ValueError:
            raise InputError(f"cannot parse semi-axes {arg!r}") from None
    if kind == "graph":
        return GraphDomain.from_text(arg, dim)
    if kind == "paraboloid":
        return GraphDomain.paraboloid(dim, float(arg) if arg else 0.25)
    if kind == "flat":
        return GraphDomain.flat(dim)
    raise InputError(f"unknown domain {text!r}; use ball:<n>, ellipsoid:<axes>, graph:<psi>, paraboloid or flat")


def _floats(text):
    try:
        return [float(a) for a in text.split(",") if a.strip()]
    except ValueError:
        raise InputError(f"cannot parse number list {text!r}") from None


def _default_vertex(D):
    if isinstance(D, GraphDomain):
        return np.zeros(D.dim, dtype=complex)
    v = np.zeros(D.dim, dtype=complex)
    v[0] = D.axes[0]
    return v


def _setup(args):
    D = parse_domain(args.domain, args.dim)
    xi = parse_vertex(args.vertex) if args.vertex else _default_vertex(D)
    if len(xi) != D.dim:
        raise InputError(f"vertex has {len(xi)} coordinates, domain has dimension {D.dim}")
    return D, xi


def _function(args, arity):
    if args.function is not None and args.catalog is not None:
        raise InputError("give either --function or --catalog, not both")
    if args.function is not None:
        return function(args.function, arity)
    if args.catalog is not None:
        return catalog(args.catalog, arity)
    raise InputError("one of --function or --catalog is required")


def _config(args, D, xi, **extra):
    cfg = {
        "function": getattr(args, "function", None),
        "catalog": getattr(args, "catalog", None),
        "domain": D.label,
        "vertex": [ext_to_json(c) for c in xi],
        "seed": args.seed,
        "tol": args.tol,
    }
    cfg.update(extra)
    return cfg


def _report(command, config, body):
    return {
        "tool": "admissible",
        "version": __version__,
        "schema": SCHEMA,
        "command": command,
        "config": config,
        "thresholds": dict(DEFAULTS),
        "empirical": True,
        "result": body,
    }


def _dump_json(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _text_summary(report):
    r = report["result"]
    adm = r["admissible"]
    lines = [
        f"function: {report['config']['function'] or report['config']['catalog']}",
        f"normal limit: {r['normal_limit']['value']} (converged={r['normal_limit']['converged']})",
        f"admissible: {adm['status']}" + (f" {adm['value']}" if "value" in adm else "")
        + (f" witness={adm['witness']['path']['kind']} alpha={adm['witness']['alpha']}" if "witness" in adm else ""),
        f"criterion_t1: {r['criterion_t1']['status']} liminf={r['criterion_t1']['liminf']:.6g}",
        f"growth: normal {r['growth']['normal']['label']}(1/d), tangential {r['growth']['tangential']['label']}(1/sqrt d)"
        f" -> {r['growth']['prediction']}",
    ]
    if "lindelof" in r:
        lines.append(f"lindelof: {r['lindelof']['status']}")
    if "single_region" in r:
        lines.append(f"single_region: {r['single_region']['status']}")
    lines.append("flags: " + ", ".join(f"{k}={v}" for k, v in sorted(r["theorem_flags"].items())))
    return "\n".join(lines) + "\n"


def cmd_classify(args):
    D, xi = _setup(args)
    f = _function(args, D.dim)
    alphas = _floats(args.alphas)
    if not alphas:
        raise InputError("--alphas must list at least one aperture")
    verdict = classify(f, D, xi, alphas, tol=args.tol, seed=args.seed, K=args.K,
                       omit_samples=args.omit_samples, theorems=not args.no_theorems)
    cfg = _config(args, D, xi, alphas=alphas, K=args.K, omit_samples=args.omit_samples,
                  theorems=not args.no_theorems)
    report = _report("classify", cfg, verdict.to_dict())
    if not (report["result"]["theorem_flags"]["limit_excludes_criterion_violation"]
            and report["result"]["theorem_flags"]["criterion_violation_excludes_limit"]):
        _write(args, _dump_json(report))
        raise InvariantError("criterion and admissible verdicts are inconsistent")
    _write(args, _text_summary(report) if args.format == "text" else _dump_json(report))
    return EXIT_OK


def _fmt(x):
    return format(float(x), ".17g")


def cmd_region(args):
    D, xi = _setup(args)
    specs = []
    for text in args.region:
        try:
            specs.append(parse_region(text, D))
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if not specs:
        fams = [f for f in FAMILIES if D.dim > 1 or not f == "ball_koranyi"]
        fams = [f for f in fams if not f.startswith("disc_") or (isinstance(D, UnitBall) and D.dim == 1)]
        specs = [RegionSpec(f, 2.0 if f != "disc_angular" else 1.0, tuple(xi), D) for f in fams]
    if args.sample is not None:
        pts = sample_region(specs[0], args.sample, args.count, args.seed).points
    else:
        k = args.grid
        frame = boundary_frame(D, xi)
        half = args.extent
        s = np.linspace(-half, half, k)
        X, Y = np.meshgrid(s, s, indexing="ij")
        # slice through the complex normal line at the vertex
        pts = frame.vertex[None, :] + (X.ravel() + 1j * Y.ravel())[:, None] * frame.normal[None, :]
        pts = pts - half * frame.normal[None, :]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = []
    for j in range(D.dim):
        header += [f"re_z{j + 1}", f"im_z{j + 1}"]
    header += [format_region(r) for r in specs]
    w.writerow(header)
    member = [np.atleast_1d(r.contains(pts)) for r in specs]
    for i, z in enumerate(pts):
        row = []
        for c in z:
            row += [_fmt(c.real), _fmt(c.imag)]
        row += ["1" if m[i] else "0" for m in member]
        w.writerow(row)
    if args.format == "json":
        cfg = _config(args, D, xi, regions=[format_region(r) for r in specs], grid=args.grid,
                      sample=args.sample, count=args.count)
        body = {"points": len(pts), "members": {format_region(r): int(m.sum()) for r, m in zip(specs, member)}}
        _write(args, _dump_json(_report("region", cfg, body)))
    else:
        _write(args, buf.getvalue())
    return EXIT_OK


def cmd_growth(args):
    D, xi = _setup(args)
    f = _function(args, D.dim)
    rep = growth_verdict(f, D, xi, args.alpha, seed=args.seed)
    cfg = _config(args, D, xi, alpha=args.alpha)
    report = _report("growth", cfg, rep)
    if args.format == "text":
        text = (f"normal: exponent {rep['normal']['fit']['exponent']:.4f}, {rep['normal']['label']}(1/d)\n"
                f"tangential: exponent {rep['tangential']['fit']['exponent']:.4f}, "
                f"{rep['tangential']['label']}(1/sqrt d)\nprediction: {rep['prediction']}\n")
        _write(args, text)
    else:
        _write(args, _dump_json(report))
    return EXIT_OK


def cmd_verify(args):
    from .verify import broken_frame, run_properties

    summary = run_properties(args.filter, args.seed, broken_frame if args.inject_bad_frame else None)
    if args.format == "text":
        lines = [f"{'PASS' if r['passed'] else 'FAIL'} {r['name']}" for r in summary["results"]]
        lines.append(f"{summary['passed']}/{summary['total']} passed")
        _write(args, "\n".join(lines) + "\n")
    else:
        _write(args, _dump_json(_report("verify", {"seed": args.seed, "filter": args.filter}, summary)))
    return EXIT_OK if summary["failed"] == 0 else EXIT_INVARIANT


def build_parser():
    p = argparse.ArgumentParser(prog="admissible", description="Empirical boundary-limit analysis of holomorphic functions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_function=True):
        if needs_function:
            sp.add_argument("--function", help="function text in z1..zn")
            sp.add_argument("--catalog", help="catalog name or constant(<expr>)")
        sp.add_argument("--domain", default="ball:2", help="ball:<n> | ellipsoid:<axes> | graph:<psi> | paraboloid | flat")
        sp.add_argument("--dim", type=int, default=2, help="dimension for graph/paraboloid/flat domains")
        sp.add_argument("--vertex", help='boundary point, e.g. "(1,0)"')
        sp.add_argument("--tol", type=float, default=DEFAULTS["tol"])
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="output file (default stdout)")

    c = sub.add_parser("classify", help="full verdict for one function at one vertex")
    common(c)
    c.add_argument("--alphas", default="1,2,4,8")
    c.add_argument("--K", type=float, default=DEFAULTS["K"])
    c.add_argument("--omit-samples", type=int, default=100_000)
    c.add_argument("--no-theorems", action="store_true", help="skip the Lindelof-type checks")
    c.add_argument("--format", choices=("json", "text"), default="json")
    c.set_defaults(run=cmd_classify)

    r = sub.add_parser("region", help="CSV of region membership on a grid or a sample")
    common(r, needs_function=False)
    r.add_argument("--region", action="append", default=[], help='e.g. "koranyi:alpha=2@xi=(1,0)"')
    r.add_argument("--grid", type=int, default=100, help="grid points per axis on the normal slice")
    r.add_argument("--extent", type=float, default=0.5, help="half-width of the grid slice")
    r.add_argument("--sample", type=float, help="sample the first region at this boundary distance")
    r.add_argument("--count", type=int, default=1000)
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.set_defaults(run=cmd_region)

    g = sub.add_parser("growth", help="growth exponents of the directional spherical derivatives")
    common(g)
    g.add_argument("--alpha", type=float, default=3.0)
    g.add_argument("--format", choices=("json", "text"), default="json")
    g.set_defaults(run=cmd_growth)

    v = sub.add_parser("verify", help="run the seeded invariant suite")
    v.add_argument("--filter", help="substring of property names, e.g. chains")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--out")
    v.add_argument("--format", choices=("json", "text"), default="text")
    v.add_argument("--inject-bad-frame", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(run=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.run(args)
    except InvariantError as exc:
        print(f"error: invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (GeometryError, SamplingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except (ParseError, CatalogError, DimensionError, InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
