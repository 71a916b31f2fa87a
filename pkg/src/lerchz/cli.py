"""Command-line front end: ``lerchz eval|zeros|trace|census|scan-line|fe-check``.

Exit codes: 0 success, 1 usage or domain error, 2 numerical failure
(precision loss, locator or refinement failure), 3 truncated trajectory.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from dataclasses import asdict

from . import __version__
from .catalog import Catalog, atomic_write, cplx, plot_csv, write_catalog, write_trajectory
from .census import census, line_scan, pair_scan
from .errors import DomainError, LerchError, NoConvergence, SingularJacobian, StepUnderflow
from .evaluate import ds_derivative, fe_grid, fe_residuals, lerch
from .trajectory import StepControl, detect_line_crossings, trace_L_zero, trace_Lprime_zero
from .types import DEFAULT_POLICY, Params
from .zeros import RectBox, locate_zeros, refine_zero

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_TRUNCATED = 0, 1, 2, 3
log = logging.getLogger("lerchz")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def parse_complex(text: str) -> complex:
    """Accept '2', '2+3i', '0.5-14.1j', ' 1 + 2 i '."""
    t = text.strip().replace(" ", "").replace("−", "-").replace("I", "i").replace("i", "j")
    try:
        return complex(t)
    except ValueError as exc:
        raise DomainError(f"cannot parse complex number {text!r}") from exc


def _policy(args):
    tol = getattr(args, "tol", None)
    return DEFAULT_POLICY if tol is None else DEFAULT_POLICY.with_tol(tol)


def _params(args):
    lam = args.lam
    alpha = lam if getattr(args, "alpha", None) is None else args.alpha
    return Params(lam, alpha)


def _header(args, extra=None):
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    meta = {"version": __version__, "config": cfg,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
    if extra:
        meta.update(extra)
    return meta


def _fmt(z: complex) -> str:
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.15g} {sign} {abs(z.imag):.15g}i"


# ---------------------------------------------------------------------------

def cmd_eval(args):
    params = _params(args)
    s = parse_complex(args.s)
    policy = _policy(args)
    if args.derivative == 0:
        res = lerch(params, s, policy)
    elif args.derivative in (1, 2):
        res = ds_derivative(params, s, args.derivative, policy)
    else:
        raise DomainError("--derivative must be 0, 1 or 2")
    print(f"value   {_fmt(res.value)}")
    print(f"error   {res.err_estimate:.3e}")
    print(f"method  {res.method.value}")
    return EXIT_OK


def cmd_zeros(args):
    params = _params(args)
    box = RectBox.parse(args.box)
    policy = _policy(args)
    recs = locate_zeros(box, args.kind, params, policy)
    meta = _header(args, {"params": {"lambda": params.lam, "alpha": params.alpha},
                          "kind": args.kind, "box": list(box.as_tuple()),
                          "policy": asdict(policy)})
    cat = Catalog(meta, recs)
    if args.out:
        write_catalog(cat, args.out, args.format)
    res = [r.residual for r in recs]
    print(f"zeros {len(recs)}")
    if recs:
        print(f"residual min {min(res):.3e} max {max(res):.3e}")
    if not args.out:
        for r in cat.records:
            print(f"  {_fmt(r.location)}  residual {r.residual:.2e}  mult {r.multiplicity}")
    return EXIT_OK


def cmd_trace(args):
    if not 0 < args.lambda_from <= 1 or not 0 < args.lambda_to <= 1:
        raise DomainError("lambda values must lie in (0, 1]")
    policy = _policy(args)
    start = parse_complex(args.start)
    p0 = Params(args.lambda_from, args.lambda_from)
    rec = refine_zero(start, args.kind, p0, policy)
    if abs(rec.location - start) > args.start_radius:
        raise NoConvergence(f"no zero within {args.start_radius} of {start} "
                            f"(nearest found at {rec.location})")
    ctrl = StepControl(h_init=args.h_init, grid=args.grid, bridge=args.bridge)
    tracer = trace_L_zero if args.kind == "L" else trace_Lprime_zero
    code = EXIT_OK
    try:
        traj = tracer(args.lambda_from, rec.location, args.lambda_to, ctrl, policy)
    except (SingularJacobian, StepUnderflow, NoConvergence) as exc:
        traj = getattr(exc, "partial", None)
        if traj is None:
            raise
        print(f"TRUNCATED: {exc}", file=sys.stderr)
        code = EXIT_TRUNCATED
    crossings = detect_line_crossings(traj)
    meta = _header(args, {"start_refined": cplx(rec.location)})
    write_trajectory(traj, args.out, meta, crossings)
    plot_path = args.plot_out or os.path.splitext(args.out)[0] + ".plot.csv"
    atomic_write(plot_path, plot_csv(traj, crossings))
    print(f"samples {len(traj)}  status {'TRUNCATED' if traj.truncated else 'COMPLETE'}")
    for lam, s in crossings:
        print(f"  crossing at lambda={lam:.7f}  s={_fmt(s)}")
    for before, after in traj.branch_points:
        print(f"  branch point bridged between lambda={before:.6f} and {after:.6f}")
    return code


def cmd_census(args):
    params = _params(args)
    policy = _policy(args)
    rep = census(params, args.T, args.U, args.eta, policy, args.sigma1)
    pairs = pair_scan(rep.zeros_L, args.eta, rep.box)
    out = {
        "metadata": _header(args),
        "params": {"lambda": params.lam, "alpha": params.alpha},
        "box_L": list(rep.box.as_tuple()),
        "box_Lprime": list(rep.box_Lprime.as_tuple()),
        "count_L": rep.count_L, "count_Lprime": rep.count_Lprime,
        "main_term_L": rep.main_term_L, "main_term_Lprime": rep.main_term_Lprime,
        "M": rep.M, "M_prime": rep.M_prime, "left_difference": rep.left_difference,
        "eta": rep.eta,
        "near_line": [cplx(z.location) for z in rep.near_line],
        "off_line": [cplx(z.location) for z in rep.off_line],
        "zeros_Lprime": [cplx(z.location) for z in rep.zeros_Lprime],
        "pairs": [{"rho": cplx(p.rho.location), "partner": cplx(p.partner_nearest.location),
                   "mirror": cplx(p.mirror_point), "mismatch": p.mismatch,
                   "self_paired": p.self_paired} for p in pairs.pairs],
        "unpaired": [cplx(z.location) for z in pairs.unpaired],
    }
    if args.out:
        atomic_write(args.out, json.dumps(out, indent=2, sort_keys=True) + "\n")
    print(f"L zeros {rep.count_L} (near line {len(rep.near_line)}, off line {len(rep.off_line)})")
    print(f"L' zeros {rep.count_Lprime}")
    print(f"left of line: M={rep.M}  M'={rep.M_prime}  |M-M'|={rep.left_difference}")
    for p in pairs.off_line_pairs:
        print(f"  pair {_fmt(p.rho.location)} -> {_fmt(p.partner_nearest.location)}"
              f"  mismatch {p.mismatch:.2e}")
    return EXIT_OK


def cmd_scan_line(args):
    params = _params(args)
    rows = line_scan(params, args.sigma, (args.t_from, args.t_to), args.step, _policy(args))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("t", "re_logderiv", "minus_log_t", "minus_half_log_t", "note"))
    for r in rows:
        w.writerow((repr(r.t), "" if r.value is None else repr(r.value),
                    repr(r.minus_log_t), repr(r.minus_half_log_t), r.note))
    if args.out:
        atomic_write(args.out, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_fe_check(args):
    lams = args.lam if args.lam else [0.3, 0.5, 0.7, 1.0]
    grid = fe_grid(args.points, args.seed)
    policy = _policy(args)
    report = {"metadata": _header(args), "threshold": args.threshold, "results": []}
    worst = 0.0
    for lam in lams:
        Params(lam, lam)
        r = fe_residuals(lam, grid, policy)
        worst = max(worst, float(r.max()))
        report["results"].append({"lambda": lam, "max_residual": float(r.max()),
                                  "points": len(grid)})
        print(f"lambda={lam:<6g} max residual {r.max():.3e} over {len(grid)} points")
    report["max_residual"] = worst
    report["passed"] = worst < args.threshold
    if args.out:
        atomic_write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"{'PASS' if worst < args.threshold else 'FAIL'}: max residual {worst:.3e}"
          f" (threshold {args.threshold:g})")
    return EXIT_OK if worst < args.threshold else EXIT_NUMERIC


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lerchz", description="Lerch zeta-function evaluation and zeros.")
    p.add_argument("--version", action="version", version=f"lerchz {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, alpha=True):
        sp.add_argument("--lambda", dest="lam", type=float, required=True)
        if alpha:
            sp.add_argument("--alpha", type=float, default=None,
                            help="defaults to the value of --lambda")
        sp.add_argument("--tol", type=float, default=None, help="target tolerance")

    sp = sub.add_parser("eval", help="evaluate L or an s-derivative")
    common(sp)
    sp.add_argument("--s", required=True, help='complex point, e.g. "0.5+14.13i"')
    sp.add_argument("--derivative", type=int, default=0, choices=(0, 1, 2))
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("zeros", help="locate zeros in a box and write a catalog")
    common(sp)
    sp.add_argument("--box", required=True, help='"sigma0,sigma1,t0,t1"')
    sp.add_argument("--kind", choices=("L", "Lprime"), default="L")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_zeros)

    sp = sub.add_parser("trace", help="follow a zero as lambda = alpha varies")
    sp.add_argument("--lambda-from", type=float, required=True)
    sp.add_argument("--lambda-to", type=float, required=True)
    sp.add_argument("--start", required=True)
    sp.add_argument("--kind", choices=("L", "Lprime"), default="L")
    sp.add_argument("--out", required=True)
    sp.add_argument("--plot-out")
    sp.add_argument("--grid", type=float, default=1e-3)
    sp.add_argument("--h-init", type=float, default=1e-3)
    sp.add_argument("--bridge", action="store_true",
                    help="continue through points where two paths meet (choice is a convention)")
    sp.add_argument("--start-radius", type=float, default=0.05,
                    help="the refined start must lie this close to --start")
    sp.add_argument("--tol", type=float, default=None)
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("census", help="zero census of L and L' in T < t < T + U")
    common(sp)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--U", type=float, required=True)
    sp.add_argument("--eta", type=float, default=1e-6)
    sp.add_argument("--sigma1", type=float, default=3.0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_census)

    sp = sub.add_parser("scan-line", help="Re L'/L along a vertical line")
    common(sp)
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--t-from", type=float, default=50.0)
    sp.add_argument("--t-to", type=float, default=200.0)
    sp.add_argument("--step", type=float, default=1.0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_scan_line)

    sp = sub.add_parser("fe-check", help="reflection-formula residuals on a random grid")
    sp.add_argument("--lambda", dest="lam", type=float, action="append",
                    help="lambda = alpha (repeatable; default 0.3 0.5 0.7 1)")
    sp.add_argument("--points", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threshold", type=float, default=1e-7)
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_fe_check)
    return p


_NEGATIVE_VALUE_OPTS = ("--box", "--s", "--start", "--sigma", "--lambda-to", "--t-from")


def _glue_negative_values(argv):
    """Turn ``--box -2,1.5,0,100`` into ``--box=-2,1.5,0,100`` so argparse keeps the value."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (tok in _NEGATIVE_VALUE_OPTS and nxt and nxt.startswith("-")
                and len(nxt) > 1 and (nxt[1].isdigit() or nxt[1] == ".")):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"lerchz: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"lerchz: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LerchError, ArithmeticError) as exc:
        print(f"lerchz: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
