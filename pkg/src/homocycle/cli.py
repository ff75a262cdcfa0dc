"""Command-line entry point: ``homocycle analyze|census|verify|conditions|oracle GRAPH``."""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from . import analysis, report
from .errors import GraphFormatError, HomocycleError
from .graph import load_graph

log = logging.getLogger("homocycle")


def _t_grid(text: str) -> tuple:
    """``8,10,12`` or ``start:stop:step`` (inclusive)."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        start, stop, step = (Fraction(x) for x in text.split(":"))
        if step <= 0:
            raise argparse.ArgumentTypeError("step must be positive")
        out = []
        t = start
        while t <= stop:
            out.append(t)
            t += step
    else:
        out = [Fraction(x) for x in text.split(",")]
    return tuple(int(t) if t.denominator == 1 else float(t) for t in out)


def _classes(text: str) -> tuple:
    """``0,0;1,0;-1,2``; an empty string gives an empty window."""
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(tuple(int(x) for x in part.split(",")) for part in text.split(";"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad class list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="homocycle", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("graph", help="graph document (JSON)")
        sp.add_argument("--out", default="-", help="output path (default stdout)")
        sp.add_argument("--mode", choices=["normalized", "paper"], default="normalized")
        sp.add_argument("--s-step", type=float, default=analysis.DEFAULT_S_STEP)
        sp.add_argument("--u-step", type=float, default=analysis.DEFAULT_U_STEP)
        sp.add_argument("--alpha-radius", type=int, default=3)
        sp.add_argument("--classes", type=_classes, default=None,
                        help="explicit class list, e.g. '0,0;1,0'")
        sp.add_argument("--tgrid", type=_t_grid, default=analysis.DEFAULT_T_GRID,
                        help="T values: '8,10,12' or '8:18:2'")
        sp.add_argument("--tmax", type=Fraction, default=None,
                        help="drop grid values above this T (and add it if missing)")
        sp.add_argument("--nmax", type=int, default=None, help="census period bound")
        sp.add_argument("--budget-mb", type=float, default=512.0)
        sp.add_argument("--threads", type=int, default=None)
        return sp

    common(sub.add_parser("analyze", help="entropy, beta tensors and expansion coefficients"))
    c = common(sub.add_parser("census", help="exact prime-cycle counts pi(T, alpha)"))
    c.add_argument("--format", choices=["csv", "json"], default="csv")
    v = common(sub.add_parser("verify", help="census against the normalized expansion"))
    v.add_argument("--csv", default=None, help="also write the residual table as CSV")
    common(sub.add_parser("conditions", help="non-lattice and Diophantine diagnostics"))
    common(sub.add_parser("oracle", help="closed forms for the rose and two-loop graphs"))
    return p


def config_from(args) -> analysis.AnalysisConfig:
    grid = tuple(args.tgrid)
    if args.tmax is not None:
        tmax = args.tmax
        grid = tuple(T for T in grid if Fraction(str(T)) <= tmax)
        if not grid or Fraction(str(grid[-1])) != tmax:
            grid = grid + ((int(tmax) if tmax.denominator == 1 else float(tmax)),)
    return analysis.AnalysisConfig(
        mode=args.mode,
        s_step=args.s_step,
        u_step=args.u_step,
        n_max=args.nmax,
        budget_mb=args.budget_mb,
        t_grid=grid,
        alpha_radius=args.alpha_radius,
        classes=args.classes,
        threads=args.threads,
    )


def run(args) -> int:
    try:
        config = config_from(args)
    except ValueError as exc:
        raise GraphFormatError(f"bad configuration: {exc}") from None
    g = load_graph(args.graph)
    cmd = args.command
    if cmd == "analyze":
        report.write_text(args.out, report.dumps(analysis.analyze(g, config)))
    elif cmd == "census":
        doc, rows = analysis.census_rows(g, config)
        if args.format == "json":
            report.write_text(args.out, report.dumps(doc))
        else:
            b = len(rows[0][1]) if rows else 0
            header = ["T"] + [f"alpha{i + 1}" for i in range(b)] + ["count"]
            body = [[T, *a, n] for T, a, n in rows]
            report.write_text(args.out, report.csv_text(header, body))
    elif cmd == "verify":
        if config.mode != "normalized":
            raise GraphFormatError("verify compares against the normalized expansion; use --mode normalized")
        doc = analysis.verify(g, config)
        for w in doc["warnings"]:
            print(f"warning: {w}", file=sys.stderr)
        report.write_text(args.out, report.dumps(doc))
        if args.csv:
            rows = doc["rows"]
            b = len(rows[0].alpha) if rows else 0
            header = (["T"] + [f"alpha{i + 1}" for i in range(b)]
                      + ["empirical", "zeroth", "first", "resid_zeroth", "resid_first"])
            body = [[r.T, *r.alpha, r.empirical, r.zeroth, r.first, r.resid_zeroth, r.resid_first]
                    for r in rows]
            report.write_text(args.csv, report.csv_text(header, body))
    elif cmd == "conditions":
        report.write_text(args.out, report.dumps(analysis.conditions(g, config)))
    elif cmd == "oracle":
        report.write_text(args.out, report.dumps(analysis.oracle(g, config)))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return run(args)
    except HomocycleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
