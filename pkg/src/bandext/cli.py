"""Command-line front end.

Subcommands: ``bound``, ``extend``, ``verify``, ``roundtrip``, ``sweep``,
``decay``.  Tables go to standard output (or ``--output``) as CSV by default,
as one JSON document with ``--json``; diagnostics go to standard error.

Exit codes: 0 success, 1 a check failed (verify FAIL, sweep/decay invariant),
2 infeasible density, 3 unreadable density file, 4 quadrature failure,
64 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .density import Density, Verdict, check_feasibility
from .errors import (
    DecayViolationError,
    DomainError,
    InfeasibleDensityError,
    NonConvergenceError,
    ParseError,
    SupportOverlapError,
)
from .extremal import gap_ratios, positive_alpha_decay, sweep
from .io import atomic_write, csv_table, json_document, load_density, resolve_output
from .kernels import Band, argmax_envelope, envelope, lambda_bound
from .parametrization import band_grid, extend, verify_constancy
from .quadrature import QuadratureConfig
from .samples import random_feasible_density

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INFEASIBLE = 2
EXIT_PARSE = 3
EXIT_NONCONVERGENCE = 4
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    band: Band
    quadrature: QuadratureConfig
    grid_size: int = 256
    output_format: str = "csv"
    output_path: str | None = None
    seed: int = 0
    threads: int | None = None

    def __post_init__(self):
        if self.grid_size < 16:
            raise UsageError("--grid-size must be at least 16")
        if self.output_format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if self.seed < 0:
            raise UsageError("--seed must be a nonnegative integer")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _band(text: str) -> Band:
    try:
        return Band.parse(text)
    except (DomainError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--band", type=_band, required=True, help="band edges 'a,b' with 0 < a < b")
    common.add_argument("--grid-size", type=int, default=None, help="points on the band (>= 16)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--json", action="store_true", help="single JSON document (same as --format json)")
    common.add_argument("--output", "-o", default=None, help="output file (default: standard output)")
    common.add_argument("--threads", type=int, default=None, help="cap on worker threads")
    q = common.add_argument_group("quadrature")
    q.add_argument("--rel-tol", type=float, default=None)
    q.add_argument("--abs-tol", type=float, default=None)
    q.add_argument("--max-subdivisions", type=int, default=None)
    q.add_argument("--tail-cutoff-factor", type=float, default=None)
    q.add_argument("--pv-window", type=float, default=None)

    parser = _Parser(prog="bandext", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"bandext {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("bound", parents=[common], help="extremal bound, maximiser and envelope")

    p = sub.add_parser("extend", parents=[common], help="complete a density onto the band")
    p.add_argument("density", help="density JSON file")

    p = sub.add_parser("verify", parents=[common], help="round-trip constancy check")
    p.add_argument("density", help="density JSON file")
    p.add_argument("--n-check", type=int, default=17)
    p.add_argument("--tol", type=float, default=1e-3, help="relative tolerance on the level (default 1e-3)")
    p.add_argument("--perturb", type=float, default=1.0, help="debug only: scale the completed values")

    p = sub.add_parser("roundtrip", parents=[common], help="verify over seeded random densities")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-check", type=int, default=17)
    p.add_argument("--tol", type=float, default=1e-3)

    p = sub.add_parser("sweep", parents=[common], help="near-extremal family over an epsilon schedule")
    p.add_argument("--eps", type=_float_list, required=True, help="comma-separated epsilons in (0, a/2)")

    p = sub.add_parser("decay", parents=[common], help="positive-level family pushed to infinity")
    p.add_argument("--radii", type=_float_list, required=True, help="comma-separated radii R > b")
    return parser


def _run_config(args, default_grid: int) -> RunConfig:
    try:
        cfg = QuadratureConfig().with_overrides(
            rel_tol=args.rel_tol,
            abs_tol=args.abs_tol,
            max_subdivisions=args.max_subdivisions,
            tail_cutoff_factor=args.tail_cutoff_factor,
            pv_window=args.pv_window,
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    return RunConfig(
        band=args.band,
        quadrature=cfg,
        grid_size=args.grid_size if args.grid_size is not None else default_grid,
        output_format="json" if args.json else args.format,
        output_path=args.output,
        seed=getattr(args, "seed", 0),
        threads=args.threads,
    )


def _emit(run: RunConfig, text: str) -> None:
    if run.output_path:
        path = atomic_write(resolve_output(run.output_path), text)
        print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _band_meta(band: Band) -> dict:
    return {"a": band.a, "b": band.b}


def cmd_bound(run: RunConfig) -> int:
    band = run.band
    lam = lambda_bound(band)
    xstar = argmax_envelope(band)
    x = np.concatenate([[band.a], band_grid(band, run.grid_size)[0], [band.b]])
    env = envelope(x, band)
    if run.output_format == "json":
        _emit(run, json_document({
            "command": "bound", "band": _band_meta(band), "lambda": lam, "xstar": xstar,
            "envelope": {"x": x, "value": env},
        }))
    else:
        _emit(run, csv_table(["x", "envelope"], zip(x, env), {"lambda": lam, "xstar": xstar}))
    print(f"lambda={lam:.12g} xstar={xstar:.12g}", file=sys.stderr)
    return EXIT_OK


def _feasible_density(path: str, band: Band, cfg: QuadratureConfig):
    v = load_density(path)
    report = check_feasibility(v, band, cfg)
    if report.condition_one.verdict is Verdict.VIOLATED:
        raise InfeasibleDensityError("; ".join(report.notes) or "endpoint condition violated")
    if report.condition_one.verdict is Verdict.UNDECIDABLE:
        raise NonConvergenceError("; ".join(report.notes))
    return v, report


def _feasibility_preamble(report) -> dict:
    return {
        "condition_one": report.condition_one.verdict.value,
        "condition_one_value": report.condition_one.value,
        "corollary_condition": report.corollary_condition.verdict.value,
        "corollary_value": report.corollary_condition.value,
    }


def cmd_extend(run: RunConfig, args) -> int:
    v, report = _feasible_density(args.density, run.band, run.quadrature)
    res = extend(v, run.band, run.grid_size, run.quadrature)
    if run.output_format == "json":
        doc = {"command": "extend", "feasibility": report.to_dict()}
        doc.update(res.to_dict())
        _emit(run, json_document(doc))
    else:
        pre = {"band": f"{run.band.a:.12g},{run.band.b:.12g}", **_feasibility_preamble(report)}
        pre.update(alpha=res.alpha, alpha_error=res.alpha_error, sup_norm=res.sup_norm)
        rows = zip(res.grid, res.values, res.error_estimates)
        _emit(run, csv_table(["x", "v_ext", "err"], rows, pre))
    print(f"alpha={res.alpha:.12g} sup_norm={res.sup_norm:.12g}", file=sys.stderr)
    return EXIT_OK


def _verify_one(v: Density, run: RunConfig, n_check: int, perturb: float = 1.0):
    return verify_constancy(v, run.band, n_check, run.quadrature, grid_size=run.grid_size, perturb=perturb)


def cmd_verify(run: RunConfig, args) -> int:
    v, report = _feasible_density(args.density, run.band, run.quadrature)
    rep = _verify_one(v, run, args.n_check, args.perturb)
    ok = rep.passes(args.tol)
    verdict = "PASS" if ok else "FAIL"
    if run.output_format == "json":
        doc = {"command": "verify", "verdict": verdict, "tol": args.tol, "perturb": args.perturb}
        doc.update(rep.to_dict())
        _emit(run, json_document(doc))
    else:
        pre = {
            "alpha": rep.alpha,
            "alpha_measured": rep.alpha_measured,
            "max_deviation": rep.max_deviation,
            "tol": args.tol,
            "verdict": verdict,
        }
        rows = zip(rep.check_points, rep.hilbert_values, rep.hilbert_errors)
        _emit(run, csv_table(["x", "hilbert", "err"], rows, pre))
    print(
        f"alpha={rep.alpha:.12g} alpha_measured={rep.alpha_measured:.12g} "
        f"max_deviation={rep.max_deviation:.12g} {verdict}",
        file=sys.stderr,
    )
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_roundtrip(run: RunConfig, args) -> int:
    rng = np.random.default_rng(run.seed)
    rows = []
    all_ok = True
    for i in range(args.count):
        v = random_feasible_density(rng, run.band)
        rep = _verify_one(v, run, args.n_check)
        ok = rep.passes(args.tol)
        all_ok &= ok
        rows.append({
            "trial": i, "segments": len(v), "alpha": rep.alpha, "alpha_measured": rep.alpha_measured,
            "max_deviation": rep.max_deviation, "verdict": "PASS" if ok else "FAIL",
        })
    cols = ["trial", "segments", "alpha", "alpha_measured", "max_deviation", "verdict"]
    if run.output_format == "json":
        _emit(run, json_document({"command": "roundtrip", "seed": run.seed, "tol": args.tol, "trials": rows}))
    else:
        _emit(run, csv_table(cols, rows, {"seed": run.seed, "tol": args.tol}))
    print("roundtrip " + ("PASS" if all_ok else "FAIL"), file=sys.stderr)
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def cmd_sweep(run: RunConfig, args) -> int:
    if not args.eps:
        raise UsageError("empty epsilon schedule")
    for e in args.eps:
        if not 0 < e < run.band.a / 2:
            raise UsageError(f"epsilon {e:g} outside (0, a/2)")
    records = sweep(args.eps, run.band, run.grid_size, run.quadrature, threads=run.threads)
    ratios = gap_ratios(records)
    lam = lambda_bound(run.band)

    problems = []
    for r in records:
        if not r.gap > -r.error:
            problems.append(f"eps={r.epsilon:g}: sup_norm below the bound")
        if abs(r.alpha + 1.0) > 1e-8:
            problems.append(f"eps={r.epsilon:g}: level {r.alpha:.12g} != -1")
    for r0, r1 in zip(records, records[1:]):
        if not r1.gap < r0.gap:
            problems.append(f"gap not decreasing from eps={r0.epsilon:g} to eps={r1.epsilon:g}")

    cols = ["epsilon", "alpha", "sup_norm", "gap", "l1", "l2", "l4", "err"]
    if run.output_format == "json":
        _emit(run, json_document({
            "command": "sweep", "band": _band_meta(run.band), "lambda": lam,
            "records": [r.to_row() for r in records], "gap_ratios": ratios, "problems": problems,
        }))
    else:
        _emit(run, csv_table(cols, [r.to_row() for r in records], {"lambda": lam}))
    print(f"final gap={records[-1].gap:.12g} (lambda={lam:.12g})", file=sys.stderr)
    print("gap ratios: " + ", ".join(f"{q:.6g}" for q in ratios), file=sys.stderr)
    for msg in problems:
        print(f"invariant failed: {msg}", file=sys.stderr)
    return EXIT_CHECK_FAILED if problems else EXIT_OK


def cmd_decay(run: RunConfig, args) -> int:
    if not args.radii:
        raise UsageError("empty radius schedule")
    for R in args.radii:
        if not R > run.band.b:
            raise UsageError(f"radius {R:g} must exceed b")
    records = positive_alpha_decay(args.radii, run.band, run.grid_size, run.quadrature, threads=run.threads)
    by_r = sorted(records, key=lambda r: r.R)
    problems = [
        f"sup_norm not decreasing from R={r0.R:g} to R={r1.R:g}"
        for r0, r1 in zip(by_r, by_r[1:])
        if not r1.sup_norm < r0.sup_norm
    ]
    ratios = [r1.sup_norm / r0.sup_norm for r0, r1 in zip(by_r, by_r[1:])]
    cols = ["R", "alpha", "sup_norm", "err"]
    if run.output_format == "json":
        _emit(run, json_document({
            "command": "decay", "band": _band_meta(run.band),
            "records": [r.to_row() for r in records], "ratios": ratios, "problems": problems,
        }))
    else:
        _emit(run, csv_table(cols, [r.to_row() for r in records]))
    print("sup_norm ratios: " + ", ".join(f"{q:.6g}" for q in ratios), file=sys.stderr)
    for msg in problems:
        print(f"invariant failed: {msg}", file=sys.stderr)
    return EXIT_CHECK_FAILED if problems else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    default_grid = 512 if args.command == "sweep" else 256
    try:
        run = _run_config(args, default_grid)
        if args.command == "bound":
            return cmd_bound(run)
        handler = {
            "extend": cmd_extend,
            "verify": cmd_verify,
            "roundtrip": cmd_roundtrip,
            "sweep": cmd_sweep,
            "decay": cmd_decay,
        }[args.command]
        return handler(run, args)
    except UsageError as exc:
        print(f"bandext {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"bandext: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SupportOverlapError, InfeasibleDensityError) as exc:
        print(f"bandext: infeasible density: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (NonConvergenceError, DecayViolationError) as exc:
        print(f"bandext: quadrature failed: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except DomainError as exc:
        print(f"bandext {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
