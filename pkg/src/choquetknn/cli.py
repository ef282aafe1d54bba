"""Command-line entry point.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .choquet import choquet_distance_matrix
from .data import fit_normalizer, load_csv
from .errors import ChoquetError, DatasetError, DomainError, MeasureFormatError
from .experiments import SYNTHETIC_ROSTER, run_synthetic
from .knn import DEFAULT_ROSTER, BenchReport, DistanceSpec, cross_validate, parse_distances
from .measure import read_measure
from .worked_example import run_worked_example

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _alpha_list(text: str) -> list[float]:
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha list {text!r}") from None
    if any(not 0.0 <= a <= 1.0 for a in values):
        raise argparse.ArgumentTypeError("alpha values must lie in [0, 1]")
    return values


def _m_range(text: str) -> list[int]:
    """``"0:15"`` (inclusive) or a comma list ``"0,5,10"``."""
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":"))
            values = list(range(lo, hi + 1))
        else:
            values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid m range {text!r}") from None
    if not values or min(values) < 0:
        raise argparse.ArgumentTypeError("m range must be nonempty and nonnegative")
    return values


def _common(p: argparse.ArgumentParser, out_default: str | None = None, fmt_default: str = "csv") -> None:
    p.add_argument("--seed", type=int, default=42, help="RNG seed (default 42)")
    p.add_argument("--out", default=out_default, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=fmt_default)


def _distance_flags(p: argparse.ArgumentParser, roster: tuple[str, ...]) -> None:
    p.add_argument("--distances", default=",".join(roster), help=f"comma list (default {','.join(roster)})")
    p.add_argument("--alpha", type=_alpha_list, default=[], help="extra CFR alphas, e.g. 0,0.5,1")
    p.add_argument("--k", type=int, default=5, help="neighbours (default 5)")
    p.add_argument("--shrinkage", type=float, default=0.1, help="covariance shrinkage (default 0.1)")
    p.add_argument("--mi-k", type=int, default=3, help="MI estimator neighbours (default 3)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="choquet-knn", description="Choquet-integral distances for KNN.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("example", help="recompute and check the four-patient worked example")
    p.add_argument("--measure", help="measure file replacing the example's non-additive measure")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("synthetic", help="boundary accuracy as redundant columns are added")
    p.add_argument("--kind", choices=("duplicates", "correlated"), default="duplicates")
    p.add_argument("--m", type=_m_range, default=list(range(16)), help="m values, '0:15' or '0,5,10'")
    p.add_argument("--sigma", type=float, default=0.1, help="noise level for correlated columns")
    p.add_argument("--n-train", type=int, default=500)
    p.add_argument("--n-test", type=int, default=5000)
    _distance_flags(p, SYNTHETIC_ROSTER)
    _common(p)

    p = sub.add_parser("bench", help="cross-validated balanced accuracy on CSV datasets")
    p.add_argument("datasets", nargs="+", help="CSV files, last column is the class")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--summary", help="also write the means table as CSV")
    _distance_flags(p, DEFAULT_ROSTER)
    _common(p, fmt_default="json")

    p = sub.add_parser("distances", help="pairwise distance matrix of a dataset")
    p.add_argument("dataset", help="CSV file, last column is the class")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--measure", help="measure file; computes its alpha-Choquet distance")
    group.add_argument("--distance", default="CFR", help="distance spec fitted on the dataset (default CFR)")
    p.add_argument("--alpha", type=float, default=None, help="alpha for --measure or CFR")
    p.add_argument("--normalize", action="store_true", help="min-max scale attributes first")
    p.add_argument("--shrinkage", type=float, default=0.1)
    p.add_argument("--mi-k", type=int, default=3)
    _common(p)
    return parser


def _roster(args) -> list[DistanceSpec]:
    specs = parse_distances(args.distances, mi_k=args.mi_k, shrinkage=args.shrinkage)
    names = {s.name for s in specs}
    for a in args.alpha:
        extra = DistanceSpec("CFR", alpha=a, mi_k=args.mi_k, shrinkage=args.shrinkage)
        if extra.name not in names:
            specs.append(extra)
            names.add(extra.name)
    return specs


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def cmd_example(args) -> int:
    measure = read_measure(args.measure) if args.measure else None
    result = run_worked_example(measure)
    if args.json:
        _emit(json.dumps(result.to_dict(), indent=2), args.out)
    else:
        _emit(result.format_text(), args.out)
    if not result.passed:
        for c in result.failures:
            print(f"mismatch in {c.where}: expected {c.expected}, got {c.actual:.6g}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_synthetic(args) -> int:
    rows = run_synthetic(
        args.kind,
        args.m,
        _roster(args),
        seed=args.seed,
        k=args.k,
        n_train=args.n_train,
        n_test=args.n_test,
        sigma=args.sigma,
    )
    if args.format == "json":
        payload = {
            "kind": args.kind,
            "seed": args.seed,
            "k": args.k,
            "rows": [{"m": r.m, "distance": r.distance, "accuracy": r.accuracy} for r in rows],
        }
        _emit(json.dumps(payload, indent=2), args.out)
    else:
        _emit(_csv(("kind", "m", "distance", "accuracy", "seed"),
                   [(r.kind, r.m, r.distance, r.accuracy, args.seed) for r in rows]), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    specs = _roster(args)
    reports = []
    for path in args.datasets:
        ds = load_csv(path)
        reports.append(cross_validate(ds, specs, k=args.k, folds=args.folds, seed=args.seed, name=Path(path).stem))
    bench = BenchReport(reports)
    _emit(bench.to_json() if args.format == "json" else bench.to_csv(), args.out)
    if args.summary:
        Path(args.summary).write_text(bench.summary_csv(), encoding="utf-8")
    for r in reports:
        for w in r.warnings:
            print(f"warning: {r.dataset}: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_distances(args) -> int:
    ds = load_csv(args.dataset)
    X = fit_normalizer(ds.values).transform(ds.values) if args.normalize else np.asarray(ds.values)
    if args.measure:
        measure = read_measure(args.measure)
        D = choquet_distance_matrix(X, measure, args.alpha or 0.0)
        name = f"measure file {Path(args.measure).name}, alpha={args.alpha or 0.0:g}"
    else:
        spec = DistanceSpec.parse(args.distance, mi_k=args.mi_k, shrinkage=args.shrinkage)
        if args.alpha is not None:
            if spec.kind != "CFR":
                raise UsageError("--alpha only applies to CFR or --measure")
            spec = DistanceSpec("CFR", alpha=args.alpha, mi_k=args.mi_k, shrinkage=args.shrinkage,
                                measure=spec.measure)
        D = spec.fit(X, ds.decision).pairwise(X)
        # symmetrise the rounding of fitted pairwise paths, diagonal is exact zero
        D = np.triu(D, 1)
        D = D + D.T
        name = spec.name
    if args.format == "json":
        _emit(json.dumps({"distance": name, "seed": args.seed, "matrix": D.tolist()}, indent=2), args.out)
    else:
        _emit(_csv(None, D.tolist()), args.out)
    return EXIT_OK


_COMMANDS = {"example": cmd_example, "synthetic": cmd_synthetic, "bench": cmd_bench, "distances": cmd_distances}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (OSError, DatasetError, MeasureFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, DomainError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ChoquetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
