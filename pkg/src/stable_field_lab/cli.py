"""Command line front end.

Exit codes: 0 success, 1 malformed or invalid input, 2 group-theoretic
dimension p = 0, 3 resource budget exceeded, 4 model/dataset digest
mismatch, 5 verdict disagrees with the predicted branch.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import action
from .analysis import KS_MAX_RISE, KS_THRESHOLD, SLOPE_TOL, SPREAD_LIMIT, verdict
from .lattice import columns, covering_constant_search, verify_covering
from .simulator import (
    BudgetError, FieldModel, GridSpec, MaximaDataset, bT_exact_indicator, bT_numeric,
    grid_size, level_diagnostic, partial_maxima, point_budget, union_length,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_FREE_PART = 2
EXIT_BUDGET = 3
EXIT_DIGEST = 4
EXIT_MISMATCH = 5


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def load_model(path) -> FieldModel:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return FieldModel.from_dict(doc)
    except (ValueError, TypeError) as exc:
        raise CliError(f"{path}: invalid model: {exc}") from exc


def _ladder(text: str) -> list[float]:
    try:
        values = [float(Fraction(x)) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad ladder {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty ladder")
    return values


def _fmt(x) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def cmd_dim(args) -> int:
    model = load_model(args.model)
    cls = action.classify(model.spec, model.alpha, args.levels)
    exponent = "1/alpha" if cls.p == 1 else f"{cls.p}/alpha"
    print(f"p={cls.p} {cls.branch} exponent={exponent} "
          f"(= {cls.predicted_exponent} at alpha={_fmt(model.alpha)})")
    for i, inv in enumerate(cls.torsion_profile):
        print(f"level {i}: torsion {inv}")
    print(f"free lift basis (Gamma_0 coordinates): {columns(cls.free_lift_basis)}")
    print(f"kernel basis K_0: {columns(cls.kernel_basis)}")
    print(f"limit law: {cls.limit_law}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = load_model(args.model)
    try:
        grid = GridSpec(tuple(args.t_ladder), args.level, args.reps, args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    limit = point_budget(args.budget)
    size = grid_size(model.spec, max(args.t_ladder), args.level)
    if size > limit:
        raise CliError(f"window needs {size} grid points, budget is {limit}", EXIT_BUDGET)
    action.classify(model.spec, model.alpha)
    dataset = partial_maxima(model, grid, args.method, budget=args.budget,
                             series_terms=args.series_terms, jobs=args.jobs)
    dataset.to_csv(args.out)
    med = np.median(dataset.values, axis=0)
    for t, m in zip(dataset.t_ladder, med):
        print(f"t={_fmt(t)} median M_t={m:.6g}")
    print(f"wrote {dataset.replications * len(dataset.t_ladder)} rows to {args.out}")
    if args.level_check:
        diag = level_diagnostic(model, grid, args.method, budget=args.budget,
                                series_terms=args.series_terms, jobs=args.jobs)
        for t, (coarse, fine, rel) in diag.items():
            print(f"t={_fmt(t)} level {args.level} vs {args.level + 1}: "
                  f"median {coarse:.6g} vs {fine:.6g} (relative change {rel:+.3f})")
    return EXIT_OK


def cmd_verdict(args) -> int:
    model = load_model(args.model)
    try:
        dataset = MaximaDataset.from_csv(args.dataset)
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(f"{args.dataset}: {exc}") from exc
    digest = dataset.meta.get("model_digest")
    if digest != model.digest:
        raise CliError(f"dataset was produced for model {digest}, not {model.digest}", EXIT_DIGEST)
    try:
        report = verdict(dataset, model, slope_tol=args.slope_tol, ks_threshold=args.ks_threshold,
                         spread_limit=args.spread_limit, max_rise=args.max_rise)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    doc = report.to_dict()
    doc["model_digest"] = model.digest
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    print(f"verdict={report.scaling.verdict} slope={report.scaling.slope:.4f} "
          f"predicted={report.scaling.predicted:.4f} branch={report.predicted_branch}")
    if report.frechet is not None:
        ks = ", ".join(f"{_fmt(t)}:{v:.3f}" for t, v in report.frechet.ks_by_t.items())
        print(f"frechet K={report.limit_scale:.6g} ks_by_t={{{ks}}} passed={report.frechet.passed}")
    return EXIT_OK if report.matches else EXIT_MISMATCH


def cmd_bt(args) -> int:
    model = load_model(args.model)
    cls = action.classify(model.spec, model.alpha)
    alpha, p = model.alpha, cls.p
    exact = model.k == 1 and len(model.kernel) == 1
    rows = []
    for T in args.T_ladder:
        if exact:
            T_exact = Fraction(T).limit_denominator(10 ** 9)
            w = abs(float(model.kernel[0].w))
            length = union_length(model, T_exact)
            b_alpha = w ** alpha * float(length)
            scaled_alpha = w ** alpha * float(length / T_exact ** p)
            b = bT_exact_indicator(model, T_exact)
        else:
            b = bT_numeric(model, T, args.mesh, args.m, budget=args.budget)
            b_alpha, scaled_alpha = b ** alpha, T ** (-p) * b ** alpha
        rows.append((T, b, T ** (-p / alpha) * b, b_alpha, scaled_alpha))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["T", "b_T", "scaled", "b_T_alpha", "scaled_alpha"])
        for row in rows:
            writer.writerow([_fmt(row[0])] + [repr(float(x)) for x in row[1:]])
    finally:
        if args.out:
            out.close()
    if len(rows) > 1:
        print(f"apparent limit of T^(-p/alpha) b(T): {rows[-1][2]:.6g} "
              f"({'exact' if exact else 'numeric'}, p={p})", file=sys.stderr)
    return EXIT_OK


def cmd_covering(args) -> int:
    model = load_model(args.model)
    spec = model.spec
    if any(spec.gamma0[i][j] != int(i == j) for i in range(spec.d) for j in range(spec.d)):
        raise CliError("covering check needs gamma0 = identity")
    cls = action.effective_dimension(spec, 0)
    u = columns(cls.free_lift_basis)
    v = columns(cls.kernel_basis)
    print(f"u = {u}")
    print(f"v = {v}")
    if args.M is not None:
        ok = verify_covering(args.M, u, v, args.n, args.m)
        print(f"covering with M={args.M}, n={args.n}, m={args.m}: {ok}")
        return EXIT_OK
    found = covering_constant_search(u, v, args.n_probe, args.m_probe, args.M_max)
    if found is None:
        print(f"no M <= {args.M_max} found for n <= {args.n_probe}, m <= {args.m_probe}")
    else:
        print(f"M={found} covers all probes n <= {args.n_probe}, m <= {args.m_probe}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 1); code 2 is reserved for p = 0."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stable-field-lab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dim", help="group-theoretic dimension and conservativity")
    p.add_argument("--model", required=True)
    p.add_argument("--levels", type=int, default=3, help="check levels 0..LEVELS")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("simulate", help="Monte Carlo partial maxima to CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--t-ladder", type=_ladder, default=[8, 16, 32, 64])
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=["cell", "series"], default="cell")
    p.add_argument("--series-terms", type=int, default=None)
    p.add_argument("--budget", type=int, default=None, help="grid point budget")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--level-check", action="store_true",
                   help="also compare median M_t at level n and n+1")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verdict", help="scaling and Frechet verdict for a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out")
    p.add_argument("--slope-tol", type=float, default=SLOPE_TOL)
    p.add_argument("--ks-threshold", type=float, default=KS_THRESHOLD)
    p.add_argument("--spread-limit", type=float, default=SPREAD_LIMIT)
    p.add_argument("--max-rise", type=float, default=KS_MAX_RISE)
    p.set_defaults(func=cmd_verdict)

    p = sub.add_parser("bt", help="the scale function b(T) on a ladder")
    p.add_argument("--model", required=True)
    p.add_argument("--T-ladder", dest="T_ladder", type=_ladder, required=True)
    p.add_argument("--out")
    p.add_argument("--mesh", type=float, default=0.01)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_bt)

    p = sub.add_parser("covering", help="covering constant of the level-0 decomposition")
    p.add_argument("--model", required=True)
    p.add_argument("--M", type=int, default=None, help="verify this M instead of searching")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--n-probe", type=int, default=2)
    p.add_argument("--m-probe", type=int, default=1)
    p.add_argument("--M-max", dest="M_max", type=int, default=8)
    p.set_defaults(func=cmd_covering)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except action.DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_FREE_PART
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
