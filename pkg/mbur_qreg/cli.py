#!/usr/bin/env python3
"""
Command-line front end for MBUR quantile regression.

    python -m mbur_qreg describe --columns employment,air
    python -m mbur_qreg fit --response education --predictors employment --link logit --out out/fit
    python -m mbur_qreg ladder --response education --predictors employment,air,satisfaction,homicide
    python -m mbur_qreg corr --columns education,employment,air --response education
    python -m mbur_qreg report --study education --out-dir out/education
    python -m mbur_qreg sample --alpha 0.8 --n 1000 --seed 7 --out sample.csv
    python -m mbur_qreg fit-alpha --data sample.csv --response y

Exit codes: 0 success (also when a fit did not converge), 2 usage,
3 data, 4 numerical failure.
"""

import sys
import logging
import argparse
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import get_config
from .dataio import load_table
from .errors import DataError, DomainError, MburQregError, NumericalError, UsageError
from .links import LinkKind
from .mbur import MburParams, QuantileLevel, fit_alpha, sample
from .qreg import ModelSpec
from .reporting.api import StudyReportAPI
from .reporting.studies import STUDIES
from .reporting.utils import csv_text, dumps_report, format_table
from .reporting.writer import write_bundle, write_text

# Set up logging
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _names(text: Optional[str]) -> List[str]:
    if not text:
        return []
    return [name.strip() for name in text.split(",") if name.strip()]


def parse_subsets(text: Optional[str], predictors: Sequence[str]) -> Optional[List[Tuple[str, ...]]]:
    """
    ``--subsets`` syntax: removal sets separated by ';', names inside a set
    by ','. ``all`` removes every predictor (null model), ``none`` nothing.
    """
    if text is None:
        return None
    subsets = []
    for group in text.split(";"):
        group = group.strip()
        if group.lower() == "all":
            subsets.append(tuple(predictors))
        elif group.lower() in ("none", ""):
            subsets.append(())
        else:
            subsets.append(tuple(_names(group)))
    return subsets


def _model_spec(args) -> ModelSpec:
    if not args.response:
        raise UsageError("--response is required")
    return ModelSpec(
        response=args.response,
        predictors=tuple(_names(args.predictors)),
        link=LinkKind.parse(args.link),
        level=QuantileLevel.of(args.tau),
        transform=not args.no_transform,
    )


def _api(args) -> StudyReportAPI:
    config = get_config()
    data_path = args.data or config.data_path
    table = load_table(data_path)
    workers = args.workers or config.workers
    return StudyReportAPI(
        table,
        options=config.nm_options(),
        workers=workers,
        stamp=args.stamp,
        data_source=str(data_path) if data_path else "oecd_bli.csv (embedded)",
    )


def cmd_describe(args) -> int:
    api = _api(args)
    result = api.describe_columns(_names(args.columns))
    headers = ["column", "n", "mean", "sd", "skewness", "kurtosis", "min", "q25", "median", "q75", "max"]
    rows = [[name] + [stats[key] for key in headers[1:]] for name, stats in result["stats"].items()]
    print(format_table(headers, rows))
    if args.out:
        write_text(args.out, result["csv"])
        print(f"\n✅ Wrote {args.out}")
    return EXIT_OK


def _print_fit_summary(report: dict):
    spec = report["spec"]
    rhs = " + ".join(spec["predictors"]) or "1"
    print(f"📊 {spec['response']} ~ {rhs}  [link={spec['link']}, tau={spec['tau']:g}, n={report['n']}]")
    if not report["converged"]:
        print("⚠️ optimizer did not converge; estimates are the best point found")

    rows = [[c["label"], c["name"], c["estimate"], c["std_error"], c["z"], c["p_two_sided"]]
            for c in report["coefficients"]]
    print(format_table(["", "term", "estimate", "SE", "Wald z", "p (2-sided)"], rows))

    ic = report["information_criteria"] or {}
    test = report["lrt_vs_null"] or {}
    summary = [
        ["LL", report["log_likelihood"]],
        ["AIC", ic.get("aic")], ["CAIC", ic.get("caic")],
        ["BIC", ic.get("bic")], ["HQIC", ic.get("hqic")],
        ["LRT vs null", test.get("statistic")], ["LRT p", test.get("p_value")],
        ["R-squared", report["pseudo_r2"]],
    ]
    diag = report["diagnostics"]
    if "ks_rq" in diag:
        summary += [["KS p (RQ)", diag["ks_rq"]["p_value"]], ["KS p (CS)", diag["ks_cs"]["p_value"]]]
        for name, kinds in diag["residual_tau"].items():
            entry = kinds.get("RQ")
            if entry:
                summary.append([f"RQ vs {name} (tau, p)", f"{entry['tau']:.4f}, {entry['p_value']:.4f}"])
        for name, kinds in diag["homoscedasticity"].items():
            for kind, entry in kinds.items():
                if entry:
                    summary.append([f"{kind}^2 on {name} (p, R2)",
                                    f"{entry['p_value']:.4f}, {entry['r_squared']:.5f}"])
        large = diag["large_cs"]
        if large and large["count"]:
            summary.append([f"CS > {large['threshold']:g}",
                            f"{large['count']} ({large['min']:.4f} to {large['max']:.4f})"])
    print()
    print(format_table(["statistic", "value"], summary))


def cmd_fit(args) -> int:
    api = _api(args)
    artifacts = api.fit_model(_model_spec(args))
    _print_fit_summary(artifacts.report)
    if args.out:
        write_bundle(args.out, artifacts.files)
        print(f"\n✅ Wrote {', '.join(artifacts.files)} to {args.out}")
    return EXIT_OK


def cmd_ladder(args) -> int:
    spec = _model_spec(args)
    if not spec.predictors:
        raise UsageError("ladder needs at least one predictor: nothing to remove")
    api = _api(args)
    result = api.ladder(spec, parse_subsets(args.subsets, spec.predictors))
    ladder = result["ladder"]

    print(f"📊 Full model LL={ladder.full.log_likelihood:.4f}, "
          f"LRT vs null={ladder.full_vs_null.statistic:.4f} (p={ladder.full_vs_null.p_value:.4g}), "
          f"R2={ladder.full_r2:.4f}")
    rows = []
    for row in ladder.rows:
        if row.fit is None:
            rows.append([row.label, "-", "-", "-", "-", "-", "-", "-", f"error: {row.error}"])
            continue
        rows.append([row.label, row.fit.log_likelihood, row.lrt_vs_full, row.lrt_p,
                     row.ic.aic, row.ic.caic, row.ic.bic, row.r2_vs_full, row.sign_preserved])
    print(format_table(["model", "LL", "LRT", "p", "AIC", "CAIC", "BIC", "R2", "sign kept"], rows))
    if args.out:
        write_text(args.out, dumps_report(result["report"]))
        print(f"\n✅ Wrote {args.out}")
    return EXIT_OK


def cmd_corr(args) -> int:
    columns = _names(args.columns)
    if args.response and args.response not in columns:
        columns.insert(0, args.response)
    api = _api(args)
    result = api.correlations(columns, response=args.response, transform=not args.no_transform)
    matrix = result["matrix"]

    rows = []
    for i, label in enumerate(matrix.labels):
        rows.append([label] + [f"{matrix.tau[i, j]:.4f} (p={matrix.p[i, j]:.4g})" if i != j else "1"
                               for j in range(len(matrix.labels))])
    print(format_table(["tau"] + list(matrix.labels), rows))

    collinearity = result["report"]["collinearity"]
    if collinearity:
        print()
        print(format_table(["predictor", "VIF"], list(zip(collinearity["predictors"], collinearity["vif"]))))
        indices = ", ".join(f"{v:.4f}" for v in collinearity["condition_indices"])
        print(f"\nCondition indices: {indices}")
    if args.out:
        write_text(args.out, dumps_report(result["report"]))
        print(f"\n✅ Wrote {args.out}")
    return EXIT_OK


def cmd_report(args) -> int:
    api = _api(args)
    out_dir = Path(args.out_dir or f"report_{args.study}")
    result = api.study_bundle(args.study, ladder_link=LinkKind.parse(args.link), tau=args.tau,
                              transform=not args.no_transform)
    write_bundle(out_dir, result["files"])

    comparison = []
    for outcome in result["fits"]:
        spec = outcome["spec"]
        if not outcome["success"]:
            comparison.append([spec.predictors[0], spec.link.value, "-", "-", "-", "-", "-"])
            continue
        report = outcome["artifacts"].report
        coefficients = report["coefficients"]
        comparison.append([spec.predictors[0], spec.link.value, coefficients[0]["estimate"],
                           coefficients[1]["estimate"], report["log_likelihood"],
                           (report["information_criteria"] or {}).get("aic"), report["pseudo_r2"]])
    print(format_table(["predictor", "link", "B0", "B1", "LL", "AIC", "R2"], comparison))

    manifest = result["manifest"]
    print(f"\n📊 {manifest['completed']}/{manifest['total']} tasks completed, "
          f"{manifest['failed']} failed; bundle in {out_dir}")
    return EXIT_OK if result["success"] else EXIT_NUMERICAL


def cmd_sample(args) -> int:
    draws = sample(args.n, MburParams(args.alpha), args.seed)
    text = csv_text(["index", "y"], [[i + 1, float(y)] for i, y in enumerate(draws)])
    if args.out:
        write_text(args.out, text)
        print(f"✅ Wrote {args.n} draws (alpha={args.alpha:g}, seed={args.seed}) to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_fit_alpha(args) -> int:
    if not args.response:
        raise UsageError("--response is required")
    config = get_config()
    table = load_table(args.data or config.data_path)
    values = table.column(args.response)
    values = values[~np.isnan(values)]
    result = fit_alpha(values)
    print(format_table(["statistic", "value"], [
        ["n", result.n],
        ["alpha", result.params.alpha],
        ["alpha^2", result.params.alpha_sq],
        ["LL", result.log_likelihood],
        ["converged", result.converged],
    ]))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", help="CSV input (default: embedded OECD fixture or MBUR_QREG_DATA)")
    common.add_argument("--workers", type=int, help="threads for independent fits")
    common.add_argument("--stamp", action="store_true", help="embed a UTC timestamp in reports")
    common.add_argument("--verbose", "-v", action="store_true", help="log progress at INFO level")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--response", help="response column (values in (0, 1))")
    model.add_argument("--predictors", default="", help="comma-separated predictor columns")
    model.add_argument("--link", default="logit", choices=[kind.value for kind in LinkKind])
    model.add_argument("--tau", type=float, default=0.5, help="modeled quantile level")
    model.add_argument("--no-transform", action="store_true", help="use predictors as-is (no ln(x/100))")

    parser = argparse.ArgumentParser(
        prog="mbur_qreg",
        description="Parametric MBUR quantile regression for unit-interval responses",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    describe = commands.add_parser("describe", parents=[common], help="descriptive statistics per column")
    describe.add_argument("--columns", default="", help="comma-separated columns (default: all)")
    describe.add_argument("--out", help="write the table as CSV")
    describe.set_defaults(handler=cmd_describe)

    fit = commands.add_parser("fit", parents=[common, model], help="fit one model and run diagnostics")
    fit.add_argument("--out", help="directory for report.json and plot-data CSVs")
    fit.set_defaults(handler=cmd_fit)

    ladder = commands.add_parser("ladder", parents=[common, model], help="nested-model removal ladder")
    ladder.add_argument("--subsets", help="removal sets, e.g. 'employment;air,homicide;all'")
    ladder.add_argument("--out", help="write the ladder report as JSON")
    ladder.set_defaults(handler=cmd_ladder)

    corr = commands.add_parser("corr", parents=[common], help="Kendall matrix, VIF and condition indices")
    corr.add_argument("--columns", required=True, help="comma-separated columns")
    corr.add_argument("--response", help="column excluded from VIF and condition indices")
    corr.add_argument("--no-transform", action="store_true", help="collinearity on raw predictors")
    corr.add_argument("--out", help="write the report as JSON")
    corr.set_defaults(handler=cmd_corr)

    report = commands.add_parser("report", parents=[common], help="full study bundle")
    report.add_argument("--study", required=True, help=f"one of: {', '.join(STUDIES)}")
    report.add_argument("--out-dir", help="bundle directory (default: report_<study>)")
    report.add_argument("--link", default="logit", choices=[kind.value for kind in LinkKind],
                        help="link used for the ladder")
    report.add_argument("--tau", type=float, default=0.5)
    report.add_argument("--no-transform", action="store_true")
    report.set_defaults(handler=cmd_report)

    sampler = commands.add_parser("sample", parents=[common], help="draw an MBUR sample")
    sampler.add_argument("--alpha", type=float, required=True)
    sampler.add_argument("--n", type=int, required=True)
    sampler.add_argument("--seed", type=int, default=0)
    sampler.add_argument("--out", help="write the sample as CSV (default: stdout)")
    sampler.set_defaults(handler=cmd_sample)

    single = commands.add_parser("fit-alpha", parents=[common], help="single-sample MLE of alpha")
    single.add_argument("--response", required=True, help="column holding the sample")
    single.set_defaults(handler=cmd_fit_alpha)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    config = get_config()
    level = logging.INFO if args.verbose else getattr(logging, config.log_level, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return args.handler(args)
    except (UsageError, DomainError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        print(f"❌ Data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as e:
        print(f"❌ Numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MburQregError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
