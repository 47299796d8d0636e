import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .. import __version__
from ..association import condition_indices, describe, kendall_matrix, vif
from ..dataio import DataTable, TransformSpec, apply_transform, build_design, complete_rows
from ..diagnostics import DiagnosticsReport, diagnose
from ..errors import DomainError, MburQregError, UsageError
from ..inference import Ladder, fit_ic, lrt, pseudo_r2, drop_one_ladder
from ..links import LinkKind
from ..mbur import QuantileLevel
from ..numerics import std_normal_quantile
from ..optimizer import NmOptions
from ..qreg import DesignData, FitResult, ModelSpec, describe_spec, fit, predict_quantile, wald_tests
from .progress import ReportProgressTracker
from .studies import StudyDefinition, display_name, get_study
from .utils import coefficient_label, csv_text, dumps_report, predictor_grid, slug

# Set up logging
logger = logging.getLogger(__name__)

CURVE_LEVELS = (0.25, 0.5, 0.75)


@dataclass
class FitArtifacts:
    """One fit with its report and plot-data files rendered in memory."""

    result: FitResult
    null: FitResult
    diagnostics: Optional[DiagnosticsReport]
    report: Dict[str, Any]
    files: Dict[str, str] = field(default_factory=dict)


def _options_dict(options: NmOptions) -> Dict[str, Any]:
    return {
        "max_iterations": options.max_iterations,
        "f_tolerance": options.f_tolerance,
        "x_tolerance": options.x_tolerance,
        "initial_step": options.initial_step,
        "restarts": options.restarts,
    }


def _spec_dict(spec: ModelSpec) -> Dict[str, Any]:
    return {
        "response": spec.response,
        "predictors": list(spec.predictors),
        "link": spec.link.value,
        "tau": spec.level.u,
        "transform": spec.transform,
    }


def _coefficient_rows(result: FitResult) -> List[Dict[str, Any]]:
    try:
        wald = wald_tests(result)
    except MburQregError:
        return [{"label": coefficient_label(j), "name": name, "estimate": float(estimate),
                 "std_error": None, "z": None, "p_two_sided": None, "significant": None,
                 "error": result.vcov_error}
                for j, (name, estimate) in enumerate(zip(result.spec.coefficient_names(), result.beta_hat))]
    return [{"label": coefficient_label(j), "name": row.name, "estimate": row.estimate,
             "std_error": row.std_error, "z": row.z, "p_two_sided": row.p_two_sided,
             "significant": row.significant, "error": row.error}
            for j, row in enumerate(wald)]


def diagnostics_dict(report: DiagnosticsReport) -> Dict[str, Any]:
    def kendall(entry):
        return None if entry is None else {"tau": entry.tau, "p_value": entry.p_value}

    def homoscedasticity(entry):
        return None if entry is None else {"p_value": entry.p_value, "r_squared": entry.r_squared}

    large = report.large_cs
    return {
        "ks_rq": {"statistic": report.ks_rq.statistic, "p_value": report.ks_rq.p_value},
        "ks_cs": {"statistic": report.ks_cs.statistic, "p_value": report.ks_cs.p_value},
        "residual_tau": {name: {kind: kendall(entry) for kind, entry in kinds.items()}
                         for name, kinds in report.tau.items()},
        "homoscedasticity": {name: {kind: homoscedasticity(entry) for kind, entry in kinds.items()}
                             for name, kinds in report.homoscedasticity.items()},
        "large_cs": None if large is None else {
            "threshold": large.threshold,
            "count": large.count,
            "min": large.minimum,
            "max": large.maximum,
            "labels": list(large.row_labels),
        },
        "clipped_cdf": report.residuals.clipped,
        "errors": list(report.errors),
    }


def curve_csv(result: FitResult, data: DesignData, points: int = 200) -> str:
    """
    Quantile curves over a grid of each transformed predictor, other
    predictors held at their means. A ``predictor`` column is added when the
    model has more than one predictor, a ``q_tau`` column when the modeled
    level is not one of the plotted quartiles.
    """
    tau = result.spec.level.u
    extra_tau = not any(math.isclose(tau, level) for level in CURVE_LEVELS)
    multi = data.k > 1
    headers = (["predictor"] if multi else []) + ["x_transformed", "q25", "q50", "q75"]
    headers += ["q_tau"] if extra_tau else []

    rows = []
    means = data.x.mean(axis=0)
    for j, name in enumerate(data.predictors, start=1):
        grid = predictor_grid(data.x[:, j], points)
        design = np.tile(means, (grid.size, 1))
        design[:, 0] = 1.0
        design[:, j] = grid
        curves = [predict_quantile(result, design, level) for level in CURVE_LEVELS]
        if extra_tau:
            curves.append(predict_quantile(result, design, tau))
        for i, x_value in enumerate(grid):
            row = ([name] if multi else []) + [float(x_value)] + [float(curve[i]) for curve in curves]
            rows.append(row)
    return csv_text(headers, rows)


def residuals_csv(diagnostics: DiagnosticsReport, data: DesignData) -> str:
    residual_set = diagnostics.residuals
    headers = ["label", "rq", "cs", "fitted_cdf"] + [f"x_{j}" for j in range(1, data.k + 1)]
    rows = []
    for i, label in enumerate(data.row_labels):
        rows.append([label, float(residual_set.rq[i]), float(residual_set.cs[i]),
                     float(residual_set.fitted_cdf[i])] + [float(v) for v in data.x[i, 1:]])
    return csv_text(headers, rows)


def qq_csv(diagnostics: DiagnosticsReport) -> str:
    """Sorted residuals against theoretical quantiles at (i - 0.5) / n."""
    residual_set = diagnostics.residuals
    n = residual_set.rq.size
    probabilities = (np.arange(1, n + 1) - 0.5) / n
    theoretical = std_normal_quantile(probabilities)
    theoretical_cs = -np.log1p(-probabilities)
    rows = zip(theoretical, np.sort(residual_set.rq), np.sort(residual_set.cs), theoretical_cs)
    return csv_text(["theoretical", "empirical_rq", "empirical_cs", "theoretical_cs"],
                    [[float(v) for v in row] for row in rows])


def ladder_dict(ladder: Ladder) -> Dict[str, Any]:
    def model(result: Optional[FitResult]) -> Optional[Dict[str, Any]]:
        if result is None:
            return None
        errors = result.std_errors
        return {
            "predictors": list(result.spec.predictors),
            "coefficients": [
                {"label": coefficient_label(j), "name": name, "estimate": float(estimate),
                 "std_error": None if errors is None else float(errors[j])}
                for j, (name, estimate) in enumerate(zip(result.spec.coefficient_names(), result.beta_hat))
            ],
            "log_likelihood": result.log_likelihood,
            "converged": result.converged,
        }

    full = ladder.full
    return {
        "spec": _spec_dict(full.spec),
        "n": full.n,
        "full": {
            **model(full),
            "information_criteria": ladder.full_ic.to_dict(),
            "lrt_vs_null": {"statistic": ladder.full_vs_null.statistic,
                            "p_value": ladder.full_vs_null.p_value,
                            "df": ladder.full_vs_null.df},
            "pseudo_r2": ladder.full_r2,
        },
        "null": model(ladder.null),
        "single_predictor_slopes": dict(ladder.single_slopes),
        "rows": [
            {
                "label": row.label,
                "removed": list(row.removed),
                "model": model(row.fit),
                "lrt": row.lrt_vs_full,
                "p_value": row.lrt_p,
                "df": len(row.removed),
                "sign_preserved": row.sign_preserved,
                "information_criteria": None if row.ic is None else row.ic.to_dict(),
                "r2_vs_full": row.r2_vs_full,
                "error": row.error,
            }
            for row in ladder.rows
        ],
    }


class StudyReportAPI:
    """Runs analyses against one loaded table and renders their reports."""

    def __init__(self, table: DataTable, options: Optional[NmOptions] = None, workers: int = 4,
                 stamp: bool = False, data_source: str = "oecd_bli.csv (embedded)"):
        self.table = table
        self.options = options or NmOptions()
        self.workers = max(1, workers)
        self.stamp = stamp
        self.data_source = data_source

    def provenance(self) -> Dict[str, Any]:
        info = {
            "tool": "mbur_qreg",
            "version": __version__,
            "data": self.data_source,
            "options": _options_dict(self.options),
        }
        if self.stamp:
            info["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return info

    # --- single analyses (raise on failure) -------------------------------

    def describe_columns(self, columns: Optional[Sequence[str]] = None) -> Dict[str, Any]:
        names = list(columns) if columns else list(self.table.column_names)
        self.table.require(names)
        rows = {name: describe(self.table.column(name)).to_dict() for name in names}
        headers = ["column", "n", "mean", "sd", "skewness", "kurtosis", "min", "q25", "median", "q75", "max"]
        csv_rows = [[name] + [stats[key] for key in headers[1:]] for name, stats in rows.items()]
        return {"success": True, "stats": rows, "csv": csv_text(headers, csv_rows)}

    def design_for(self, spec: ModelSpec) -> DesignData:
        return build_design(self.table, spec, TransformSpec.for_model(spec, enabled=spec.transform))

    def fit_model(self, spec: ModelSpec) -> FitArtifacts:
        data = self.design_for(spec)
        result = fit(spec, data, self.options)
        null = fit(spec.null(), data.select(()), self.options) if spec.k else result

        try:
            ic = fit_ic(result).to_dict()
        except DomainError as e:
            logger.warning(f"⚠️ Information criteria unavailable: {e}")
            ic = None

        lrt_vs_null = None
        if spec.k:
            test = lrt(result.log_likelihood, null.log_likelihood, spec.k)
            lrt_vs_null = {"statistic": test.statistic, "p_value": test.p_value, "df": test.df}

        diagnostics, diagnostics_error = None, None
        try:
            diagnostics = diagnose(result, data)
        except MburQregError as e:
            diagnostics_error = str(e)
            logger.warning(f"⚠️ Diagnostics unavailable for {describe_spec(spec)}: {e}")

        report = {
            "spec": _spec_dict(spec),
            "n": data.n,
            "converged": result.converged,
            "iterations": result.iterations,
            "coefficients": _coefficient_rows(result),
            "log_likelihood": result.log_likelihood,
            "vcov": result.vcov,
            "vcov_error": result.vcov_error,
            "information_criteria": ic,
            "null_model": {"intercept": float(null.beta_hat[0]), "log_likelihood": null.log_likelihood},
            "lrt_vs_null": lrt_vs_null,
            "pseudo_r2": pseudo_r2(null.log_likelihood, result.log_likelihood, data.n),
            "diagnostics": diagnostics_dict(diagnostics) if diagnostics else {"error": diagnostics_error},
            "provenance": self.provenance(),
        }

        files = {"report.json": dumps_report(report)}
        if spec.k:
            files["curve.csv"] = curve_csv(result, data)
        if diagnostics is not None:
            files["residuals.csv"] = residuals_csv(diagnostics, data)
            files["qq.csv"] = qq_csv(diagnostics)
        return FitArtifacts(result=result, null=null, diagnostics=diagnostics, report=report, files=files)

    def ladder(self, spec: ModelSpec, subsets: Optional[Sequence[Sequence[str]]] = None) -> Dict[str, Any]:
        if not spec.predictors:
            raise UsageError("ladder needs at least one predictor: nothing to remove")
        data = self.design_for(spec)
        ladder = drop_one_ladder(spec, data, subsets, self.options, self.workers)
        report = ladder_dict(ladder)
        report["provenance"] = self.provenance()
        return {"success": True, "ladder": ladder, "report": report}

    def correlations(self, columns: Sequence[str], response: Optional[str] = None,
                     transform: bool = True) -> Dict[str, Any]:
        columns = list(columns)
        if len(columns) < 2:
            raise UsageError("correlations need at least two columns")
        self.table.require(columns)

        # one row set for the whole report, as in the model fits
        keep = complete_rows(self.table, columns)
        matrix = kendall_matrix({name: self.table.column(name)[keep] for name in columns})
        report: Dict[str, Any] = {
            "columns": columns,
            "kendall": {
                "tau": matrix.tau,
                "p_value": matrix.p,
                "n": matrix.n,
                "errors": {f"{a}|{b}": message for (a, b), message in matrix.errors.items()},
            },
        }

        predictors = [name for name in columns if name != response]
        if len(predictors) >= 2:
            kind = "div100_log" if transform else "identity"
            design = np.column_stack([apply_transform(kind, self.table.column(name)[keep]) for name in predictors])
            factors = vif(design)
            report["collinearity"] = {
                "predictors": predictors,
                "n": int(keep.sum()),
                "transform": kind,
                "vif": factors,
                "vif_infinite": [bool(np.isinf(v)) for v in factors],
                "condition_indices": condition_indices(design),
            }
        else:
            report["collinearity"] = None
        report["provenance"] = self.provenance()
        return {"success": True, "matrix": matrix, "report": report}

    # --- study bundles (failures recorded per task) -----------------------

    def _fit_task(self, tracker: ReportProgressTracker, task_id: str, spec: ModelSpec) -> Dict[str, Any]:
        tracker.update_progress(task_id, f"Fitting {describe_spec(spec)}", 10)
        try:
            artifacts = self.fit_model(spec)
        except MburQregError as e:
            tracker.set_error(task_id, str(e))
            return {"success": False, "error": str(e), "spec": spec}
        return {"success": True, "artifacts": artifacts, "spec": spec}

    def link_comparison_rows(self, fits: Sequence[Dict[str, Any]]) -> List[List[Any]]:
        rows = []
        for outcome in fits:
            spec = outcome["spec"]
            if not outcome["success"]:
                rows.append([spec.predictors[0], spec.link.value] + [None] * 15 + [outcome["error"]])
                continue
            report = outcome["artifacts"].report
            coefficients = report["coefficients"]
            ic = report["information_criteria"] or {}
            test = report["lrt_vs_null"] or {}
            diag = report["diagnostics"]
            tau = (diag.get("residual_tau") or {}).get(spec.predictors[0], {}).get("RQ") or {}
            rows.append([
                spec.predictors[0], spec.link.value,
                coefficients[0]["estimate"], coefficients[1]["estimate"],
                report["log_likelihood"],
                coefficients[0]["z"], coefficients[1]["z"],
                ic.get("aic"), ic.get("caic"), ic.get("bic"), ic.get("hqic"),
                test.get("statistic"), test.get("p_value"),
                report["pseudo_r2"],
                (diag.get("ks_rq") or {}).get("p_value"),
                tau.get("tau"), tau.get("p_value"),
                None,
            ])
        return rows

    SUMMARY_HEADERS = ["predictor", "link", "B0", "B1", "LL", "z_B0", "z_B1", "AIC", "CAIC", "BIC",
                       "HQIC", "LRT", "LRT_p", "R2", "KS_p", "tau_rq", "tau_p", "error"]

    def study_bundle(self, name: str, ladder_link: LinkKind = LinkKind.LOGIT,
                     tau: float = 0.5, transform: bool = True) -> Dict[str, Any]:
        """
        Every analysis of one study: per-predictor fits under the three links,
        the drop-one ladder(s), correlations, collinearity and descriptive
        statistics, plus a link-comparison summary and a manifest.
        """
        study: StudyDefinition = get_study(name)
        tracker = ReportProgressTracker(bundle=study.name)
        files: Dict[str, str] = {}
        base = ModelSpec(study.response, (), ladder_link, level=QuantileLevel.of(tau), transform=transform)

        tracker.update_progress("describe", "Descriptive statistics", 0)
        try:
            described = self.describe_columns(study.columns)
            files["describe.csv"] = described["csv"]
            tracker.set_completed("describe", "Descriptive statistics written", ["describe.csv"])
        except MburQregError as e:
            tracker.set_error("describe", str(e))

        tracker.update_progress("correlations", "Kendall matrix and collinearity", 0)
        try:
            correlations = self.correlations(study.columns, response=study.response, transform=transform)
            files["correlations.json"] = dumps_report(correlations["report"])
            tracker.set_completed("correlations", "Correlations written", ["correlations.json"])
        except MburQregError as e:
            tracker.set_error("correlations", str(e))

        specs = [base.with_predictors((predictor,)).with_link(kind)
                 for predictor in study.predictors for kind in LinkKind]
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            futures = [executor.submit(self._fit_task, tracker, f"fit:{spec.predictors[0]}:{spec.link.value}", spec)
                       for spec in specs]
            fits = [future.result() for future in futures]

        for outcome in fits:
            spec = outcome["spec"]
            if not outcome["success"]:
                continue
            task_id = f"fit:{spec.predictors[0]}:{spec.link.value}"
            folder = f"fits/{slug(spec.predictors[0])}_{spec.link.value}"
            written = []
            for filename, text in outcome["artifacts"].files.items():
                files[f"{folder}/{filename}"] = text
                written.append(f"{folder}/{filename}")
            converged = outcome["artifacts"].result.converged
            tracker.set_completed(task_id, "converged" if converged else "finished without convergence", written)

        files["summary.csv"] = csv_text(self.SUMMARY_HEADERS, self.link_comparison_rows(fits))

        ladder_specs = [("ladder", base.with_predictors(study.predictors), study.removal_subsets())]
        for predictors in study.reduced_models:
            ladder_specs.append((f"ladder_reduced_{'_'.join(slug(p) for p in predictors)}",
                                 base.with_predictors(predictors), None))

        for stem, spec, subsets in ladder_specs:
            task_id = f"{stem}:{spec.link.value}"
            filename = f"{stem}_{spec.link.value}.json"
            tracker.update_progress(task_id, f"Ladder for {describe_spec(spec)}", 0)
            try:
                outcome = self.ladder(spec, subsets)
                files[filename] = dumps_report(outcome["report"])
                failed_rows = [row.label for row in outcome["ladder"].rows if not row.ok]
                message = f"{len(outcome['ladder'])} rows" + (f", failed: {failed_rows}" if failed_rows else "")
                tracker.set_completed(task_id, message, [filename])
            except MburQregError as e:
                tracker.set_error(task_id, str(e))

        manifest = tracker.manifest()
        manifest["study"] = {
            "name": study.name,
            "response": study.response,
            "response_name": display_name(study.response),
            "predictors": list(study.predictors),
        }
        manifest["provenance"] = self.provenance()
        files["manifest.json"] = dumps_report(manifest)

        success = not tracker.all_failed()
        if not success:
            logger.error(f"❌ Every task of study {study.name} failed")
        return {"success": success, "files": files, "manifest": manifest, "fits": fits}
