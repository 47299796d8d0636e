"""
Model-selection statistics and the nested-model comparison ladder.
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, MburQregError, NumericalError
from .numerics import chi_squared_sf
from .optimizer import NmOptions
from .qreg import DesignData, FitResult, ModelSpec, fit

# Set up logging
logger = logging.getLogger(__name__)

DEFAULT_WORKERS = 4


@dataclass(frozen=True)
class IcSet:
    aic: float
    caic: float
    bic: float
    hqic: float

    def to_dict(self) -> Dict[str, float]:
        return {"aic": self.aic, "caic": self.caic, "bic": self.bic, "hqic": self.hqic}


@dataclass(frozen=True)
class LrtResult:
    statistic: float
    p_value: float
    df: int

    def __iter__(self):
        # unpacks as (statistic, p)
        return iter((self.statistic, self.p_value))


@dataclass(frozen=True)
class LadderRow:
    label: str
    removed: Tuple[str, ...]
    fit: Optional[FitResult]
    lrt_vs_full: float
    lrt_p: float
    sign_preserved: bool
    ic: Optional[IcSet] = None
    r2_vs_full: float = math.nan
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class Ladder:
    """A full model, its null model and one row per requested removal."""

    full: FitResult
    null: FitResult
    full_ic: IcSet
    full_vs_null: LrtResult
    full_r2: float
    rows: Tuple[LadderRow, ...]
    single_slopes: Dict[str, float]

    def __iter__(self):
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def row(self, label: str) -> LadderRow:
        for candidate in self.rows:
            if candidate.label == label:
                return candidate
        raise KeyError(label)


def information_criteria(ll: float, p: int, n: int) -> IcSet:
    """AIC, corrected AIC, BIC and Hannan-Quinn for p parameters and n rows."""
    if p < 0 or n < 1:
        raise DomainError(f"information criteria need p >= 0 and n >= 1, got p={p}, n={n}")
    if p > 0 and n <= p + 1:
        raise DomainError(f"CAIC is undefined for n={n} <= p + 1 = {p + 1}")

    deviance = -2.0 * ll
    aic = deviance + 2.0 * p
    caic = aic + (2.0 * p * (p + 1) / (n - p - 1) if p > 0 else 0.0)
    bic = deviance + p * math.log(n)
    hqic = deviance + (2.0 * p * math.log(math.log(n)) if p > 0 else 0.0)
    return IcSet(aic=aic, caic=caic, bic=bic, hqic=hqic)


def lrt(ll_full: float, ll_nested: float, df: int) -> LrtResult:
    if df < 1:
        raise DomainError(f"LRT needs df >= 1, got {df}")
    statistic = 2.0 * (ll_full - ll_nested)
    if statistic < 0:
        if statistic < -1e-6:
            logger.warning(f"⚠️ Nested model beats the full model by {-statistic / 2:.3g} "
                           f"log-likelihood units; LRT floored at 0")
        statistic = 0.0
    return LrtResult(statistic=statistic, p_value=chi_squared_sf(statistic, df), df=df)


def pseudo_r2(ll_null: float, ll_full: float, n: int) -> float:
    if n < 1:
        raise DomainError(f"pseudo R^2 needs n >= 1, got {n}")
    return 1.0 - math.exp((2.0 / n) * (ll_null - ll_full))


def fit_ic(result: FitResult) -> IcSet:
    return information_criteria(result.log_likelihood, result.p, result.n)


def removal_label(removed: Sequence[str], predictors: Sequence[str]) -> str:
    """Rx1,x3 style label from positions in the full predictor list (1-based)."""
    if not removed:
        return "Full"
    if len(removed) == len(predictors):
        return "Null"
    positions = sorted(predictors.index(name) + 1 for name in removed)
    return "R" + ",".join(f"x{i}" for i in positions)


def single_removals(predictors: Sequence[str]) -> List[Tuple[str, ...]]:
    """Default subsets: each predictor alone, then all of them (the null model)."""
    return [(name,) for name in predictors] + [tuple(predictors)]


def _normalise_subsets(spec: ModelSpec, subsets: Iterable[Sequence[str]]) -> List[Tuple[str, ...]]:
    normalised = []
    for subset in subsets:
        removed = tuple(subset)
        unknown = [name for name in removed if name not in spec.predictors]
        if unknown:
            raise DomainError(f"cannot remove {unknown}: not among predictors {spec.predictors}")
        if len(set(removed)) != len(removed):
            raise DomainError(f"removal subset {removed} repeats a predictor")
        # keep the full-model column order
        normalised.append(tuple(name for name in spec.predictors if name in removed))
    return normalised


def _sign_preserved(result: FitResult, single_slopes: Dict[str, float]) -> bool:
    for name, slope in zip(result.spec.predictors, result.beta_hat[1:]):
        reference = single_slopes.get(name)
        if reference is None or not math.isfinite(reference):
            return False
        if np.sign(slope) != np.sign(reference):
            return False
    return True


def drop_one_ladder(
    spec: ModelSpec,
    data: DesignData,
    subsets: Optional[Iterable[Sequence[str]]] = None,
    options: Optional[NmOptions] = None,
    workers: int = DEFAULT_WORKERS,
) -> Ladder:
    """
    Fit the full model and one reduced model per removal subset, all on the
    full model's rows.

    Each subset names the predictors REMOVED: the empty subset is the full
    model against itself and the complete set is the null model. A row whose
    fit fails carries the error and the ladder continues.
    """
    if not spec.predictors:
        raise DomainError("ladder needs at least one predictor to remove")
    removals = _normalise_subsets(spec, single_removals(spec.predictors) if subsets is None else subsets)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        full_future = executor.submit(fit, spec, data, options)
        null_future = executor.submit(fit, spec.null(), data.select(()), options)
        single_futures = {
            name: executor.submit(fit, spec.with_predictors((name,)), data.select((name,)), options)
            for name in spec.predictors
        }

        row_futures = []
        for removed in removals:
            kept = tuple(name for name in spec.predictors if name not in removed)
            row_futures.append(
                (removed, executor.submit(fit, spec.with_predictors(kept), data.select(kept), options))
            )

        full = full_future.result()
        null = null_future.result()
        single_slopes = {}
        for name, future in single_futures.items():
            try:
                single_slopes[name] = float(future.result().beta_hat[1])
            except MburQregError as e:
                logger.warning(f"⚠️ Single-predictor fit for {name} failed: {e}")
                single_slopes[name] = math.nan

        rows = []
        for removed, future in row_futures:
            label = removal_label(removed, spec.predictors)
            try:
                reduced = future.result()
            except MburQregError as e:
                logger.error(f"❌ Ladder row {label} failed: {e}")
                rows.append(LadderRow(label, removed, None, math.nan, math.nan, False, error=str(e)))
                continue

            if reduced.n != full.n:
                raise NumericalError(f"ladder row {label} used {reduced.n} rows, the full model {full.n}")
            if removed:
                test = lrt(full.log_likelihood, reduced.log_likelihood, len(removed))
            else:
                test = LrtResult(0.0, 1.0, 0)
            rows.append(LadderRow(
                label=label,
                removed=removed,
                fit=reduced,
                lrt_vs_full=test.statistic,
                lrt_p=test.p_value,
                sign_preserved=_sign_preserved(reduced, single_slopes),
                ic=fit_ic(reduced),
                r2_vs_full=pseudo_r2(reduced.log_likelihood, full.log_likelihood, full.n),
            ))
            logger.info(f"📊 Ladder {label}: LL={reduced.log_likelihood:.4f}, "
                        f"LRT={test.statistic:.4f} (p={test.p_value:.4g})")

    return Ladder(
        full=full,
        null=null,
        full_ic=fit_ic(full),
        full_vs_null=lrt(full.log_likelihood, null.log_likelihood, spec.k),
        full_r2=pseudo_r2(null.log_likelihood, full.log_likelihood, full.n),
        rows=tuple(rows),
        single_slopes=single_slopes,
    )
