"""
CSV ingestion, the divide-by-100-then-log predictor transform, listwise
deletion, and the embedded OECD Better Life Index fixture.
"""

import io
import hashlib
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import BinaryIO, Dict, Mapping, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import pandas as pd

from .errors import (
    ColumnNotFoundError,
    CsvFormatError,
    DataError,
    DomainError,
    DuplicateLabelError,
    FixtureChecksumError,
    InsufficientDataError,
    ResponseDomainError,
)
from .qreg import DesignData, ModelSpec

# Set up logging
logger = logging.getLogger(__name__)

FIXTURE_PATH = Path(__file__).parent / "data" / "oecd_bli.csv"
FIXTURE_SHA256 = "301539634f59ed7369ce59bf73de753f7608c689758140cbfe351faa8b39c14e"

CsvSource = Union[str, Path, bytes, BinaryIO, TextIO]


class TransformKind(str, Enum):
    IDENTITY = "identity"
    DIV100_LOG = "div100_log"


@dataclass(frozen=True)
class TransformSpec:
    """Per-column transform; columns not listed use ``default``."""

    kinds: Mapping[str, TransformKind] = field(default_factory=dict)
    default: TransformKind = TransformKind.IDENTITY

    def kind_for(self, column: str) -> TransformKind:
        return TransformKind(self.kinds.get(column, self.default))

    @classmethod
    def for_model(cls, spec: ModelSpec, enabled: bool = True) -> "TransformSpec":
        """Response untouched; predictors div100_log unless transforms are disabled."""
        predictor_kind = TransformKind.DIV100_LOG if enabled else TransformKind.IDENTITY
        kinds = {name: predictor_kind for name in spec.predictors}
        kinds[spec.response] = TransformKind.IDENTITY
        return cls(kinds=kinds)


@dataclass(frozen=True, eq=False)
class DataTable:
    """Rows keyed by a unique label; cells are floats with NaN for missing."""

    frame: pd.DataFrame
    label_name: str = "label"

    @property
    def column_names(self) -> Tuple[str, ...]:
        return tuple(self.frame.columns)

    @property
    def row_labels(self) -> Tuple[str, ...]:
        return tuple(self.frame.index)

    @property
    def n_rows(self) -> int:
        return len(self.frame)

    def require(self, names: Sequence[str]):
        for name in names:
            if name not in self.frame.columns:
                raise ColumnNotFoundError(name, self.column_names)

    def column(self, name: str) -> np.ndarray:
        self.require([name])
        return self.frame[name].to_numpy(dtype=float)

    def columns(self, names: Optional[Sequence[str]] = None) -> Dict[str, np.ndarray]:
        names = list(names) if names else list(self.column_names)
        return {name: self.column(name) for name in names}

    def cell(self, label: str, name: str) -> Optional[float]:
        self.require([name])
        value = float(self.frame.at[label, name])
        return None if np.isnan(value) else value

    def equals(self, other: "DataTable") -> bool:
        return self.label_name == other.label_name and self.frame.equals(other.frame)


def _read_raw(source: CsvSource) -> pd.DataFrame:
    if isinstance(source, bytes):
        source = io.BytesIO(source)
    try:
        # header=None: the header line fixes the field count, longer rows raise.
        # No NA strings: empty cells stay "", fields absent from short rows are NaN.
        raw = pd.read_csv(source, header=None, dtype=str, keep_default_na=False, na_values=[],
                          encoding="utf-8")
    except pd.errors.ParserError as e:
        raise CsvFormatError(f"malformed CSV: {e}") from e
    except pd.errors.EmptyDataError as e:
        raise CsvFormatError("CSV has no header row") from e
    except UnicodeDecodeError as e:
        raise CsvFormatError(f"CSV is not valid UTF-8: {e}") from e

    header = raw.iloc[0].tolist()
    if any(not isinstance(name, str) or name.strip() == "" for name in header[1:]):
        raise CsvFormatError("header has empty column names", row=1)
    body = raw.iloc[1:].reset_index(drop=True)
    body.columns = [str(name).strip() for name in header]
    return body


def load_csv(source: CsvSource) -> DataTable:
    """
    Parse a header-first CSV whose first column holds row labels.

    Empty cells are missing values. Row numbers in errors count the header
    as line 1, so the first data row is row 2.
    """
    raw = _read_raw(source)
    if raw.shape[1] < 2:
        raise CsvFormatError("CSV needs a label column and at least one data column")

    label_name = str(raw.columns[0])
    # only short rows leave NaN behind
    ragged = raw.isna()
    if ragged.to_numpy().any():
        row, col = np.argwhere(ragged.to_numpy())[0]
        raise CsvFormatError("ragged row: too few fields", row=int(row) + 2, column=str(raw.columns[col]))

    labels = raw[label_name]
    duplicated = labels[labels.duplicated()].tolist()
    if duplicated:
        raise DuplicateLabelError(f"duplicate row labels: {', '.join(duplicated)}")

    cells = raw.drop(columns=[label_name]).apply(lambda column: column.str.strip())
    values = cells.apply(pd.to_numeric, errors="coerce").astype(float)
    bad = (cells != "") & ~np.isfinite(values.fillna(np.inf))
    if bad.to_numpy().any():
        row, col = np.argwhere(bad.to_numpy())[0]
        column = str(cells.columns[col])
        raise CsvFormatError(f"unparseable numeric cell {cells.iat[row, col]!r}",
                             row=int(row) + 2, column=column)

    values.index = pd.Index(labels.tolist(), name=label_name)
    logger.info(f"📊 Loaded table: {len(values)} rows, {values.shape[1]} columns")
    return DataTable(frame=values, label_name=label_name)


def to_csv(table: DataTable) -> str:
    """Serialize with shortest round-trip float text; missing cells are empty."""
    buffer = io.StringIO()
    buffer.write(",".join([table.label_name, *table.column_names]) + "\n")
    for label, row in table.frame.iterrows():
        cells = ["" if np.isnan(value) else repr(float(value)) for value in row.to_numpy(dtype=float)]
        buffer.write(",".join([str(label), *cells]) + "\n")
    return buffer.getvalue()


def transform_div100_log(x: Sequence[float]) -> np.ndarray:
    values = np.asarray(x, dtype=float)
    bad = np.flatnonzero(~(values > 0))
    if bad.size:
        raise DomainError(f"div100_log needs positive values; offending indices {bad.tolist()}")
    return np.log(values / 100.0)


def apply_transform(kind: TransformKind, x: Sequence[float]) -> np.ndarray:
    if TransformKind(kind) is TransformKind.DIV100_LOG:
        return transform_div100_log(x)
    return np.asarray(x, dtype=float)


def complete_rows(table: DataTable, names: Sequence[str]) -> np.ndarray:
    table.require(names)
    return ~table.frame[list(names)].isna().any(axis=1).to_numpy()


def build_design(table: DataTable, spec: ModelSpec,
                 transforms: Optional[TransformSpec] = None) -> DesignData:
    """Listwise deletion, transforms, intercept column; row order is preserved."""
    transforms = transforms or TransformSpec.for_model(spec, enabled=spec.transform)
    used = [spec.response, *spec.predictors]
    keep = complete_rows(table, used)

    dropped = [label for label, ok in zip(table.row_labels, keep) if not ok]
    if dropped:
        logger.info(f"Listwise deletion dropped {len(dropped)} rows: {', '.join(map(str, dropped))}")

    n, k = int(keep.sum()), len(spec.predictors)
    if n < k + 2:
        raise InsufficientDataError(f"only {n} complete rows for {k} predictors (need {k + 2})")

    frame = table.frame.loc[keep, used]
    labels = tuple(str(label) for label in frame.index)

    y = apply_transform(transforms.kind_for(spec.response), frame[spec.response].to_numpy(dtype=float))
    outside = [label for label, value in zip(labels, y) if not 0.0 < value < 1.0]
    if outside:
        raise ResponseDomainError(f"response {spec.response!r} must lie strictly inside (0, 1)", outside)

    columns = [np.ones(n)]
    for name in spec.predictors:
        try:
            columns.append(apply_transform(transforms.kind_for(name), frame[name].to_numpy(dtype=float)))
        except DomainError as e:
            raise DataError(f"column {name!r}: {e}") from e

    return DesignData(y=y, x=np.column_stack(columns), row_labels=labels, predictors=spec.predictors)


def load_fixture(verify: bool = True) -> DataTable:
    """The embedded OECD table: 41 countries, 9 indicators, Japan's education cell empty."""
    raw = FIXTURE_PATH.read_bytes()
    if verify:
        digest = hashlib.sha256(raw).hexdigest()
        if digest != FIXTURE_SHA256:
            raise FixtureChecksumError(f"fixture digest {digest} does not match {FIXTURE_SHA256}")
    return load_csv(raw)


def load_table(path: Optional[Union[str, Path]] = None) -> DataTable:
    if path is None:
        return load_fixture()
    path = Path(path)
    if not path.exists():
        raise DataError(f"data file not found: {path}")
    return load_csv(path)
