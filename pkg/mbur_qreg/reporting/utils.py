import json
import math
from typing import Any, List, Optional, Sequence

import numpy as np
import pandas as pd

CURVE_POINTS = 200


def clean_number(value: Any) -> Any:
    """Plain Python number; NaN and infinities become None."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def to_jsonable(value: Any) -> Any:
    """Recursively convert numpy containers and scalars for json.dumps."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    return clean_number(value)


def dumps_report(report: Any) -> str:
    """
    JSON text for a report: insertion key order, two-space indent, and
    shortest round-trip float text (at most 17 significant digits).
    """
    return json.dumps(to_jsonable(report), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def csv_text(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    frame = pd.DataFrame(list(rows), columns=list(headers))
    return frame.to_csv(index=False, float_format="%.17g", na_rep="")


def fmt4(value: Optional[float]) -> str:
    if value is None:
        return "-"
    if isinstance(value, (bool, np.bool_)):
        return "yes" if value else "no"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "-"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value != 0 and abs(value) < 1e-4:
        return f"{value:.4e}"
    return f"{value:.4f}"


def format_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """Fixed-width text table; numbers rounded to 4 decimals."""
    cells: List[List[str]] = [[str(h) for h in headers]]
    for row in rows:
        cells.append([cell if isinstance(cell, str) else fmt4(cell) for cell in row])
    widths = [max(len(line[i]) for line in cells) for i in range(len(headers))]
    lines = ["  ".join(text.rjust(width) if i else text.ljust(width)
                       for i, (text, width) in enumerate(zip(line, widths))) for line in cells]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines)


def predictor_grid(values: Sequence[float], points: int = CURVE_POINTS) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    return np.linspace(float(values.min()), float(values.max()), points)


def coefficient_label(index: int) -> str:
    return f"B{index}"


def slug(text: str) -> str:
    return "".join(ch if ch.isalnum() else "_" for ch in text.lower()).strip("_")
