#!/usr/bin/env python3
"""
End-to-end tests for the mbur_qreg command line.
"""

import json
import sys
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

# Add the current directory to the path so we can import our modules
sys.path.insert(0, str(Path(__file__).parent))

from mbur_qreg.cli import main, parse_subsets

FIT_ARGS = ["fit", "--response", "education", "--predictors", "employment", "--link", "logit"]


def read_bundle(folder: Path) -> dict:
    return {path.name: path.read_bytes() for path in sorted(folder.iterdir())}


def test_describe():
    assert main(["describe", "--columns", "employment,air"]) == 0


def test_describe_writes_csv():
    with tempfile.TemporaryDirectory() as tmp:
        target = Path(tmp) / "describe.csv"
        assert main(["describe", "--out", str(target)]) == 0
        frame = pd.read_csv(target)
        assert len(frame) == 9
        employment = frame.set_index("column").loc["employment"]
        assert abs(employment["mean"] - 67.6829) < 1e-4


def test_fit_writes_reproducible_bundle():
    with tempfile.TemporaryDirectory() as tmp:
        first, second = Path(tmp) / "a", Path(tmp) / "b"
        assert main(FIT_ARGS + ["--out", str(first)]) == 0
        assert main(FIT_ARGS + ["--out", str(second)]) == 0

        files = read_bundle(first)
        assert set(files) == {"report.json", "curve.csv", "residuals.csv", "qq.csv"}
        assert files == read_bundle(second)

        report = json.loads(files["report.json"])
        assert report["n"] == 40
        assert abs(report["log_likelihood"] - 37.9883) < 0.005
        assert "generated_at" not in report["provenance"]

        curve = pd.read_csv(first / "curve.csv")
        assert list(curve.columns) == ["x_transformed", "q25", "q50", "q75"]
        assert len(curve) == 200
        assert np.all(curve["q25"] < curve["q50"]) and np.all(curve["q50"] < curve["q75"])
        assert np.all(np.diff(curve["q50"]) > 0)

        residuals = pd.read_csv(first / "residuals.csv")
        assert list(residuals.columns) == ["label", "rq", "cs", "fitted_cdf", "x_1"]
        assert len(residuals) == 40


def test_ladder_without_predictors_is_usage_error():
    assert main(["ladder", "--response", "education"]) == 2


def test_unknown_study_is_usage_error():
    assert main(["report", "--study", "gdp"]) == 2


def test_unknown_column_is_data_error():
    assert main(["fit", "--response", "education", "--predictors", "gdp"]) == 3


def test_response_outside_unit_interval_is_data_error():
    assert main(["fit", "--response", "employment", "--predictors", "air"]) == 3


def test_ladder_with_subsets():
    with tempfile.TemporaryDirectory() as tmp:
        target = Path(tmp) / "ladder.json"
        code = main(["ladder", "--response", "safety", "--predictors", "employment,air",
                     "--subsets", "air;all", "--out", str(target)])
        assert code == 0
        report = json.loads(target.read_text(encoding="utf-8"))
        assert [row["label"] for row in report["rows"]] == ["Rx2", "Null"]
        assert abs(report["rows"][0]["lrt"] - 0.0867) < 0.02


def test_corr_report():
    with tempfile.TemporaryDirectory() as tmp:
        target = Path(tmp) / "corr.json"
        code = main(["corr", "--columns", "employment,air", "--response", "safety", "--out", str(target)])
        assert code == 0
        report = json.loads(target.read_text(encoding="utf-8"))
        assert report["columns"] == ["safety", "employment", "air"]
        assert abs(report["collinearity"]["condition_indices"][0] - 2.0437) < 0.05


def test_report_bundle():
    with tempfile.TemporaryDirectory() as tmp:
        out_dir = Path(tmp) / "safety"
        assert main(["report", "--study", "safety", "--out-dir", str(out_dir), "--workers", "2"]) == 0

        manifest = json.loads((out_dir / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["failed"] == 0
        assert manifest["study"]["response"] == "safety"
        assert "ladder:logit" in manifest["tasks"]
        for name in ("summary.csv", "describe.csv", "correlations.json", "ladder_logit.json"):
            assert (out_dir / name).exists(), name
        for predictor in ("employment", "air"):
            for link in ("logit", "cloglog", "loglog"):
                assert (out_dir / "fits" / f"{predictor}_{link}" / "report.json").exists()

        summary = pd.read_csv(out_dir / "summary.csv")
        assert len(summary) == 6
        assert list(summary["link"][:3]) == ["logit", "cloglog", "loglog"]


def test_sample_then_fit_alpha():
    with tempfile.TemporaryDirectory() as tmp:
        target = Path(tmp) / "sample.csv"
        assert main(["sample", "--alpha", "0.8", "--n", "500", "--seed", "7", "--out", str(target)]) == 0
        frame = pd.read_csv(target)
        assert list(frame.columns) == ["index", "y"]
        assert len(frame) == 500
        assert frame["y"].between(0, 1, inclusive="neither").all()
        assert main(["fit-alpha", "--data", str(target), "--response", "y"]) == 0


def test_parse_subsets():
    predictors = ["employment", "air", "homicide"]
    assert parse_subsets(None, predictors) is None
    assert parse_subsets("employment;air, homicide;all;none", predictors) == [
        ("employment",), ("air", "homicide"), tuple(predictors), (),
    ]


if __name__ == "__main__":
    tests = [(name, fn) for name, fn in sorted(globals().items()) if name.startswith("test_") and callable(fn)]
    failed = 0
    for name, fn in tests:
        try:
            fn()
            print(f"✅ {name}")
        except Exception as e:
            failed += 1
            print(f"❌ {name}: {e}")
    print(f"\n📊 {len(tests) - failed}/{len(tests)} passed")
    sys.exit(1 if failed else 0)
