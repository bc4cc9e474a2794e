"""
Tests for JSON conversion, sweep frames and written reports.
"""

import math

import pandas as pd

from src.datasets import almost_mathieu_element
from src.report_generator import ReportGenerator, SWEEP_COLUMNS, jsonable, sweep_frame
from src.representation import spectral_report


def test_jsonable_values():
    payload = jsonable({"z": 1 - 2j, "bad": math.inf, "pair": (1, 2.5), 3: None})
    assert payload == {"z": {"re": 1.0, "im": -2.0}, "bad": None, "pair": [1, 2.5], "3": None}


def test_sweep_frame_order(theta):
    report = spectral_report(almost_mathieu_element(0.5, theta), [3, 2], [0.1], nmax=2)
    df = sweep_frame(report, theta.theta, 0.5)
    assert list(df.columns) == SWEEP_COLUMNS
    assert list(df["L"]) == [2] * 5 + [3] * 7
    assert list(df["eigenvalue_index"]) == list(range(1, 6)) + list(range(1, 8))
    for _, group in df.groupby("L"):
        assert group["eigenvalue"].is_monotonic_increasing


def test_sweep_csv_round_trip(tmp_path, theta):
    report = spectral_report(almost_mathieu_element(1.0, theta), [4], [0.0, 0.3], nmax=2)
    path = ReportGenerator(str(tmp_path)).write_sweep_csv(report, theta.theta, 1.0)
    assert path.name == "spectrum_sweep.csv"
    assert b"\r\n" not in path.read_bytes()
    df = pd.read_csv(path, float_precision="round_trip")
    expected = sweep_frame(report, theta.theta, 1.0)
    assert list(df["eigenvalue"]) == list(expected["eigenvalue"])
    assert list(df["z0"]) == list(expected["z0"])


def test_write_report(tmp_path):
    path = ReportGenerator(str(tmp_path / "nested")).write_report("norms", {"value": 0.1})
    assert path.name == "norms_report.json"
    assert path.read_text(encoding="utf-8") == '{\n  "value": 0.1\n}\n'
