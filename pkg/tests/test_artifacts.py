import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wqed.artifacts import format_value, read_csv, sha256, svg_plot, write_csv


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(x):
    assert float(format_value(x)) == x


def test_format_types():
    assert format_value(np.float64(0.1)) == "0.1"
    assert format_value(np.int64(3)) == "3"
    assert format_value(True) == "1"
    assert format_value("a") == "a"


def test_csv_layout_and_round_trip(tmp_path):
    rows = [(0.1, 2), (1e-300, -3)]
    path = write_csv(tmp_path / "x.csv", "demo", [("a", "1/Gamma"), ("b", "count")], rows, note="hello")
    text = path.read_bytes().decode()
    assert text.splitlines()[:3] == ["# wqed demo: a [1/Gamma], b [count]", "# hello", "a,b"]
    assert "\r" not in text and text.endswith("\n")
    names, data = read_csv(path)
    assert names == ["a", "b"]
    np.testing.assert_array_equal(data, np.array(rows, dtype=float))


def test_checksum_tracks_content(tmp_path):
    a = write_csv(tmp_path / "a.csv", "demo", [("x", "")], [(1.0,)])
    b = write_csv(tmp_path / "b.csv", "demo", [("x", "")], [(1.0,)])
    c = write_csv(tmp_path / "c.csv", "demo", [("x", "")], [(1.0000000000000002,)])
    assert sha256(a) == sha256(b) != sha256(c)
    assert len(sha256(a)) == 64


def test_svg_is_well_formed(tmp_path):
    x = np.linspace(0, 1, 50)
    path = tmp_path / "p.svg"
    svg_plot(path, x, {"sin": np.sin(x), "flat": np.full(50, 2.0), "gap": np.where(x > 0.5, np.nan, x)},
             "x <a>", "y", "title & more")
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")
    assert len([e for e in root.iter() if e.tag.endswith("polyline")]) >= 3
