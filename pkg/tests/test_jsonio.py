import json

import numpy as np
import pytest

from dysonforge.jsonio import canonical_json, csv_rows, format_float, sha256_of


def test_canonical_json_sorted_and_stable():
    a = canonical_json({"b": 1, "a": [1.0, 2.5], "c": {"y": True, "x": None}})
    b = canonical_json({"c": {"x": None, "y": True}, "a": [1.0, 2.5], "b": 1})
    assert a == b
    assert a.index('"a"') < a.index('"b"') < a.index('"c"')
    assert json.loads(a)["a"] == [1.0, 2.5]


def test_float_formatting_17_digits():
    assert format_float(1 / 3) == "0.33333333333333331"
    assert format_float(1.0) == "1"
    text = canonical_json({"v": 0.1})
    assert "0.10000000000000001" in text


def test_numpy_values_serialize():
    doc = {"arr": np.array([1.5, 2.0]), "n": np.int64(3), "x": np.float64(0.25)}
    assert json.loads(canonical_json(doc)) == {"arr": [1.5, 2.0], "n": 3, "x": 0.25}


def test_complex_and_rejection():
    assert json.loads(canonical_json(1 + 2j)) == {"im": 2.0, "re": 1.0}
    with pytest.raises(TypeError):
        canonical_json({"bad": object()})


def test_hash_tracks_content():
    assert sha256_of({"a": 1}) == sha256_of({"a": 1})
    assert sha256_of({"a": 1}) != sha256_of({"a": 2})


def test_csv_rows_format():
    text = csv_rows(("t", "v"), [(0.0, 1 / 3), (1, "x")])
    lines = text.strip().split("\n")
    assert lines[0] == "t,v"
    assert lines[1] == "0,0.33333333333333331"
    assert lines[2] == "1,x"
