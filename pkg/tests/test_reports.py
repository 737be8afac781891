"""Tests for report rounding, schema validation and output."""

import json
import math

import numpy as np
import pandas as pd
import pytest

from orliczembed.errors import InvariantError
from orliczembed.reports import SCHEMAS, dumps, load_schema, round_value, write_csv, write_json

VERIFY = {
    "lemma": "l22",
    "params": {"seed": 0, "mode": "auto", "conjugate": "raw"},
    "pass": True,
    "empirical_constants": {"5": {"min_ratio": 0.5, "max_ratio": 1.25, "instances": 3}},
    "paper_constants": {"5": {"lower": 0.125, "upper": 2.0}},
    "worst_case_instance": None,
}


def test_round_value_converts_numpy_and_non_finite():
    data = round_value({
        "a": np.float64(1 / 3),
        "b": np.arange(3),
        "c": (math.inf, np.bool_(True)),
        1: np.int64(4),
    })
    assert data == {"a": 0.333333333333, "b": [0, 1, 2], "c": [None, True], "1": 4}
    assert isinstance(data["c"][1], bool)


def test_every_schema_loads():
    for name in SCHEMAS:
        assert load_schema(name)["type"] == "object"
    with pytest.raises(InvariantError):
        load_schema("nope")


def test_dumps_sorts_keys_and_validates():
    text = dumps(VERIFY, "verify_report")
    assert text.endswith("\n")
    assert list(json.loads(text)) == sorted(VERIFY)
    with pytest.raises(InvariantError):
        dumps(dict(VERIFY, params={"seed": 0, "mode": "auto", "conjugate": "normalized"}),
              "verify_report")
    with pytest.raises(InvariantError):
        dumps({k: v for k, v in VERIFY.items() if k != "pass"}, "verify_report")


def test_write_json_to_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    text = write_json(VERIFY, "verify_report", out)
    assert out.read_text() == text
    assert capsys.readouterr().out == ""
    write_json(VERIFY, "verify_report")
    assert json.loads(capsys.readouterr().out)["lemma"] == "l22"


def test_write_csv_uses_twelve_digits(tmp_path):
    frame = pd.DataFrame({"ratio": [1 / 3, 2.0]})
    out = tmp_path / "table.csv"
    text = write_csv(frame, out)
    assert text == "ratio\n0.333333333333\n2\n"
    assert out.read_text() == text
