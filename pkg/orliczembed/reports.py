"""
Report output for orliczembed.
Numbers are written with 12 significant digits, JSON keys sorted, and every
JSON report is validated against its schema before it is written.
"""

import json
import math
import sys
from functools import lru_cache
from pathlib import Path

import jsonschema
import numpy as np
import pandas as pd

from .config import log
from .errors import InvariantError

SCHEMA_DIR = Path(__file__).parent / "schemas"
SIGNIFICANT_DIGITS = 12
FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"

SCHEMAS = ("verify_report", "construct_report", "distortion_report", "psi_matrix")


def round_value(value):
    """Recursively convert to plain JSON types; floats rounded, non-finite to None."""
    if isinstance(value, dict):
        return {str(k): round_value(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return round_value(value.tolist())
    if isinstance(value, (list, tuple)):
        return [round_value(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return None
        return float(f"{v:.{SIGNIFICANT_DIGITS}g}")
    return value


@lru_cache(maxsize=None)
def load_schema(name):
    if name not in SCHEMAS:
        raise InvariantError(f"Unknown report schema {name!r}")
    with open(SCHEMA_DIR / f"{name}.schema.json", "r", encoding="utf-8") as f:
        return json.load(f)


def validate_report(report, schema):
    """Raise InvariantError when ``report`` does not match the named schema."""
    try:
        jsonschema.validate(report, load_schema(schema))
    except jsonschema.ValidationError as exc:
        raise InvariantError(f"Report does not match {schema}: {exc.message}") from exc


def dumps(report, schema):
    data = round_value(report)
    validate_report(data, schema)
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(report, schema, out=None):
    """Write a validated JSON report to ``out`` (stdout when None); returns the text."""
    text = dumps(report, schema)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
        log(f"Report written to {out}")
    return text


def write_csv(frame: pd.DataFrame, out=None):
    """Write a table as CSV (stdout when None); returns the text."""
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
        log(f"Table written to {out}")
    return text
