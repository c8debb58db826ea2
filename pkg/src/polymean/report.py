"""Lossless JSON/CSV encoding of results.

Rationals are written as ``"num/den"`` strings, floats as
``{"float": "<decimal>", "precision_bits": n}``, and both decode back to
the same value.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Any

from .algebra import ApproxField, PolyInQ, field_of

SCHEMA = "polymean/1"


def encode_value(x: Any) -> Any:
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return {"float": repr(x), "precision_bits": 53}
    if isinstance(x, PolyInQ):
        return str(x)
    if isinstance(x, dict):
        return {str(k): encode_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode_value(v) for v in x]
    if hasattr(x, "_mpf_"):
        fld = field_of(x)
        # enough digits to reproduce every bit
        digits = int(fld.precision_bits * 0.30103) + 3
        return {"float": fld.ctx.nstr(x, digits, min_fixed=1, max_fixed=0), "precision_bits": fld.precision_bits}
    raise TypeError(f"cannot encode {type(x).__name__}")


def decode_value(x: Any) -> Any:
    if isinstance(x, str) and _is_rational(x):
        return Fraction(x)
    if isinstance(x, dict):
        if set(x) == {"float", "precision_bits"}:
            bits = int(x["precision_bits"])
            if bits == 53:
                return float(x["float"])
            return ApproxField(bits).ctx.mpf(x["float"])
        return {k: decode_value(v) for k, v in x.items()}
    if isinstance(x, list):
        return [decode_value(v) for v in x]
    return x


def _is_rational(s: str) -> bool:
    num, sep, den = s.partition("/")
    if not sep:
        return False
    return num.lstrip("-").isdigit() and den.isdigit()


def envelope(subcommand: str, inputs: dict, results: list, warnings: list) -> dict:
    return {
        "schema": SCHEMA,
        "subcommand": subcommand,
        "inputs": encode_value(inputs),
        "results": [encode_value(r) for r in results],
        "warnings": list(warnings),
    }


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load_report(text: str) -> dict:
    """Parse a JSON report, turning encoded rationals and floats back into numbers."""
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    return decode_value(doc)


def to_csv(results: list) -> str:
    """One row per result; nested values are embedded as JSON strings."""
    rows = [encode_value(r) for r in results]
    fields: list[str] = []
    for r in rows:
        for k in r:
            if k not in fields:
                fields.append(k)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: _csv_cell(r.get(k)) for k in fields})
    return buf.getvalue()


def _csv_cell(v: Any) -> Any:
    if isinstance(v, dict) and set(v) == {"float", "precision_bits"}:
        return v["float"]
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return v
