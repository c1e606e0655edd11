"""
Output formatting for the CLI.

Numbers are written with 17 significant digits so doubles round-trip exactly.
Rows are written in the order given; identical inputs give identical bytes.
"""

import csv
import io
import json
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from cauchy_szego.geometry import ScalarPoint, is_infinity

Value = Union[float, int, str, None]


def format_number(x: float) -> str:
    return "%.17g" % x


def format_point(z: ScalarPoint) -> str:
    """Inverse of parse_complex: `inf`, or `a+bi` / `a-bi`."""
    if is_infinity(z):
        return "inf"
    z = complex(z)
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{format_number(z.real)}{sign}{format_number(abs(z.imag))}i"


def _cell(value: Value) -> str:
    if isinstance(value, float):
        return format_number(value)
    return "" if value is None else str(value)


def _json_token(value: Value) -> str:
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, (int, float)):
        return format_number(value) if math.isfinite(value) else "null"
    return json.dumps(value)


def rows_to_csv(rows: Sequence[Dict[str, Value]], fieldnames: List[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(fieldnames)
    for row in rows:
        writer.writerow([_cell(row[name]) for name in fieldnames])
    return buffer.getvalue()


def to_json(data) -> str:
    """
    JSON text for nested dicts / lists of scalars, with every float written
    to 17 significant digits and non-finite floats as null.
    """
    if isinstance(data, dict):
        items = [f"{json.dumps(str(k))}: {to_json(v)}" for k, v in data.items()]
        return "{" + ", ".join(items) + "}"
    if isinstance(data, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in data) + "]"
    return _json_token(data)


def rows_to_json(rows: Sequence[Dict[str, Value]], fieldnames: List[str]) -> str:
    lines = [to_json({name: row[name] for name in fieldnames}) for row in rows]
    return "[\n" + ",\n".join("  " + line for line in lines) + "\n]\n"


def render_rows(rows: Sequence[Dict[str, Value]], fieldnames: List[str], fmt: str = "csv") -> str:
    """
    Render scan rows as CSV (header line first) or as a JSON array of objects.

    Example:
        >>> render_rows([{"phi": 0.0, "lambda": 1.0}], ["phi", "lambda"])
        'phi,lambda\\n0,1\\n'
    """
    if fmt == "json":
        return rows_to_json(rows, fieldnames)
    return rows_to_csv(rows, fieldnames)


def emit(text: str, out: Optional[Union[str, Path]] = None) -> None:
    """
    Write text to a file, or to stdout when out is None.

    Raises:
        OSError: If the file cannot be written
    """
    if out is None:
        print(text, end="" if text.endswith("\n") else "\n")
        return
    Path(out).write_text(text, encoding="utf-8")
