"""Matrix, function, and family files.

Matrix JSON: ``{"n": int, "labels": [str]?, "d": [[value]]}``.
Matrix CSV: n lines of n comma-separated values.
Function JSON: ``{"kind": "piecewise_affine", "pieces": [...]}`` or
``{"kind": "power", "alpha": value}``.  Family JSON: a list of function specs.

A value is a JSON number or a string "p/q"; both parse exactly.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

from .errors import InputError
from .exact import parse_value
from .families import FunctionFamily
from .functions import function_from_json
from .spaces import Dissimilarity


def _reject_constant(name):
    raise ValueError(f"non-finite constant {name}")


def loads_exact(text: str, source: str = "<input>"):
    """json.loads with exact decimals and no NaN/Infinity."""
    try:
        return json.loads(text, parse_float=Fraction, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}", (exc.lineno, exc.colno)) from exc
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from exc


def _line_of_row(text: str, row: int):
    # best effort: the line holding the row-th inner list of "d"
    start = text.find('"d"')
    if start < 0:
        return None
    depth = 0
    seen = -1
    for pos in range(start, len(text)):
        ch = text[pos]
        if ch == "[":
            depth += 1
            if depth == 2:
                seen += 1
                if seen == row:
                    return text.count("\n", 0, pos) + 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                break
    return None


def matrix_from_json(obj, source="<input>", text=None) -> Dissimilarity:
    if not isinstance(obj, dict) or "d" not in obj:
        raise InputError(f"{source}: expected an object with key 'd'")
    rows = obj["d"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError(f"{source}: 'd' must be a list of rows")
    n = obj.get("n", len(rows))
    if not isinstance(n, int) or isinstance(n, bool) or n != len(rows):
        raise InputError(f"{source}: 'n' = {n!r} does not match {len(rows)} rows")
    try:
        return Dissimilarity(rows, obj.get("labels"))
    except InputError as exc:
        loc = exc.location
        if isinstance(loc, tuple) and len(loc) >= 1 and text is not None:
            line = _line_of_row(text, loc[0])
            where = f"line {line}, " if line else ""
            col = f", column {loc[1]}" if len(loc) > 1 else ""
            raise InputError(f"{source}: {where}row {loc[0]}{col}: {exc}", loc) from exc
        raise InputError(f"{source}: {exc}", loc) from exc


def matrix_from_csv(text: str, source="<input>") -> Dissimilarity:
    rows = []
    for lineno, record in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not record or all(not cell.strip() for cell in record):
            continue
        row = []
        for col, cell in enumerate(record, start=1):
            try:
                row.append(parse_value(cell))
            except InputError as exc:
                raise InputError(f"{source}:{lineno}:{col}: {exc}", (lineno, col)) from exc
        rows.append(row)
    try:
        return Dissimilarity(rows)
    except InputError as exc:
        loc = exc.location
        if isinstance(loc, tuple) and loc:
            where = f"line {loc[0] + 1}" + (f", column {loc[1] + 1}" if len(loc) > 1 else "")
            raise InputError(f"{source}: {where}: {exc}", loc) from exc
        raise InputError(f"{source}: {exc}", loc) from exc


def read_matrix(path) -> Dissimilarity:
    path = Path(path)
    text = _read(path)
    if path.suffix.lower() == ".csv":
        return matrix_from_csv(text, str(path))
    return matrix_from_json(loads_exact(text, str(path)), str(path), text)


def read_function(path):
    path = Path(path)
    return function_from_json(loads_exact(_read(path), str(path)), where=str(path))


def read_family(path) -> FunctionFamily:
    path = Path(path)
    return FunctionFamily.from_json(loads_exact(_read(path), str(path)))


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def parse_pairs(text: str):
    """'t1:t2,t1:t2' -> [(t1, t2), ...]."""
    pairs = []
    for idx, chunk in enumerate(filter(None, (c.strip() for c in text.split(",")))):
        parts = chunk.split(":")
        if len(parts) != 2:
            raise InputError(f"pair {idx} {chunk!r} is not of the form t1:t2", idx)
        pairs.append((parse_value(parts[0], where=idx), parse_value(parts[1], where=idx)))
    if not pairs:
        raise InputError("no pairs given")
    return pairs
