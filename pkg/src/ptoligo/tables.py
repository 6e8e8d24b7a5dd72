"""Deterministic CSV/JSON emission and round-trip parsing.

Numbers are written with 17 significant digits, which reconstructs IEEE
doubles exactly, so parse(emit(x)) == x and re-emission is byte identical.
Writers normalize to '\n' line endings regardless of platform.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import SchemaError

Cell = float | bool | str


def format_number(x: float) -> str:
    return "%.17g" % float(x)


def _format_cell(value: Cell) -> str:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        if any(c in value for c in ",\n\r\""):
            raise SchemaError(f"cell value {value!r} would need quoting")
        return value
    return format_number(value)


def emit_csv(header: list[str], rows: list[list[Cell]]) -> str:
    """Render a table; every row must match the header width."""
    lines = [",".join(header)]
    width = len(header)
    for row in rows:
        if len(row) != width:
            raise SchemaError(
                f"row width {len(row)} does not match header width {width}"
            )
        lines.append(",".join(_format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path: str | Path, header: list[str], rows: list[list[Cell]]) -> None:
    Path(path).write_text(emit_csv(header, rows), encoding="utf-8", newline="")


def _parse_cell(text: str, where: str) -> Cell:
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return float(text)
    except ValueError:
        raise SchemaError(f"{where}: expected a number, got {text!r}") from None


def parse_csv(text: str, expected_header: list[str] | None = None):
    """Parse a CSV produced by emit_csv back into (header, rows).

    Numeric cells come back as floats, the literals true/false as bools.
    Raises a schema error on ragged rows, an unexpected header, or any
    unparseable cell.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise SchemaError("empty file where a CSV table was expected")
    header = lines[0].split(",")
    if expected_header is not None and header != expected_header:
        raise SchemaError(
            f"bad header: expected {expected_header}, got {header}"
        )
    rows: list[list[Cell]] = []
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(
                f"line {i}: {len(cells)} cells under a {len(header)}-column header"
            )
        rows.append([_parse_cell(c, f"line {i}") for c in cells])
    return header, rows


def read_csv(path: str | Path, expected_header: list[str] | None = None):
    return parse_csv(Path(path).read_text(encoding="utf-8"), expected_header)


def _jsonable(obj):
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise SchemaError(f"non-finite number {obj} cannot be serialized")
        return obj
    raise SchemaError(f"cannot serialize {type(obj).__name__} to JSON")


def emit_json(obj) -> str:
    """Canonical JSON: sorted keys, two-space indent, exact float repr."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(emit_json(obj), encoding="utf-8", newline="")


def parse_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc


def read_json(path: str | Path):
    return parse_json(Path(path).read_text(encoding="utf-8"))
