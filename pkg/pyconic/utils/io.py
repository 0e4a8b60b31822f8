"""
Deterministic CSV and JSON writers for reports.
"""

import csv
import json
import math
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

import numpy as np

PathLike = Union[str, Path]


def format_float(value: float) -> str:
    """Shortest text for value with 17 significant digits; nan/inf spelled out."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def normalize(obj: Any) -> Any:
    """
    Convert a report object into plain JSON-compatible data.

    Numpy scalars and arrays become Python numbers and lists, floats are
    rounded to 17 significant digits, non-finite floats become strings and
    dataclasses become dicts.
    """
    if is_dataclass(obj) and not isinstance(obj, type):
        return normalize(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [normalize(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            return format_float(value)
        return float(format_float(value))
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps(obj: Any) -> str:
    """Serialize with sorted keys and a trailing newline."""
    return json.dumps(normalize(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path: PathLike, obj: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """
    Write a comma-separated file with a header row and LF line endings.

    Args:
        path: Output file
        header: Column names
        rows: Row values; floats are written with 17 significant digits

    Returns:
        Path: The written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def read_csv_columns(path: PathLike) -> dict:
    """Read a numeric CSV with a header row into a dict of float arrays."""
    with Path(path).open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        data = [[float(v) for v in row] for row in reader if row]
    columns = np.asarray(data, dtype=float).reshape(-1, len(header))
    return {name: columns[:, i] for i, name in enumerate(header)}
