"""CSV emission and parsing for traces and experiment tables.

Every number is written with 17 significant digits, so parsing a file gives
back the exact doubles that were rendered. Files are UTF-8 with LF line
endings and are written atomically (temporary file, then rename).
"""
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union
import logging
import os
import tempfile

import numpy as np
import polars as pl

from ..schemes.iteration import IterationRecord, IterationTrace
from ..schemes.spaces import norm

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["n", "scheme", "x", "err", "residual"]

Cell = Union[int, float, str, None]


def format_number(value: Cell) -> Optional[str]:
    """17 significant digits for floats, plain text for ints and strings, None stays empty."""
    if value is None:
        return None
    if isinstance(value, (bool, np.bool_)):
        raise ValueError("Booleans are not valid CSV numbers")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def render_table(columns: Dict[str, Sequence[Cell]]) -> pl.DataFrame:
    """Build a string-typed DataFrame from equally long columns."""
    lengths = {len(values) for values in columns.values()}
    if len(lengths) > 1:
        raise ValueError(f"Columns have different lengths: {lengths}")
    return pl.DataFrame(
        {name: [format_number(v) for v in values] for name, values in columns.items()},
        schema={name: pl.Utf8 for name in columns},
    )


def _point_summary(x) -> float:
    # vectors and grid functions are summarised by their max-norm
    if isinstance(x, np.ndarray):
        return norm(x)
    return float(x)


def render_traces(traces: Iterable[IterationTrace]) -> pl.DataFrame:
    """One row per (scheme, iteration) with header n,scheme,x,err,residual."""
    columns: Dict[str, List[Cell]] = {name: [] for name in TRACE_COLUMNS}
    for trace in traces:
        for record in trace.records:
            columns["n"].append(record.n)
            columns["scheme"].append(trace.scheme.value)
            columns["x"].append(_point_summary(record.x))
            columns["err"].append(record.err)
            columns["residual"].append(record.residual)
    return render_table(columns)


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def write_table(df: pl.DataFrame, path: Path) -> Path:
    """Write a rendered table atomically and return its path."""
    text = df.write_csv(line_terminator="\n")
    atomic_write_text(Path(path), text)
    logger.info("Wrote %s (%d rows)", path, df.height)
    return Path(path)


def read_table(path: Path) -> Dict[str, List[Optional[str]]]:
    """Read a CSV written by write_table, keeping every cell as text.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If the file has no header.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"CSV file not found at {path}")
    raw = path.read_bytes()
    if b"\r" in raw:
        raise ValueError(f"{path} does not use LF line endings")
    df = pl.read_csv(path, infer_schema=False)
    if not df.columns:
        raise ValueError("CSV file has no headers")
    return {name: df[name].to_list() for name in df.columns}


def parse_float(text: Optional[str]) -> Optional[float]:
    return None if text is None or text == "" else float(text)


def parse_traces(path: Path) -> Dict[str, List[IterationRecord]]:
    """Parse a trace CSV back into records grouped by scheme name."""
    table = read_table(path)
    if list(table) != TRACE_COLUMNS:
        raise ValueError(f"Expected header {','.join(TRACE_COLUMNS)}, got {','.join(table)}")
    grouped: Dict[str, List[IterationRecord]] = {}
    for n, scheme, x, err, residual in zip(*(table[name] for name in TRACE_COLUMNS)):
        grouped.setdefault(scheme, []).append(
            IterationRecord(int(n), parse_float(x), parse_float(err), parse_float(residual))
        )
    return grouped
