"""Reader for the versioned benchmark CSV schema.

Files must start with a ``# schema=1`` line followed by a header row; all
data cells are numeric (``inf`` allowed). No quantum computation happens
here or anywhere else in this package: every number originates upstream.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

SCHEMA_LINE = "# schema=1"

BENCH_COLUMNS = ("trial", "d", "n", "h_m", "h_n", "h_gamma", "r_mutual",
                 "eur1", "eur2", "eur3", "gap13", "gap23", "gap21", "eur2_finite")
SCAN_COLUMNS = ("p", "theta", "gap")


class CsvSchemaError(ValueError):
    """The input file does not match the schema=1 contract."""


class PlotDataError(ValueError):
    """The data is structurally valid but cannot be plotted as requested."""


def read_csv(path, required: tuple) -> dict:
    """Parse a schema=1 CSV into named float columns, validating ``required``."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != SCHEMA_LINE:
        raise CsvSchemaError(f"{path}: missing '{SCHEMA_LINE}' header line")
    if len(lines) < 2:
        raise CsvSchemaError(f"{path}: missing column header row")
    header = [c.strip() for c in lines[1].split(",")]
    missing = [c for c in required if c not in header]
    if missing:
        raise CsvSchemaError(f"{path}: missing column(s) {', '.join(missing)}")
    rows = []
    for k, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise CsvSchemaError(f"{path}: line {k} has {len(cells)} cells, expected {len(header)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise CsvSchemaError(f"{path}: line {k}: {exc}") from exc
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(header)))
    return {name: data[:, j] for j, name in enumerate(header)}
