"""Figure generation from retroq benchmark CSVs (no quantum computation here)."""

from .csvio import BENCH_COLUMNS, SCAN_COLUMNS, CsvSchemaError, PlotDataError, read_csv
from .plots import HeatmapResult, PlotSpec, ScatterResult, plot_heatmap, plot_scatter

__version__ = "0.1.0"
