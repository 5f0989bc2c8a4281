"""Publication-style figures from memgame experiment CSVs."""

from .csvio import SchemaError, read_stats, read_table, read_trajectory
from .render import KINDS, PlotJob, render

__version__ = "0.1.0"
