"""Readers for the experiment CSV schemas.

Trajectory files carry one row per record: a time axis ("step" for the
discrete algorithm, "t" for the continuous one), the stationary payoff,
the KL distance, both players' marginals, the flattened strategy tables,
and (for the 2-action one-memory setting) the concavity indicator.
Stats files carry time, kl_mean, kl_std, n_samples.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


class SchemaError(ValueError):
    """Input CSV does not match the documented experiment schemas."""


@dataclass
class Table:
    """A parsed CSV: ordered column names and a float matrix."""

    path: str
    columns: list[str]
    data: np.ndarray

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.data[:, self.columns.index(name)]
        except ValueError:
            raise SchemaError(f"{self.path}: missing column {name!r}") from None

    def has(self, name: str) -> bool:
        return name in self.columns

    def group(self, prefix: str) -> np.ndarray:
        """Columns prefix_0..prefix_{k-1} stacked as (rows, k)."""
        k = 0
        while f"{prefix}_{k}" in self.columns:
            k += 1
        if k == 0:
            raise SchemaError(f"{self.path}: no {prefix}_* columns")
        return np.column_stack([self[f"{prefix}_{i}"] for i in range(k)])


def read_table(path) -> Table:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows) < 2:
        raise SchemaError(f"{path}: empty or header-only CSV")
    header = rows[0]
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:]])
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric cell ({exc})") from exc
    if data.shape[1] != len(header):
        raise SchemaError(f"{path}: ragged rows")
    return Table(path=str(path), columns=header, data=data)


def read_trajectory(path) -> Table:
    table = read_table(path)
    if table.columns[0] not in ("step", "t"):
        raise SchemaError(f"{path}: first column must be 'step' or 't', "
                          f"got {table.columns[0]!r}")
    for required in ("u_st", "kl", "x_marg_0", "y_marg_0"):
        if not table.has(required):
            raise SchemaError(f"{path}: missing column {required!r}")
    return table


def read_stats(path) -> Table:
    table = read_table(path)
    if table.columns != ["time", "kl_mean", "kl_std", "n_samples"]:
        raise SchemaError(f"{path}: not a stats CSV (columns {table.columns})")
    return table


def time_axis(table: Table) -> tuple[np.ndarray, str]:
    name = table.columns[0]
    return table[name], name
