"""Typed loaders for the campaign CSV tables.

Each loader checks the header verbatim and fails with a message naming the
file, the offending row, and what was expected, so a schema drift upstream
surfaces immediately instead of as a silently wrong plot.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SPECTRUM_HEADER = ["state_index", "energy", "coherence_length", "outlier"]
SCALING_HEADER = ["L", "N", "eps", "l_max", "l_av"]
CORRELATIONS_HEADER = ["state_index", "j", "abs_correlation"]

AVERAGE_ROW = -1


class SchemaError(ValueError):
    """The input file does not match the documented table layout."""


def _read_rows(path: str | Path, expected: list[str], label: str) -> list[list[str]]:
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"{label} table {path} does not exist")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected:
            raise SchemaError(f"{label} table {path} starts with {header}, "
                              f"expected {expected}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{label} table {path} has a header but no rows")
    return rows


def _column(rows: list[list[str]], col: int, cast, label: str) -> np.ndarray:
    values = []
    for k, row in enumerate(rows, start=2):   # line 1 is the header
        try:
            values.append(cast(row[col]))
        except (ValueError, IndexError) as exc:
            raise SchemaError(f"{label} row {k}: {exc}") from exc
    return np.array(values)


@dataclass
class SpectrumTable:
    """Per-eigenstate coherence profile of one parameter point."""

    state_index: np.ndarray
    energy: np.ndarray
    length: np.ndarray
    outlier: np.ndarray

    @property
    def n_states(self) -> int:
        return len(self.state_index)

    def locate(self, state: int) -> int:
        hits = np.flatnonzero(self.state_index == state)
        if len(hits) != 1:
            raise SchemaError(f"state {state} appears {len(hits)} times in the table")
        return int(hits[0])


def load_spectrum(path: str | Path) -> SpectrumTable:
    rows = _read_rows(path, SPECTRUM_HEADER, "spectrum")
    return SpectrumTable(
        state_index=_column(rows, 0, int, "spectrum"),
        energy=_column(rows, 1, float, "spectrum"),
        length=_column(rows, 2, float, "spectrum"),
        outlier=_column(rows, 3, int, "spectrum").astype(bool),
    )


@dataclass
class ScalingTable:
    """Size dependence of the peak and average coherence lengths."""

    L: np.ndarray
    N: np.ndarray
    eps: np.ndarray
    l_max: np.ndarray
    l_av: np.ndarray

    @property
    def eps_branches(self) -> list[float]:
        return sorted(set(self.eps.tolist()))

    def branch(self, eps: float) -> "ScalingTable":
        sel = self.eps == eps
        order = np.argsort(self.L[sel], kind="stable")
        return ScalingTable(self.L[sel][order], self.N[sel][order],
                            self.eps[sel][order], self.l_max[sel][order],
                            self.l_av[sel][order])


def load_scaling(paths: str | Path | list) -> ScalingTable:
    """One table from one or several CSVs (e.g. separately swept branches)."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    parts = []
    for path in paths:
        rows = _read_rows(path, SCALING_HEADER, "scaling")
        parts.append(ScalingTable(
            L=_column(rows, 0, int, "scaling"),
            N=_column(rows, 1, int, "scaling"),
            eps=_column(rows, 2, float, "scaling"),
            l_max=_column(rows, 3, float, "scaling"),
            l_av=_column(rows, 4, float, "scaling"),
        ))
    return ScalingTable(*(np.concatenate([getattr(p, f) for p in parts])
                          for f in ("L", "N", "eps", "l_max", "l_av")))


@dataclass
class CorrelationsTable:
    """|rho[ref, j]| rows for a handful of states plus the spectrum average.

    ``states`` keeps file order; the average row carries index -1.
    """

    states: list[int]
    sites: np.ndarray
    values: dict[int, np.ndarray]

    def row(self, state: int) -> np.ndarray:
        if state not in self.values:
            raise SchemaError(f"state {state} not present (have {self.states})")
        return self.values[state]


def load_correlations(path: str | Path) -> CorrelationsTable:
    rows = _read_rows(path, CORRELATIONS_HEADER, "correlations")
    states: list[int] = []
    grids: dict[int, list[int]] = {}
    values: dict[int, list[float]] = {}
    for k, row in enumerate(rows, start=2):
        try:
            state, j, value = int(row[0]), int(row[1]), float(row[2])
        except (ValueError, IndexError) as exc:
            raise SchemaError(f"correlations row {k}: {exc}") from exc
        if state not in values:
            states.append(state)
            grids[state], values[state] = [], []
        grids[state].append(j)
        values[state].append(value)

    sites = grids[states[0]]
    if sites != sorted(sites):
        raise SchemaError(f"site grid for state {states[0]} is not ascending")
    for state in states[1:]:
        if grids[state] != sites:
            raise SchemaError(f"state {state} covers sites {grids[state]}, "
                              f"state {states[0]} covers {sites}")
    return CorrelationsTable(states=states, sites=np.array(sites),
                             values={s: np.array(v) for s, v in values.items()})
