"""FRED CSV ingestion and construction of the historical state series.

The pipeline is: parse each raw series, align everything onto a common
quarterly grid, derive year-over-year inflation and the output gap, and
assemble (inflation, unemployment, output_gap, fed_funds) rows. Rows with
any missing component are dropped, and the surviving rows remember where
the calendar gaps are so that downstream regression never pairs states
across a hole.

Everything here is a pure function over immutable inputs.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    DomainError,
    FredParseError,
    InsufficientDataError,
    MissingColumnError,
)

# Logical variable name -> conventional FRED series id.
SERIES_IDS = {
    "cpi": "CPIAUCSL",
    "unemployment": "UNRATE",
    "gdp": "GDPC1",
    "gdp_potential": "GDPPOT",
    "fedfunds": "FEDFUNDS",
}

# Series published quarterly; everything else is monthly and gets averaged.
QUARTERLY_SERIES = {"gdp", "gdp_potential"}

REQUIRED_COLUMNS = ("cpi", "unemployment", "gdp", "gdp_potential", "fedfunds")

STATE_COLUMNS = ("inflation", "unemployment", "output_gap", "fed_funds")


class Quarter(NamedTuple):
    """A calendar quarter, ordered naturally."""

    year: int
    q: int

    @property
    def index(self) -> int:
        return self.year * 4 + (self.q - 1)

    @staticmethod
    def from_index(index: int) -> "Quarter":
        return Quarter(index // 4, index % 4 + 1)

    @staticmethod
    def of_date(date: _dt.date) -> "Quarter":
        return Quarter(date.year, (date.month - 1) // 3 + 1)

    def shifted(self, n: int) -> "Quarter":
        return Quarter.from_index(self.index + n)

    def __str__(self) -> str:
        return f"{self.year}Q{self.q}"


# A quarterly column is a dense mapping over a contiguous quarter span;
# None marks a quarter with no usable observation.
QuarterlyColumn = dict[Quarter, Optional[float]]


@dataclass(frozen=True)
class RawSeries:
    """One FRED series as parsed from disk.

    Observations are (date, value) with None for the FRED '.' missing
    marker. Dates are strictly increasing.
    """

    series_id: str
    observations: tuple[tuple[_dt.date, Optional[float]], ...]

    def __post_init__(self):
        dates = [d for d, _ in self.observations]
        for prev, cur in zip(dates, dates[1:]):
            if cur <= prev:
                raise FredParseError(
                    f"observations out of order in {self.series_id}: "
                    f"{cur} follows {prev}"
                )


@dataclass(frozen=True)
class QuarterlyFrame:
    """Aligned quarterly table with no missing values.

    Quarters are strictly increasing but may skip calendar quarters
    where any input column was missing.
    """

    quarters: tuple[Quarter, ...]
    columns: dict[str, np.ndarray]

    def __post_init__(self):
        n = len(self.quarters)
        for name, col in self.columns.items():
            if len(col) != n:
                raise ValueError(f"column {name!r} has length {len(col)}, expected {n}")

    def column_as_dict(self, name: str) -> dict[Quarter, float]:
        col = self.columns[name]
        return {q: float(v) for q, v in zip(self.quarters, col)}


@dataclass(frozen=True)
class StateSeries:
    """Historical (inflation, unemployment, output_gap, fed_funds) rows.

    `values` has one row per usable quarter, columns in STATE_COLUMNS
    order. `segments` lists (start, stop) index ranges of calendar-
    contiguous runs; transitions are only valid inside a segment.
    """

    quarters: tuple[Quarter, ...]
    values: np.ndarray
    segments: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[1] != 4:
            raise ValueError("state values must be an (n, 4) array")
        if len(self.quarters) != vals.shape[0]:
            raise ValueError("quarter labels and value rows disagree in length")
        object.__setattr__(self, "values", vals)
        if not self.segments:
            object.__setattr__(self, "segments", _contiguous_segments(self.quarters))

    def __len__(self) -> int:
        return self.values.shape[0]

    def transition_pairs(self) -> Iterator[tuple[int, int]]:
        """Yield (t, t+1) index pairs that never span a calendar gap."""
        for start, stop in self.segments:
            for t in range(start, stop - 1):
                yield t, t + 1

    @property
    def n_transitions(self) -> int:
        return sum(max(stop - start - 1, 0) for start, stop in self.segments)

    def to_csv(self, path: str | Path) -> None:
        lines = ["year,quarter,inflation,unemployment,output_gap,fed_funds"]
        for quarter, row in zip(self.quarters, self.values):
            cells = ",".join(repr(float(v)) for v in row)
            lines.append(f"{quarter.year},{quarter.q},{cells}")
        Path(path).write_text("\n".join(lines) + "\n")


def _contiguous_segments(quarters: Sequence[Quarter]) -> tuple[tuple[int, int], ...]:
    if not quarters:
        return ()
    segments = []
    start = 0
    for i in range(1, len(quarters)):
        if quarters[i].index != quarters[i - 1].index + 1:
            segments.append((start, i))
            start = i
    segments.append((start, len(quarters)))
    return tuple(segments)


def parse_fred_csv(path: str | Path) -> RawSeries:
    """Parse a FRED-format CSV: header ``DATE,<SERIES_ID>``, ISO dates,
    ``.`` for missing values."""
    path = Path(path)
    text = path.read_text()
    lines = text.splitlines()
    if not lines:
        raise FredParseError(f"{path}: file is empty")

    header = lines[0].strip()
    parts = header.split(",")
    if len(parts) != 2 or parts[0].strip().upper() != "DATE" or not parts[1].strip():
        raise FredParseError(f"{path}: bad header {header!r}, expected 'DATE,<SERIES_ID>'")
    series_id = parts[1].strip()

    observations: list[tuple[_dt.date, Optional[float]]] = []
    last_date: Optional[_dt.date] = None
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != 2:
            raise FredParseError(f"expected 2 fields, got {len(cells)}", lineno)
        date_text, value_text = cells[0].strip(), cells[1].strip()
        try:
            date = _dt.date.fromisoformat(date_text)
        except ValueError:
            raise FredParseError(f"malformed date {date_text!r}", lineno) from None
        if last_date is not None and date <= last_date:
            raise FredParseError(
                f"date {date} not after previous date {last_date}", lineno
            )
        last_date = date
        if value_text == ".":
            value: Optional[float] = None
        else:
            try:
                value = float(value_text)
            except ValueError:
                raise FredParseError(f"non-numeric value {value_text!r}", lineno) from None
            if not np.isfinite(value):
                raise FredParseError(f"non-finite value {value_text!r}", lineno)
        observations.append((date, value))

    if not observations:
        raise FredParseError(f"{path}: no observations after header")
    return RawSeries(series_id=series_id, observations=tuple(observations))


def to_quarterly(series: RawSeries, method: str = "mean_of_months") -> QuarterlyColumn:
    """Aggregate a raw series onto the quarterly grid.

    ``mean_of_months`` averages whatever months are present in each
    quarter; ``quarter_value`` passes an already-quarterly series
    through. Quarters with no usable observation map to None.
    """
    if method not in ("mean_of_months", "quarter_value"):
        raise ValueError(f"unknown aggregation method {method!r}")
    if not series.observations:
        raise InsufficientDataError(f"series {series.series_id} is empty")

    by_quarter: dict[Quarter, list[float]] = {}
    for date, value in series.observations:
        if value is None:
            continue
        by_quarter.setdefault(Quarter.of_date(date), []).append(value)

    first = Quarter.of_date(series.observations[0][0])
    last = Quarter.of_date(series.observations[-1][0])
    column: QuarterlyColumn = {}
    for idx in range(first.index, last.index + 1):
        quarter = Quarter.from_index(idx)
        values = by_quarter.get(quarter)
        if not values:
            column[quarter] = None
        elif method == "mean_of_months":
            column[quarter] = float(np.mean(values))
        else:
            column[quarter] = values[0]
    return column


def yoy_inflation(cpi: QuarterlyColumn) -> QuarterlyColumn:
    """Year-over-year percent change of the CPI column.

    pi_t = (CPI_t / CPI_{t-4} - 1) * 100 against the calendar quarter
    four back, so the lag is never computed across a dropped quarter.
    The first four quarters of the span come out missing.
    """
    if len(cpi) < 5:
        raise InsufficientDataError("need at least 5 quarters of CPI for YoY inflation")
    result: QuarterlyColumn = {}
    for quarter, value in cpi.items():
        lag_value = cpi.get(quarter.shifted(-4))
        if value is None or lag_value is None:
            result[quarter] = None
            continue
        if lag_value <= 0:
            raise DomainError(f"CPI at {quarter.shifted(-4)} is {lag_value}, must be positive")
        result[quarter] = (value / lag_value - 1.0) * 100.0
    return result


def output_gap(gdp: QuarterlyColumn, gdp_potential: QuarterlyColumn) -> QuarterlyColumn:
    """Percent deviation of real GDP from potential, per quarter."""
    result: QuarterlyColumn = {}
    for quarter in gdp:
        if quarter not in gdp_potential:
            continue
        g, p = gdp[quarter], gdp_potential[quarter]
        if g is None or p is None:
            result[quarter] = None
            continue
        if p <= 0:
            raise DomainError(f"potential GDP at {quarter} is {p}, must be positive")
        result[quarter] = (g - p) / p * 100.0
    return result


def build_quarterly_frame(columns: Mapping[str, QuarterlyColumn]) -> QuarterlyFrame:
    """Align columns on their common quarter span, dropping any quarter
    where some column is missing."""
    if not columns:
        raise MissingColumnError("no columns given")
    spans = []
    for name, col in columns.items():
        if not col:
            raise InsufficientDataError(f"column {name!r} is empty")
        indices = [q.index for q in col]
        spans.append((min(indices), max(indices)))
    lo = max(s for s, _ in spans)
    hi = min(e for _, e in spans)
    if lo > hi:
        raise InsufficientDataError("columns have no overlapping quarters")

    quarters: list[Quarter] = []
    kept: dict[str, list[float]] = {name: [] for name in columns}
    for idx in range(lo, hi + 1):
        quarter = Quarter.from_index(idx)
        row = {name: col.get(quarter) for name, col in columns.items()}
        if any(v is None for v in row.values()):
            continue
        quarters.append(quarter)
        for name, v in row.items():
            kept[name].append(float(v))

    return QuarterlyFrame(
        quarters=tuple(quarters),
        columns={name: np.asarray(vals, dtype=float) for name, vals in kept.items()},
    )


def build_state_series(frame: QuarterlyFrame) -> StateSeries:
    """Assemble the historical state rows from an aligned frame.

    Inflation is derived year-over-year, so the first four quarters (and
    the four quarters following any gap) drop out. Raises when fewer
    than 8 usable rows remain.
    """
    for name in REQUIRED_COLUMNS:
        if name not in frame.columns:
            raise MissingColumnError(
                f"frame is missing required column {name!r} "
                f"(FRED series {SERIES_IDS[name]})"
            )

    cpi = frame.column_as_dict("cpi")
    pi = yoy_inflation(cpi)
    gap = frame.columns["gdp"] / frame.columns["gdp_potential"]
    if np.any(frame.columns["gdp_potential"] <= 0):
        raise DomainError("potential GDP must be positive everywhere")
    gap = (gap - 1.0) * 100.0

    quarters: list[Quarter] = []
    rows: list[tuple[float, float, float, float]] = []
    for i, quarter in enumerate(frame.quarters):
        inflation = pi.get(quarter)
        if inflation is None:
            continue
        rows.append(
            (
                inflation,
                float(frame.columns["unemployment"][i]),
                float(gap[i]),
                float(frame.columns["fedfunds"][i]),
            )
        )
        quarters.append(quarter)

    if len(rows) < 8:
        raise InsufficientDataError(
            f"only {len(rows)} usable state rows; need at least 8"
        )
    values = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError("non-finite value in assembled state series")
    return StateSeries(quarters=tuple(quarters), values=values)


def load_state_series(data_dir: str | Path) -> StateSeries:
    """End-to-end ingestion from a directory of ``<SERIES_ID>.csv`` files."""
    data_dir = Path(data_dir)
    columns: dict[str, QuarterlyColumn] = {}
    for name, series_id in SERIES_IDS.items():
        path = data_dir / f"{series_id}.csv"
        if not path.exists():
            raise MissingColumnError(f"missing data file for series {series_id}: {path}")
        series = parse_fred_csv(path)
        method = "quarter_value" if name in QUARTERLY_SERIES else "mean_of_months"
        columns[name] = to_quarterly(series, method)
    return build_state_series(build_quarterly_frame(columns))
