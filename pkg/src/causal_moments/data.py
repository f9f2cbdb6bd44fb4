"""Observational data model, empirical conditional CDFs and domain bounds."""
from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import NoDataError, ParseError, SchemaError, ValidationError


@dataclass(frozen=True)
class DomainBounds:
    """Closed interval [a, b] used as the integration range on every axis."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValidationError(f"domain bounds must be finite, got [{self.a}, {self.b}]")
        if self.a > self.b:
            raise ValidationError(f"invalid domain bounds: a={self.a} > b={self.b}")

    @property
    def width(self) -> float:
        return self.b - self.a

    def as_list(self):
        return [self.a, self.b]


@dataclass(frozen=True, eq=False)
class ObservationTable:
    """Rows of (arm label x, outcome y, optional covariate level w).

    Arrays are copied and made read-only on construction, so a table can be
    shared freely between threads and bootstrap replicates.
    """

    x: np.ndarray
    y: np.ndarray
    w: Optional[np.ndarray] = None

    def __post_init__(self):
        x = np.array(self.x, dtype=np.int64).reshape(-1)
        y = np.array(self.y, dtype=np.float64).reshape(-1)
        if x.shape != y.shape:
            raise ValidationError(f"x has {x.size} rows but y has {y.size}")
        if x.size == 0:
            raise NoDataError("observation table has no rows")
        bad = ~np.isfinite(y)
        if bad.any():
            row = int(np.flatnonzero(bad)[0]) + 1
            raise ValidationError(f"non-finite outcome at row {row}")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if self.w is not None:
            w = np.array(self.w, dtype=np.int64).reshape(-1)
            if w.shape != x.shape:
                raise ValidationError(f"w has {w.size} rows but x has {x.size}")
            w.setflags(write=False)
            object.__setattr__(self, "w", w)

    def __len__(self):
        return int(self.x.size)

    @property
    def has_covariate(self) -> bool:
        return self.w is not None

    @cached_property
    def arms(self) -> frozenset:
        return frozenset(int(v) for v in np.unique(self.x))

    @cached_property
    def _arm_values(self) -> dict:
        return {arm: self.y[self.x == arm] for arm in self.arms}

    def outcomes(self, arm: int) -> np.ndarray:
        """Outcomes observed under ``arm`` in row order."""
        try:
            return self._arm_values[int(arm)]
        except KeyError:
            raise NoDataError(f"arm {arm} has no rows") from None

    def take(self, rows: np.ndarray) -> "ObservationTable":
        """Sub-table (or resample) selected by integer row indices."""
        rows = np.asarray(rows, dtype=np.int64)
        w = None if self.w is None else self.w[rows]
        return ObservationTable(self.x[rows], self.y[rows], w)

    def to_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        if self.w is None:
            writer.writerow(["x", "y"])
            for xi, yi in zip(self.x.tolist(), self.y.tolist()):
                writer.writerow([xi, repr(yi)])
        else:
            writer.writerow(["x", "y", "w"])
            for xi, yi, wi in zip(self.x.tolist(), self.y.tolist(), self.w.tolist()):
                writer.writerow([xi, repr(yi), wi])


def _parse_int(text, row, column):
    try:
        return int(text.strip())
    except ValueError:
        pass
    # accept "1.0"-style integers written by spreadsheet tools
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"column {column!r}: {text!r} is not an integer", row) from None
    if not value.is_integer():
        raise ParseError(f"column {column!r}: {text!r} is not an integer", row)
    return int(value)


def read_csv(stream, x_col: str = "x", y_col: str = "y", w_col: Optional[str] = "w") -> ObservationTable:
    """Parse an observation table from an open text stream."""
    reader = csv.reader(stream)
    header = None
    for raw in reader:
        if raw and any(cell.strip() for cell in raw):
            header = [cell.strip() for cell in raw]
            break
    if header is None:
        raise SchemaError("CSV input is empty")
    for required in (x_col, y_col):
        if required not in header:
            raise SchemaError(f"missing required column {required!r}; header is {header}")
    ix, iy = header.index(x_col), header.index(y_col)
    iw = header.index(w_col) if w_col and w_col in header else None

    xs, ys, ws = [], [], []
    row = 0
    for raw in reader:
        if not raw or not any(cell.strip() for cell in raw):
            continue
        row += 1
        if len(raw) < len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(raw)}", row)
        xs.append(_parse_int(raw[ix], row, x_col))
        try:
            yv = float(raw[iy])
        except ValueError:
            raise ParseError(f"column {y_col!r}: {raw[iy]!r} is not a number", row) from None
        if not math.isfinite(yv):
            raise ValidationError(f"row {row}: non-finite outcome {raw[iy]!r}")
        ys.append(yv)
        if iw is not None:
            ws.append(_parse_int(raw[iw], row, w_col))
    if not xs:
        raise NoDataError("CSV input has a header but no data rows")
    return ObservationTable(np.array(xs), np.array(ys), np.array(ws) if iw is not None else None)


def ingest_csv(path: Union[str, Path], x_col: str = "x", y_col: str = "y",
               w_col: Optional[str] = "w") -> ObservationTable:
    """Load an observation table from a CSV file (``-`` reads stdin)."""
    if str(path) == "-":
        return read_csv(sys.stdin, x_col, y_col, w_col)
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    with path.open(newline="", encoding="utf-8") as fh:
        return read_csv(fh, x_col, y_col, w_col)


def parse_csv_text(text: str, **schema) -> ObservationTable:
    return read_csv(io.StringIO(text), **schema)


@dataclass(frozen=True, eq=False)
class EmpiricalConditionalCdf:
    """Step function y -> P^(Y < y | X = arm), optionally of the centered outcome.

    The centered variant evaluates P^(Y - E^[Y|X=arm] < y) as the raw CDF at
    ``y + center``, so the shift identity holds exactly in floating point.
    """

    arm: int
    sorted_values: np.ndarray
    n_arm: int
    centered: bool = False
    center: float = 0.0

    def __call__(self, y):
        y = np.asarray(y, dtype=np.float64)
        if self.centered:
            y = y + self.center
        return np.searchsorted(self.sorted_values, y, side="left") / self.n_arm


def conditional_mean(table: ObservationTable, arm: int) -> float:
    """Arithmetic mean of the outcomes in ``arm`` (left-to-right summation)."""
    values = table.outcomes(arm)
    if values.size == 0:
        raise NoDataError(f"arm {arm} has no rows")
    return sum(values.tolist()) / values.size


def empirical_cdf(table: ObservationTable, arm: int, centered: bool = False) -> EmpiricalConditionalCdf:
    values = table.outcomes(arm)
    ordered = np.sort(values)
    ordered.setflags(write=False)
    center = conditional_mean(table, arm) if centered else 0.0
    return EmpiricalConditionalCdf(int(arm), ordered, int(values.size), bool(centered), float(center))


def domain_bounds(table: ObservationTable, centered: bool = False) -> DomainBounds:
    """[min, max] of outcomes pooled over every arm (per-arm centered if asked)."""
    if len(table) == 0:
        raise NoDataError("observation table has no rows")
    if not centered:
        return DomainBounds(float(table.y.min()), float(table.y.max()))
    lo, hi = math.inf, -math.inf
    for arm in sorted(table.arms):
        shifted = table.outcomes(arm) - conditional_mean(table, arm)
        lo = min(lo, float(shifted.min()))
        hi = max(hi, float(shifted.max()))
    return DomainBounds(lo, hi)
