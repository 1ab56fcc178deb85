"""CSV ingestion and declared price-correction adjustments.

Input files have the exact header `date,p1,p2`, one observation per row,
strictly increasing date labels, and strictly positive finite prices.
Corrections (splits, reverse splits, bad prints) are declared as explicit
rules and applied by scaling all prices of one stock before a given index.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .domain import DomainError, PriceSeries

EXPECTED_HEADER = ("date", "p1", "p2")


class FormatError(ValueError):
    """The file is structurally wrong: bad header, wrong arity, no data."""


class RowError(ValueError):
    """A data row failed to parse; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class OrderingError(ValueError):
    """Date labels are not strictly increasing."""


@dataclass(frozen=True)
class AdjustmentRule:
    """Scale all prices of one stock strictly before effective_index by factor.

    Returns at and after the boundary are computed from adjusted prices, so a
    rule that corrects a split removes the artificial jump return.
    """

    stock: int
    effective_index: int
    factor: float

    def __post_init__(self) -> None:
        if self.stock not in (1, 2):
            raise DomainError(f"stock must be 1 or 2, got {self.stock!r}")
        if not (isinstance(self.effective_index, int) and self.effective_index >= 0):
            raise DomainError(
                f"effective_index must be a non-negative integer, got {self.effective_index!r}"
            )
        if not (math.isfinite(self.factor) and self.factor > 0.0):
            raise DomainError(f"factor must be finite and positive, got {self.factor!r}")


def load_csv(path) -> PriceSeries:
    """Parse a price CSV; raises FormatError / RowError / OrderingError."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FormatError("empty file")
        if tuple(h.strip() for h in header) != EXPECTED_HEADER:
            raise FormatError(
                f"expected header {','.join(EXPECTED_HEADER)!r}, got {','.join(header)!r}"
            )
        dates: list[str] = []
        p1: list[float] = []
        p2: list[float] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise RowError(line_no, f"expected 3 fields, got {len(row)}")
            date = row[0].strip()
            if not date:
                raise RowError(line_no, "empty date")
            vals = []
            for name, text in (("p1", row[1]), ("p2", row[2])):
                try:
                    x = float(text)
                except ValueError:
                    raise RowError(line_no, f"{name} is not a number: {text!r}") from None
                if not (math.isfinite(x) and x > 0.0):
                    raise RowError(line_no, f"{name} must be finite and positive, got {text!r}")
                vals.append(x)
            if dates and not (dates[-1] < date):
                raise OrderingError(
                    f"line {line_no}: date {date!r} does not increase over {dates[-1]!r}"
                )
            dates.append(date)
            p1.append(vals[0])
            p2.append(vals[1])
    if not dates:
        raise FormatError("no data rows")
    return PriceSeries(tuple(dates), p1, p2)


def apply_adjustments(series: PriceSeries, rules) -> PriceSeries:
    """Apply correction rules in order; each returns a new adjusted series.

    An effective_index of 0 is a no-op; an index equal to the series length
    scales the whole path. Indices beyond the length raise DomainError.
    """
    p1 = series.p1.copy()
    p2 = series.p2.copy()
    for rule in rules:
        if rule.effective_index > len(series):
            raise DomainError(
                f"effective_index {rule.effective_index} exceeds series length {len(series)}"
            )
        target = p1 if rule.stock == 1 else p2
        target[: rule.effective_index] *= rule.factor
    return PriceSeries(series.dates, p1, p2)
