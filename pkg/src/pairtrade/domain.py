"""Core value types shared by every other module.

Prices are strictly positive reals. A price path is a date-labelled pair of
price arrays. Per-period relative returns X_i(k) = p_i(k+1)/p_i(k) - 1 are
always > -1 for positive prices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """A value violates a basic domain requirement, e.g. a non-positive price."""


class LengthError(ValueError):
    """A series is too short for the requested computation."""


def _require_finite_positive(name: str, x: float) -> None:
    if not (isinstance(x, (int, float)) and math.isfinite(x) and x > 0.0):
        raise DomainError(f"{name} must be a finite positive number, got {x!r}")


@dataclass(frozen=True)
class PricePoint:
    """One joint observation of the two prices."""

    p1: float
    p2: float

    def __post_init__(self) -> None:
        _require_finite_positive("p1", self.p1)
        _require_finite_positive("p2", self.p2)

    def as_array(self) -> np.ndarray:
        return np.array([self.p1, self.p2], dtype=float)


@dataclass(frozen=True)
class ReturnPair:
    """Per-period relative returns of the two prices. Each component is > -1."""

    x1: float
    x2: float

    def __post_init__(self) -> None:
        for name, x in (("x1", self.x1), ("x2", self.x2)):
            if not (math.isfinite(x) and x > -1.0):
                raise DomainError(f"{name} must be a finite number > -1, got {x!r}")


class PriceSeries:
    """Immutable date-labelled pair of strictly positive price paths.

    Dates are opaque labels that must be strictly increasing under string
    comparison; they are never parsed. ISO-8601 dates satisfy this.
    """

    __slots__ = ("dates", "p1", "p2")

    def __init__(self, dates, p1, p2) -> None:
        dates = tuple(str(d) for d in dates)
        p1 = np.asarray(p1, dtype=float).copy()
        p2 = np.asarray(p2, dtype=float).copy()
        if p1.ndim != 1 or p2.ndim != 1:
            raise DomainError("price arrays must be one-dimensional")
        if not (len(dates) == p1.size == p2.size):
            raise LengthError(
                f"length mismatch: {len(dates)} dates, {p1.size} p1, {p2.size} p2"
            )
        if len(dates) == 0:
            raise LengthError("a price series needs at least one observation")
        for arr, name in ((p1, "p1"), (p2, "p2")):
            if not np.all(np.isfinite(arr) & (arr > 0.0)):
                bad = int(np.argmin(np.isfinite(arr) & (arr > 0.0)))
                raise DomainError(f"{name}[{bad}] = {arr[bad]!r} is not a finite positive price")
        for i in range(1, len(dates)):
            if not dates[i - 1] < dates[i]:
                raise DomainError(
                    f"dates must be strictly increasing, got {dates[i - 1]!r} before {dates[i]!r}"
                )
        p1.flags.writeable = False
        p2.flags.writeable = False
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)

    def __setattr__(self, name, value):
        raise AttributeError("PriceSeries is immutable")

    def __len__(self) -> int:
        return len(self.dates)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PriceSeries):
            return NotImplemented
        return (
            self.dates == other.dates
            and np.array_equal(self.p1, other.p1)
            and np.array_equal(self.p2, other.p2)
        )

    def point(self, k: int) -> PricePoint:
        """Prices at index k as a PricePoint."""
        return PricePoint(float(self.p1[k]), float(self.p2[k]))

    def window(self, start: int, stop: int) -> "PriceSeries":
        """Sub-series over [start, stop)."""
        if not (0 <= start < stop <= len(self)):
            raise LengthError(f"window [{start}, {stop}) out of range for length {len(self)}")
        return PriceSeries(self.dates[start:stop], self.p1[start:stop], self.p2[start:stop])

    def __repr__(self) -> str:
        return f"PriceSeries(n={len(self)}, first={self.dates[0]!r}, last={self.dates[-1]!r})"


def return_arrays(series: PriceSeries) -> np.ndarray:
    """Relative returns as an (n-1, 2) array; column i is X_{i+1}."""
    if len(series) < 2:
        raise LengthError("returns need at least two observations")
    out = np.empty((len(series) - 1, 2), dtype=float)
    out[:, 0] = series.p1[1:] / series.p1[:-1] - 1.0
    out[:, 1] = series.p2[1:] / series.p2[:-1] - 1.0
    return out


def compute_returns(series: PriceSeries) -> tuple[ReturnPair, ...]:
    """Relative returns of both prices for every consecutive index pair."""
    arr = return_arrays(series)
    return tuple(ReturnPair(float(a), float(b)) for a, b in arr)


@dataclass(frozen=True)
class BoxBounds:
    """The closed box of price points within relative distance gamma of a center.

    Contains p' iff |p_i' - p_i| <= gamma * p_i for both coordinates. gamma
    must lie in (0, 1) so every point in the box has positive prices.
    """

    center: PricePoint
    gamma: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.gamma) and 0.0 < self.gamma < 1.0):
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma!r}")

    def lower(self) -> PricePoint:
        return PricePoint(self.center.p1 * (1.0 - self.gamma), self.center.p2 * (1.0 - self.gamma))

    def upper(self) -> PricePoint:
        return PricePoint(self.center.p1 * (1.0 + self.gamma), self.center.p2 * (1.0 + self.gamma))

    def contains(self, p: PricePoint) -> bool:
        return (
            abs(p.p1 - self.center.p1) <= self.gamma * self.center.p1
            and abs(p.p2 - self.center.p2) <= self.gamma * self.center.p2
        )


@dataclass(frozen=True)
class AccountState:
    """Account value plus current share holdings (n1, n2) and leverage cap."""

    value: float
    holdings: tuple[float, float] = (0.0, 0.0)
    leverage: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value)):
            raise DomainError(f"account value must be finite, got {self.value!r}")
        if not (math.isfinite(self.leverage) and self.leverage > 0.0):
            raise DomainError(f"leverage must be finite and positive, got {self.leverage!r}")
        n1, n2 = self.holdings
        if not (math.isfinite(n1) and math.isfinite(n2)):
            raise DomainError(f"holdings must be finite, got {self.holdings!r}")

    def gross_exposure(self, p: PricePoint) -> float:
        """|n1| p1 + |n2| p2, the capital tied up at prices p."""
        return abs(self.holdings[0]) * p.p1 + abs(self.holdings[1]) * p.p2

    def is_fully_invested(self, p: PricePoint, rel_tol: float = 1e-9) -> bool:
        """True when gross exposure equals leverage * value within rel_tol."""
        target = self.leverage * self.value
        return abs(self.gross_exposure(p) - target) <= rel_tol * max(1.0, abs(target))
