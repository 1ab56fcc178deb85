"""Spread models: twice-differentiable scalar functions of the two prices.

A spread model supplies value, gradient, and Hessian at any positive price
point, with the three kept mutually consistent. The log-linear model
S(p) = log p2 - beta log p1 - mu is the concrete family used throughout;
its parameters are fit by least squares on log prices.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .domain import DomainError, LengthError, PricePoint, PriceSeries


class StationaryPointError(RuntimeError):
    """The spread gradient vanished; the allocation direction is undefined there."""


class DegenerateRegressorError(ValueError):
    """log p1 is constant over the window, so the slope is unidentifiable."""


class SpreadModel(ABC):
    """Interface for a spread function of two positive prices.

    Implementations must be twice continuously differentiable on the positive
    quadrant and must not have stationary points. Stationarity is checked
    pointwise wherever a gradient is consumed; a quadrant-wide guarantee is
    the implementer's responsibility.
    """

    @abstractmethod
    def value(self, p: PricePoint) -> float:
        """S(p)."""

    @abstractmethod
    def gradient(self, p: PricePoint) -> np.ndarray:
        """Gradient of S at p, shape (2,)."""

    @abstractmethod
    def hessian(self, p: PricePoint) -> np.ndarray:
        """Hessian of S at p, shape (2, 2), symmetric."""

    def hessian_entries(self, p1, p2):
        """Hessian entries (h11, h12, h22) over broadcastable price arrays.

        Generic elementwise fallback; models with closed forms override this
        so grid scans stay cheap.
        """
        p1b, p2b = np.broadcast_arrays(np.asarray(p1, dtype=float), np.asarray(p2, dtype=float))
        h11 = np.empty(p1b.shape)
        h12 = np.empty(p1b.shape)
        h22 = np.empty(p1b.shape)
        for idx in np.ndindex(p1b.shape):
            h = self.hessian(PricePoint(float(p1b[idx]), float(p2b[idx])))
            h11[idx] = h[0][0]
            h12[idx] = h[0][1]
            h22[idx] = h[1][1]
        return h11, h12, h22


def spread_value(model: SpreadModel, p: PricePoint) -> float:
    return float(model.value(p))


def spread_gradient(model: SpreadModel, p: PricePoint) -> np.ndarray:
    """Gradient as a float array; rejects stationary points."""
    g = np.asarray(model.gradient(p), dtype=float)
    if g.shape != (2,):
        raise DomainError(f"gradient must have shape (2,), got {g.shape}")
    if g[0] == 0.0 and g[1] == 0.0:
        raise StationaryPointError(f"spread gradient vanishes at ({p.p1}, {p.p2})")
    return g


def spread_hessian(model: SpreadModel, p: PricePoint) -> np.ndarray:
    """Hessian as a float array; must be symmetric."""
    h = np.asarray(model.hessian(p), dtype=float)
    if h.shape != (2, 2):
        raise DomainError(f"hessian must have shape (2, 2), got {h.shape}")
    scale = max(1.0, abs(h[0, 1]), abs(h[1, 0]))
    if abs(h[0, 1] - h[1, 0]) > 1e-9 * scale:
        raise DomainError(f"hessian must be symmetric, got off-diagonal {h[0, 1]} vs {h[1, 0]}")
    return h


@dataclass(frozen=True)
class CointegrationSpread(SpreadModel):
    """Log-linear spread S(p) = log p2 - beta log p1 - mu."""

    beta: float
    mu: float

    def __post_init__(self) -> None:
        for name, x in (("beta", self.beta), ("mu", self.mu)):
            if not math.isfinite(x):
                raise DomainError(f"{name} must be finite, got {x!r}")

    def value(self, p: PricePoint) -> float:
        return math.log(p.p2) - self.beta * math.log(p.p1) - self.mu

    def gradient(self, p: PricePoint) -> np.ndarray:
        return np.array([-self.beta / p.p1, 1.0 / p.p2])

    def hessian(self, p: PricePoint) -> np.ndarray:
        return np.array(
            [
                [self.beta / (p.p1 * p.p1), 0.0],
                [0.0, -1.0 / (p.p2 * p.p2)],
            ]
        )

    def hessian_entries(self, p1, p2):
        p1 = np.asarray(p1, dtype=float)
        p2 = np.asarray(p2, dtype=float)
        h11 = self.beta / (p1 * p1)
        h22 = -1.0 / (p2 * p2)
        return h11, 0.0, h22

    def values_along(self, series: PriceSeries) -> np.ndarray:
        """S(p(k)) for every index of the series."""
        return np.log(series.p2) - self.beta * np.log(series.p1) - self.mu


def fit_cointegration(window: PriceSeries) -> CointegrationSpread:
    """Least-squares fit of log p2 = beta log p1 + mu over the window.

    Needs at least 3 observations and non-constant log p1.
    """
    if len(window) < 3:
        raise LengthError(f"cointegration fit needs at least 3 observations, got {len(window)}")
    x = np.log(window.p1)
    y = np.log(window.p2)
    xm = float(np.mean(x))
    ym = float(np.mean(y))
    dx = x - xm
    sxx = float(np.dot(dx, dx))
    if sxx == 0.0:
        raise DegenerateRegressorError("log p1 is constant over the window")
    beta = float(np.dot(dx, y - ym)) / sxx
    mu = ym - beta * xm
    return CointegrationSpread(beta=beta, mu=mu)
