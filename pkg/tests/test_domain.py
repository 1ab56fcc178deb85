"""Core type invariants: positive prices, return bounds, box membership."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pairtrade.domain import (
    AccountState,
    BoxBounds,
    DomainError,
    LengthError,
    PricePoint,
    PriceSeries,
    ReturnPair,
    compute_returns,
    return_arrays,
)

log_prices = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


def make_series(p1, p2):
    n = len(p1)
    return PriceSeries([f"{i:06d}" for i in range(n)], p1, p2)


class TestPricePoint:
    def test_valid(self):
        p = PricePoint(100.0, 50.0)
        assert p.p1 == 100.0 and p.p2 == 50.0

    @pytest.mark.parametrize("p1,p2", [(0.0, 50.0), (-1.0, 50.0), (100.0, 0.0), (100.0, -0.5)])
    def test_non_positive_rejected(self, p1, p2):
        with pytest.raises(DomainError):
            PricePoint(p1, p2)

    @pytest.mark.parametrize("bad", [math.nan, math.inf])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(DomainError):
            PricePoint(bad, 50.0)

    def test_as_array(self):
        assert np.array_equal(PricePoint(3.0, 7.0).as_array(), np.array([3.0, 7.0]))


class TestReturnPair:
    def test_bound(self):
        ReturnPair(-0.999, 5.0)
        with pytest.raises(DomainError):
            ReturnPair(-1.0, 0.0)
        with pytest.raises(DomainError):
            ReturnPair(0.0, math.nan)


class TestPriceSeries:
    def test_happy(self):
        s = make_series([100.0, 105.0], [50.0, 50.0])
        assert len(s) == 2
        assert s.point(1) == PricePoint(105.0, 50.0)

    def test_length_mismatch(self):
        with pytest.raises(LengthError):
            PriceSeries(["a", "b"], [1.0], [1.0, 2.0])

    def test_empty(self):
        with pytest.raises(LengthError):
            PriceSeries([], [], [])

    def test_non_positive_price(self):
        with pytest.raises(DomainError):
            make_series([100.0, 0.0], [50.0, 50.0])

    def test_unordered_dates(self):
        with pytest.raises(DomainError):
            PriceSeries(["2020-01-02", "2020-01-01"], [1.0, 1.0], [1.0, 1.0])

    def test_duplicate_dates(self):
        with pytest.raises(DomainError):
            PriceSeries(["2020-01-01", "2020-01-01"], [1.0, 1.0], [1.0, 1.0])

    def test_immutable(self):
        s = make_series([100.0, 105.0], [50.0, 50.0])
        with pytest.raises((AttributeError, ValueError)):
            s.p1[0] = 1.0
        with pytest.raises(AttributeError):
            s.p1 = np.array([1.0, 2.0])

    def test_window(self):
        s = make_series([1.0, 2.0, 3.0, 4.0], [4.0, 3.0, 2.0, 1.0])
        w = s.window(1, 3)
        assert len(w) == 2
        assert list(w.p1) == [2.0, 3.0]
        with pytest.raises(LengthError):
            s.window(2, 7)


class TestReturns:
    def test_hand_example(self):
        # p1: 100 -> 105 -> 99.75 gives +5% then -5%; p2 flat gives zeros
        s = make_series([100.0, 105.0, 99.75], [50.0, 50.0, 50.0])
        rets = compute_returns(s)
        assert rets[0].x1 == pytest.approx(0.05, abs=1e-12)
        assert rets[1].x1 == pytest.approx(-0.05, abs=1e-12)
        assert rets[0].x2 == 0.0 and rets[1].x2 == 0.0

    def test_too_short(self):
        s = make_series([100.0], [50.0])
        with pytest.raises(LengthError):
            compute_returns(s)
        with pytest.raises(LengthError):
            return_arrays(s)

    def test_arrays_match_pairs(self):
        s = make_series([100.0, 105.0, 99.75, 120.0], [50.0, 48.0, 51.0, 51.0])
        arr = return_arrays(s)
        pairs = compute_returns(s)
        for i, rp in enumerate(pairs):
            assert arr[i, 0] == rp.x1
            assert arr[i, 1] == rp.x2

    @given(st.lists(st.tuples(log_prices, log_prices), min_size=2, max_size=50))
    @settings(max_examples=200)
    def test_reconstruction(self, logs):
        # prices are recoverable from the first price and the returns
        p1 = [math.exp(a) for a, _ in logs]
        p2 = [math.exp(b) for _, b in logs]
        s = make_series(p1, p2)
        rets = compute_returns(s)
        r1 = p1[0]
        r2 = p2[0]
        for i, rp in enumerate(rets):
            assert rp.x1 > -1.0 and rp.x2 > -1.0
            r1 *= 1.0 + rp.x1
            r2 *= 1.0 + rp.x2
            assert r1 == pytest.approx(p1[i + 1], rel=1e-12)
            assert r2 == pytest.approx(p2[i + 1], rel=1e-12)


class TestBoxBounds:
    def test_contains_center_and_faces(self):
        box = BoxBounds(PricePoint(100.0, 50.0), 0.05)
        assert box.contains(PricePoint(100.0, 50.0))
        assert box.contains(PricePoint(105.0, 47.5))
        assert not box.contains(PricePoint(105.1, 50.0))
        assert box.lower() == PricePoint(95.0, 47.5)
        assert box.upper() == PricePoint(105.0, 52.5)

    @pytest.mark.parametrize("gamma", [0.0, 1.0, -0.1, 1.5, math.nan])
    def test_gamma_domain(self, gamma):
        with pytest.raises(DomainError):
            BoxBounds(PricePoint(100.0, 50.0), gamma)

    @given(
        log_prices,
        log_prices,
        st.floats(min_value=0.01, max_value=0.99),
        st.floats(min_value=-1.0, max_value=1.0),
        st.floats(min_value=-1.0, max_value=1.0),
    )
    @settings(max_examples=200)
    def test_relative_displacements_inside(self, lp1, lp2, gamma, t1, t2):
        center = PricePoint(math.exp(lp1), math.exp(lp2))
        box = BoxBounds(center, gamma)
        shifted = PricePoint(center.p1 * (1.0 + gamma * t1 * 0.999), center.p2 * (1.0 + gamma * t2 * 0.999))
        assert box.contains(shifted)


class TestAccountState:
    def test_full_investment_check(self):
        state = AccountState(value=10_000.0, holdings=(-200.0 / 3.0, 200.0 / 3.0), leverage=1.0)
        p = PricePoint(100.0, 50.0)
        assert state.gross_exposure(p) == pytest.approx(10_000.0, rel=1e-12)
        assert state.is_fully_invested(p)
        assert not AccountState(10_000.0, (0.0, 0.0)).is_fully_invested(p)

    def test_validation(self):
        with pytest.raises(DomainError):
            AccountState(math.nan)
        with pytest.raises(DomainError):
            AccountState(1.0, leverage=0.0)
        with pytest.raises(DomainError):
            AccountState(1.0, holdings=(math.inf, 0.0))
