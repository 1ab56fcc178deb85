"""Kernel backend selection and bit-identical equivalence.

Both kernel implementations must agree bit-for-bit: the compiled extension
is built without FP contraction and mirrors the fallback operation for
operation, so any difference at all is a bug, not noise.
"""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from pairtrade import _kernels_py, kernels

try:
    from pairtrade import _kernels as _compiled
except ImportError:
    _compiled = None

needs_compiled = pytest.mark.skipif(_compiled is None, reason="compiled kernels not built")


def _inputs(n=5_000, seed=123):
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, n)
    v = rng.uniform(-1.0, 1.0, n)
    return u, v


class TestBackendSelection:
    def test_backend_named(self):
        assert kernels.BACKEND in ("cython", "python")

    def test_env_override_forces_python(self):
        code = (
            "import pairtrade.kernels as k; print(k.BACKEND)"
        )
        env = dict(os.environ, PAIRTRADE_PURE_PYTHON="1")
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
        )
        assert out.stdout.strip() == "python"


class TestOuRecursion:
    def test_semantics(self):
        # hand-check the first two steps of the recursion
        u = np.array([1.0, -0.5])
        v = np.array([0.25, 0.25])
        s, w = kernels.ou_recursion(u, v, 0.3, 0.01, 0.005, 0.1, 2.0)
        assert s[0] == 0.1 and w[0] == 2.0
        assert s[1] == pytest.approx(0.7 * 0.1 + 0.01, rel=1e-15)
        assert w[1] == pytest.approx(2.0 + 0.005 * 0.25, rel=1e-15)
        assert s[2] == pytest.approx(0.7 * s[1] - 0.005, rel=1e-15)
        assert len(s) == 3 and len(w) == 3

    @needs_compiled
    def test_backends_bit_identical(self):
        u, v = _inputs()
        a_s, a_w = _compiled.ou_recursion(u, v, 0.3, 0.012, 0.005, 0.02, math.log(100.0))
        b_s, b_w = _kernels_py.ou_recursion(u, v, 0.3, 0.012, 0.005, 0.02, math.log(100.0))
        assert np.array_equal(a_s, b_s)
        assert np.array_equal(a_w, b_w)


class TestTradeScan:
    @staticmethod
    def _path(n=2_000, seed=9):
        u, v = _inputs(n, seed)
        s, w = _kernels_py.ou_recursion(u, v, 0.3, 0.012, 0.005, 0.0, math.log(100.0))
        p1 = np.exp(w)
        p2 = np.exp(2.0 * w + s)
        return p1, p2, s

    def test_matches_reference_loop(self):
        # independent reimplementation with the allocation primitives
        from pairtrade.domain import PricePoint
        from pairtrade.spread import CointegrationSpread
        from pairtrade.trading import allocate, step_account

        p1, p2, s = self._path(300)
        tau, lev, v0 = 0.00625, 1.0, 10_000.0
        dv_out = np.empty(len(p1))
        sabs_out = np.empty(len(p1))
        n_ev, v_fin = kernels.trade_scan(p1, p2, s, 2.0, tau, lev, v0, dv_out, sabs_out)

        model = CointegrationSpread(2.0, 0.0)
        value = v0
        expect_dv = []
        for k in range(len(p1) - 1):
            point = PricePoint(float(p1[k]), float(p2[k]))
            dec = allocate(model, point, float(s[k]), tau, value, lev)
            if dec.active:
                dv = step_account(
                    dec.holdings, (float(p1[k + 1]) - point.p1, float(p2[k + 1]) - point.p2)
                )
                expect_dv.append(dv)
                value += dv
        assert n_ev == len(expect_dv)
        assert v_fin == pytest.approx(value, rel=1e-12)
        np.testing.assert_allclose(dv_out[:n_ev], expect_dv, rtol=1e-12)

    def test_infinite_tau_never_trades(self):
        p1, p2, s = self._path(500)
        dv_out = np.empty(len(p1))
        sabs_out = np.empty(len(p1))
        n_ev, v_fin = kernels.trade_scan(p1, p2, s, 2.0, math.inf, 1.0, 10_000.0, dv_out, sabs_out)
        assert n_ev == 0
        assert v_fin == 10_000.0

    def test_last_period_not_traded(self):
        # two periods: only period 0 can realize a profit
        p1 = np.array([100.0, 101.0])
        p2 = np.array([50.0, 49.0])
        s = np.array([1.0, 1.0])
        dv_out = np.empty(2)
        sabs_out = np.empty(2)
        n_ev, _ = kernels.trade_scan(p1, p2, s, 2.0, 0.1, 1.0, 10_000.0, dv_out, sabs_out)
        assert n_ev == 1

    @needs_compiled
    def test_backends_bit_identical(self):
        p1, p2, s = self._path()
        for tau in (0.00625, 0.02, math.inf):
            out = []
            for impl in (_compiled, _kernels_py):
                dv_out = np.zeros(len(p1))
                sabs_out = np.zeros(len(p1))
                n_ev, v_fin = impl.trade_scan(p1, p2, s, 2.0, tau, 1.0, 10_000.0, dv_out, sabs_out)
                out.append((n_ev, v_fin, dv_out.copy(), sabs_out.copy()))
            assert out[0][0] == out[1][0]
            assert out[0][1] == out[1][1]
            assert np.array_equal(out[0][2], out[1][2])
            assert np.array_equal(out[0][3], out[1][3])
