"""Pure-Python twins of the compiled kernels.

Arithmetic here is kept operation-for-operation identical to _kernels.pyx
(which is compiled with FP contraction disabled), so both backends produce
bit-identical doubles. Any change to one file must be mirrored in the other.
"""

from __future__ import annotations

import numpy as np


def ou_recursion(u, v, theta, sigma_s, sigma_w, s0, w0):
    """Drive the spread and log-price recursions with innovation arrays.

        s(k+1) = (1 - theta) s(k) + sigma_s u(k)
        w(k+1) = w(k) + sigma_w v(k)

    Returns (s, w) of length len(u) + 1 including the initial state.
    """
    n = len(u)
    ul = u.tolist()
    vl = v.tolist()
    s = np.empty(n + 1)
    w = np.empty(n + 1)
    one_minus_theta = 1.0 - theta
    sk = s0
    wk = w0
    s[0] = sk
    w[0] = wk
    for k in range(n):
        sk = one_minus_theta * sk + sigma_s * ul[k]
        wk = wk + sigma_w * vl[k]
        s[k + 1] = sk
        w[k + 1] = wk
    return s, w


def trade_scan(p1, p2, s, beta, tau, leverage, v0, dv_out, sabs_out):
    """Run the fully-invested threshold rule down one price path.

    Trades the log-linear spread with slope beta at threshold tau; spread
    values are supplied in s. Each traded period k contributes one profit
    entry dv_out[i] and its |spread| sabs_out[i]. Returns (events, v_final).
    The last period is never traded: its profit would need period n.
    """
    n = len(p1)
    p1l = p1.tolist()
    p2l = p2.tolist()
    sl = s.tolist()
    v = v0
    i = 0
    for k in range(n - 1):
        sk = sl[k]
        if abs(sk) > tau:
            p1k = p1l[k]
            p2k = p2l[k]
            g1 = -beta / p1k
            g2 = 1.0 / p2k
            lam = leverage * v / (abs(g1) * p1k + abs(g2) * p2k)
            sgn = 1.0 if sk > 0.0 else -1.0
            n1 = -lam * sgn * g1
            n2 = -lam * sgn * g2
            dv = n1 * (p1l[k + 1] - p1k) + n2 * (p2l[k + 1] - p2k)
            v = v + dv
            dv_out[i] = dv
            sabs_out[i] = abs(sk)
            i += 1
    return i, v
