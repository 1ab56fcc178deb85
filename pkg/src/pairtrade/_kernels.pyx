# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the pure-Python kernels in _kernels_py.py.

Arithmetic is operation-for-operation identical to the fallback and the
extension is built with -ffp-contract=off, so results are bit-identical.
Any change to one file must be mirrored in the other.
"""

import numpy as np

from libc.math cimport fabs


def ou_recursion(double[::1] u, double[::1] v, double theta, double sigma_s,
                 double sigma_w, double s0, double w0):
    """Drive the spread and log-price recursions with innovation arrays.

        s(k+1) = (1 - theta) s(k) + sigma_s u(k)
        w(k+1) = w(k) + sigma_w v(k)

    Returns (s, w) of length len(u) + 1 including the initial state.
    """
    cdef Py_ssize_t n = u.shape[0]
    s_arr = np.empty(n + 1)
    w_arr = np.empty(n + 1)
    cdef double[::1] s = s_arr
    cdef double[::1] w = w_arr
    cdef double one_minus_theta = 1.0 - theta
    cdef double sk = s0
    cdef double wk = w0
    cdef Py_ssize_t k
    s[0] = sk
    w[0] = wk
    for k in range(n):
        sk = one_minus_theta * sk + sigma_s * u[k]
        wk = wk + sigma_w * v[k]
        s[k + 1] = sk
        w[k + 1] = wk
    return s_arr, w_arr


def trade_scan(double[::1] p1, double[::1] p2, double[::1] s, double beta,
               double tau, double leverage, double v0,
               double[::1] dv_out, double[::1] sabs_out):
    """Run the fully-invested threshold rule down one price path.

    Trades the log-linear spread with slope beta at threshold tau; spread
    values are supplied in s. Each traded period k contributes one profit
    entry dv_out[i] and its |spread| sabs_out[i]. Returns (events, v_final).
    The last period is never traded: its profit would need period n.
    """
    cdef Py_ssize_t n = p1.shape[0]
    cdef double v = v0
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t k
    cdef double sk, p1k, p2k, g1, g2, lam, sgn, n1, n2, dv
    for k in range(n - 1):
        sk = s[k]
        if fabs(sk) > tau:
            p1k = p1[k]
            p2k = p2[k]
            g1 = -beta / p1k
            g2 = 1.0 / p2k
            lam = leverage * v / (fabs(g1) * p1k + fabs(g2) * p2k)
            sgn = 1.0 if sk > 0.0 else -1.0
            n1 = -lam * sgn * g1
            n2 = -lam * sgn * g2
            dv = n1 * (p1[k + 1] - p1k) + n2 * (p2[k + 1] - p2k)
            v = v + dv
            dv_out[i] = dv
            sabs_out[i] = fabs(sk)
            i += 1
    return i, v
