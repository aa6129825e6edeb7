# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sum-product decoder kernel (one codeword per call, nogil loops)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, log1p, tanh

cnp.import_array()

cdef double TANH_CLIP = 1.0 - 1e-15


cdef int _parity_ok(double* totals, unsigned char* bits, int n,
                    int* ev, int* cp, int m) noexcept nogil:
    cdef int v, c, e, acc
    for v in range(n):
        if totals[v] == 0.0:
            return 0
        bits[v] = 1 if totals[v] < 0.0 else 0
    for c in range(m):
        acc = 0
        for e in range(cp[c], cp[c + 1]):
            acc ^= bits[ev[e]]
        if acc:
            return 0
    return 1


def decode_one(object code, cnp.ndarray[cnp.float64_t, ndim=1] llr, int max_iterations):
    """Sum-product decoding of a single codeword; returns (bits, converged)."""
    cdef cnp.ndarray[cnp.int32_t, ndim=1] ev_arr = code.edge_var
    cdef cnp.ndarray[cnp.int32_t, ndim=1] cp_arr = code.check_ptr
    cdef int n = code.n
    cdef int m = code.num_checks
    cdef int num_edges = ev_arr.shape[0]

    cdef cnp.ndarray[cnp.float64_t, ndim=1] c_msg = np.zeros(num_edges)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v_msg = np.empty(num_edges)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] totals = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] t = np.empty(num_edges)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] bits = np.zeros(n, dtype=np.uint8)

    cdef double* llr_p = &llr[0]
    cdef double* c_p = &c_msg[0]
    cdef double* v_p = &v_msg[0]
    cdef double* tot_p = &totals[0]
    cdef double* t_p = &t[0]
    cdef unsigned char* bits_p = &bits[0]
    cdef int* ev = <int*> ev_arr.data
    cdef int* cp = <int*> cp_arr.data

    cdef int it, v, c, e, first, last
    cdef double x, fwd, bwd, prod
    cdef int ok = 0

    with nogil:
        for it in range(max_iterations + 1):
            # posterior totals
            for v in range(n):
                tot_p[v] = llr_p[v]
            for e in range(num_edges):
                tot_p[ev[e]] += c_p[e]
            if _parity_ok(tot_p, bits_p, n, ev, cp, m):
                ok = 1
                break
            if it == max_iterations:
                break
            # variable-to-check messages; exact zeros stay zero and null the
            # products they enter (no information)
            for e in range(num_edges):
                t_p[e] = tanh(0.5 * (tot_p[ev[e]] - c_p[e]))
            # check-to-variable messages: exclusive products per check
            for c in range(m):
                first = cp[c]
                last = cp[c + 1]
                fwd = 1.0
                for e in range(first, last):
                    v_p[e] = fwd  # product of t over edges before e
                    fwd *= t_p[e]
                bwd = 1.0
                for e in range(last - 1, first - 1, -1):
                    prod = v_p[e] * bwd
                    bwd *= t_p[e]
                    if prod > TANH_CLIP:
                        prod = TANH_CLIP
                    elif prod < -TANH_CLIP:
                        prod = -TANH_CLIP
                    c_p[e] = log1p(prod) - log1p(-prod)

        if not ok:
            for v in range(n):
                bits_p[v] = 1 if tot_p[v] < 0.0 else 0

    return bits, bool(ok)
