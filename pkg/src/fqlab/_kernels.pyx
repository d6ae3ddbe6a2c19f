# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: GF table construction and charpoly sweeps.

API mirror of fqlab._kernels_py; see that module for conventions.
"""

import numpy as np

cimport numpy as cnp


def backend_name():
    return "cython"


def gf_build_tables(int p, int m, f_tail, long long gen_enc):
    cdef long long Q = 1
    cdef int i, j
    for i in range(m):
        Q *= p
    cdef cnp.ndarray[cnp.int64_t, ndim=1] exp = np.empty(Q - 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] log = np.full(Q, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] zech = np.empty(Q - 1, dtype=np.int64)

    cdef cnp.ndarray[cnp.int64_t, ndim=1] ftail = np.asarray(f_tail, dtype=np.int64)
    # gx[i] = digits of g * x^i mod f
    cdef cnp.ndarray[cnp.int64_t, ndim=2] gx = np.zeros((m, m), dtype=np.int64)
    cdef long long enc = gen_enc
    for i in range(m):
        gx[0, i] = enc % p
        enc //= p
    cdef long long top
    for i in range(1, m):
        top = gx[i - 1, m - 1]
        for j in range(m - 1, 0, -1):
            gx[i, j] = gx[i - 1, j - 1]
        gx[i, 0] = 0
        if top:
            for j in range(m):
                gx[i, j] = ((gx[i, j] - top * ftail[j]) % p + p) % p

    cdef cnp.ndarray[cnp.int64_t, ndim=1] cur = np.zeros(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nxt = np.zeros(m, dtype=np.int64)
    cur[0] = 1
    cdef long long k, mult, ci
    for k in range(Q - 1):
        enc = 0
        mult = 1
        for i in range(m):
            enc += cur[i] * mult
            mult *= p
        exp[k] = enc
        log[enc] = k
        for j in range(m):
            nxt[j] = 0
        for i in range(m):
            ci = cur[i]
            if ci:
                for j in range(m):
                    nxt[j] += ci * gx[i, j]
        for j in range(m):
            cur[j] = nxt[j] % p
    if np.count_nonzero(log != -1) != Q - 1:
        raise ValueError("generator does not have full multiplicative order")

    cdef long long enc1, c0
    for k in range(Q - 1):
        enc = exp[k]
        c0 = enc % p
        if c0 == p - 1:
            enc1 = enc - (p - 1)
        else:
            enc1 = enc + 1
        zech[k] = log[enc1]
    return exp, log, zech


cdef inline cnp.int64_t _cp_code(cnp.int64_t* g, int n, int q,
                                 cnp.int64_t* mul, cnp.int64_t* add,
                                 cnp.int64_t* neg) nogil:
    cdef cnp.int64_t tr, det, m01, m02, m12, a2, c11, c12
    if n == 1:
        return neg[g[0]]
    if n == 2:
        tr = add[g[0] * q + g[3]]
        det = add[mul[g[0] * q + g[3]] * q + neg[mul[g[1] * q + g[2]]]]
        return neg[tr] + det * q
    # n == 3
    tr = add[add[g[0] * q + g[4]] * q + g[8]]
    m12 = add[mul[g[4] * q + g[8]] * q + neg[mul[g[5] * q + g[7]]]]
    m02 = add[mul[g[0] * q + g[8]] * q + neg[mul[g[2] * q + g[6]]]]
    m01 = add[mul[g[0] * q + g[4]] * q + neg[mul[g[1] * q + g[3]]]]
    a2 = add[add[m01 * q + m02] * q + m12]
    c12 = add[mul[g[3] * q + g[8]] * q + neg[mul[g[5] * q + g[6]]]]
    c11 = add[mul[g[3] * q + g[7]] * q + neg[mul[g[4] * q + g[6]]]]
    det = add[mul[g[0] * q + m12] * q + neg[mul[g[1] * q + c12]]]
    det = add[det * q + mul[g[2] * q + c11]]
    return neg[tr] + a2 * q + neg[det] * q * q


def charpoly_code(g, int n, int q, mul, add, neg):
    if n > 3:
        from fqlab import _kernels_py
        return _kernels_py.charpoly_code(list(g), n, q, list(mul), list(add), list(neg))
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ga = np.asarray(g, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] mt = np.asarray(mul, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] at = np.asarray(add, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nt = np.asarray(neg, dtype=np.int64)
    return _cp_code(&ga[0], n, q, &mt[0], &at[0], &nt[0])


def charpolys_of_products(x, us, int n, int q, mul, add, neg):
    """Packed charpoly codes of u*x for each flat matrix u in us (n <= 3 fast)."""
    if n > 3:
        from fqlab import _kernels_py
        return _kernels_py.charpolys_of_products(
            list(x), [list(u) for u in us], n, q, list(mul), list(add), list(neg))
    cdef cnp.ndarray[cnp.int64_t, ndim=1] xa = np.asarray(x, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] ua = np.asarray(us, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] mt = np.asarray(mul, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] at = np.asarray(add, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nt = np.asarray(neg, dtype=np.int64)
    cdef int count = ua.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(count, dtype=np.int64)
    cdef cnp.int64_t prod[9]
    cdef cnp.int64_t acc
    cdef int t, i, j, k
    cdef cnp.int64_t* xp = &xa[0]
    cdef cnp.int64_t* mp = &mt[0]
    cdef cnp.int64_t* ap = &at[0]
    cdef cnp.int64_t* np_ = &nt[0]
    cdef cnp.int64_t* up
    for t in range(count):
        up = &ua[t, 0]
        for i in range(n):
            for j in range(n):
                acc = 0
                for k in range(n):
                    acc = ap[acc * q + mp[up[i * n + k] * q + xp[k * n + j]]]
                prod[i * n + j] = acc
        out[t] = _cp_code(prod, n, q, mp, ap, np_)
    return [int(v) for v in out]
