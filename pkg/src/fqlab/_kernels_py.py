"""Pure-Python fallback for the hot kernels.

Same API as the compiled module ``fqlab._kernels``; ``fqlab._backend`` picks
one of the two at import time.

Conventions shared with the compiled twin:
  * finite-field elements inside matrices are small integer indices with
    0 = zero and 1 = one; ``add``/``mul`` are flattened q*q lookup tables and
    ``neg`` has length q;
  * matrices are flat row-major lists of indices;
  * a characteristic polynomial t^n + a_1 t^{n-1} + ... + a_n is packed as the
    integer code a_1 + a_2*q + ... + a_n*q^(n-1).
"""

from __future__ import annotations

import numpy as np


def backend_name() -> str:
    return "pure-python"


def gf_build_tables(p: int, m: int, f_tail, gen_enc: int):
    """Exp/log/Zech tables for F_{p^m} = F_p[x]/(f), f monic with tail f_tail.

    Elements are encoded as integers sum(c_i * p^i).  Returns (exp, log, zech):
    exp[k] encodes g^k, log[enc] is the discrete log (-1 for zero), zech[k] is
    dlog(1 + g^k) (-1 when 1 + g^k = 0).
    """
    Q = p ** m
    gd = _decode(gen_enc, p, m)
    # g * x^i mod f as digit vectors; reduction uses x^m = -f_tail.
    gx = [gd]
    for _ in range(1, m):
        prev = gx[-1]
        shifted = [0] + list(prev[:-1])
        top = prev[-1]
        if top:
            shifted = [(shifted[i] - top * f_tail[i]) % p for i in range(m)]
        gx.append(shifted)

    exp = np.empty(Q - 1, dtype=np.int64)
    log = np.full(Q, -1, dtype=np.int64)
    cur = [1] + [0] * (m - 1)
    rng = range(m)
    for k in range(Q - 1):
        enc = 0
        mult = 1
        for c in cur:
            enc += c * mult
            mult *= p
        exp[k] = enc
        log[enc] = k
        nxt = [0] * m
        for i in rng:
            ci = cur[i]
            if ci:
                row = gx[i]
                for j in rng:
                    nxt[j] += ci * row[j]
        cur = [v % p for v in nxt]
    if int(np.count_nonzero(log != -1)) != Q - 1:
        raise ValueError("generator does not have full multiplicative order")

    zech = np.empty(Q - 1, dtype=np.int64)
    for k in range(Q - 1):
        enc = int(exp[k])
        enc1 = enc - (p - 1) if enc % p == p - 1 else enc + 1
        zech[k] = log[enc1]
    return exp, log, zech


def _decode(enc: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        out.append(enc % p)
        enc //= p
    return out


def charpolys_of_products(x, us, n, q, mul, add, neg):
    """Packed charpoly codes of u*x for each flat matrix u in us."""
    nn = n * n
    out = []
    prod = [0] * nn
    for u in us:
        for i in range(n):
            ni = i * n
            for j in range(n):
                acc = 0
                for k in range(n):
                    acc = add[acc * q + mul[u[ni + k] * q + x[k * n + j]]]
                prod[ni + j] = acc
        out.append(charpoly_code(prod, n, q, mul, add, neg))
    return out


def charpoly_code(g, n, q, mul, add, neg):
    """Packed code of the characteristic polynomial of a flat matrix."""
    if n == 1:
        return neg[g[0]]
    if n == 2:
        tr = add[g[0] * q + g[3]]
        det = add[mul[g[0] * q + g[3]] * q + neg[mul[g[1] * q + g[2]]]]
        return neg[tr] + det * q
    if n == 3:
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
    return _berkowitz_code(g, n, q, mul, add, neg)


def _berkowitz_code(g, n, q, mul, add, neg):
    # Division-free characteristic polynomial for n > 3 (sampled modes only).
    cprev = [1, neg[g[0]]]
    for i in range(1, n):
        row_i = [g[i * n + j] for j in range(i)]
        col_i = [g[j * n + i] for j in range(i)]
        block = [[g[x * n + y] for y in range(i)] for x in range(i)]
        t = [1, neg[g[i * n + i]]]
        vec = col_i[:]
        for k in range(2, i + 2):
            acc = 0
            for j in range(i):
                acc = add[acc * q + mul[row_i[j] * q + vec[j]]]
            t.append(neg[acc])
            if k < i + 1:
                nxt = [0] * i
                for xx in range(i):
                    s = 0
                    brow = block[xx]
                    for y in range(i):
                        s = add[s * q + mul[brow[y] * q + vec[y]]]
                    nxt[xx] = s
                vec = nxt
        cnew = [0] * (i + 2)
        for r in range(i + 2):
            s = 0
            for c in range(min(r, i) + 1):
                s = add[s * q + mul[t[r - c] * q + cprev[c]]]
            cnew[r] = s
        cprev = cnew
    code = 0
    mult = 1
    for coef in cprev[1:]:
        code += coef * mult
        mult *= q
    return code
