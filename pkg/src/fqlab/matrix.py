"""Linear algebra in GL_n(F_q): characteristic polynomials, flags, the Krylov
stratification by the span of {e_1, g e_1, g^2 e_1, ...}, and the structural
lemma checks that drive the mirabolic verifier.

Matrix entries are indices into an Fq table object (0 = zero, 1 = one); this
keeps every inner loop table-driven and works uniformly for prime powers.
Vectors are coordinate tuples; matrices act on column vectors.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product

from fqlab import _backend
from fqlab.field import FieldTower, tower_for_q


class Singular(ValueError):
    """Matrix operations in GL_n need an invertible matrix."""


class StrataMismatch(ValueError):
    """mirabolic_normalize was told a stratum that disagrees with the matrix."""


class Fq:
    """Indexed presentation of F_q for matrix work.

    Elements are ranked by their polynomial encoding, so 0 is zero, 1 is one,
    and for prime fields index == integer value.  Tables are flat lists:
    add[a*q+b], mul[a*q+b], neg[a], inv[a] (inv[0] = -1).
    """

    def __init__(self, tower: FieldTower):
        self.tower = tower
        self.q = tower.q
        self.p = tower.p
        q = self.q
        elems = [tower.zero] + sorted(tower.units(1), key=tower.encoding)
        encs = [tower.encoding(x) for x in elems]
        if encs != sorted(encs) or encs[1] != 1:
            raise AssertionError("element indexing is not encoding-sorted")
        self.elems = elems
        self.index_of = {x: i for i, x in enumerate(elems)}
        self.add = [0] * (q * q)
        self.mul = [0] * (q * q)
        self.neg = [0] * q
        self.inv = [-1] * q
        for i, x in enumerate(elems):
            self.neg[i] = self.index_of[tower.neg(x)]
            if i:
                self.inv[i] = self.index_of[tower.inv(x)]
            for j, y in enumerate(elems):
                self.add[i * q + j] = self.index_of[tower.add(x, y)]
                self.mul[i * q + j] = self.index_of[tower.mul(x, y)]

    def sub(self, a: int, b: int) -> int:
        return self.add[a * self.q + self.neg[b]]

    def dlog(self, idx: int) -> int:
        """Local dlog of a nonzero element (interop with torus points)."""
        return self.tower.dlog(self.elems[idx], 1)

    def from_dlog(self, j: int) -> int:
        return self.index_of[self.tower.element(1, j)]

    def from_int(self, c: int) -> int:
        return self.index_of[self.tower.from_int(c)]

    def __repr__(self):
        return f"Fq(q={self.q})"


_FQ_CACHE: dict[int, Fq] = {}


def fq_for(q: int) -> Fq:
    if q not in _FQ_CACHE:
        _FQ_CACHE[q] = Fq(tower_for_q(q, 1))
    return _FQ_CACHE[q]


class MatrixGL:
    """Square matrix over F_q with a cached characteristic polynomial."""

    __slots__ = ("fq", "n", "entries", "_cp")

    def __init__(self, fq: Fq, entries):
        self.fq = fq
        flat = tuple(entries if not entries or not isinstance(entries[0], (list, tuple))
                     else [v for row in entries for v in row])
        n = int(len(flat) ** 0.5)
        if n * n != len(flat):
            raise ValueError("matrix entries must form a square")
        self.n = n
        self.entries = flat
        self._cp = None

    @classmethod
    def identity(cls, fq: Fq, n: int) -> "MatrixGL":
        return cls(fq, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def companion(cls, fq: Fq, coeffs: tuple[int, ...]) -> "MatrixGL":
        """Companion matrix of t^m + a_1 t^{m-1} + ... + a_m, coeffs = (a_1..a_m).

        Column j is e_{j+2}; the last column is (-a_m, ..., -a_1)."""
        m = len(coeffs)
        ent = [[0] * m for _ in range(m)]
        for j in range(m - 1):
            ent[j + 1][j] = 1
        for i in range(m):
            ent[i][m - 1] = fq.neg[coeffs[m - 1 - i]]
        return cls(fq, ent)

    @classmethod
    def diagonal(cls, fq: Fq, diag) -> "MatrixGL":
        n = len(diag)
        return cls(fq, tuple(diag[i] if i == j else 0
                             for i in range(n) for j in range(n)))

    @classmethod
    def block_diagonal(cls, blocks: list["MatrixGL"]) -> "MatrixGL":
        fq = blocks[0].fq
        n = sum(b.n for b in blocks)
        ent = [[0] * n for _ in range(n)]
        off = 0
        for b in blocks:
            for i in range(b.n):
                for j in range(b.n):
                    ent[off + i][off + j] = b.entry(i, j)
            off += b.n
        return cls(fq, ent)

    def entry(self, i: int, j: int) -> int:
        return self.entries[i * self.n + j]

    def rows(self) -> list[list[int]]:
        n = self.n
        return [list(self.entries[i * n:(i + 1) * n]) for i in range(n)]

    def __mul__(self, other: "MatrixGL") -> "MatrixGL":
        n, q = self.n, self.fq.q
        add, mul = self.fq.add, self.fq.mul
        a, b = self.entries, other.entries
        out = []
        for i in range(n):
            ni = i * n
            for j in range(n):
                acc = 0
                for k in range(n):
                    acc = add[acc * q + mul[a[ni + k] * q + b[k * n + j]]]
                out.append(acc)
        return MatrixGL(self.fq, tuple(out))

    def vec(self, v: tuple[int, ...]) -> tuple[int, ...]:
        n, q = self.n, self.fq.q
        add, mul = self.fq.add, self.fq.mul
        a = self.entries
        return tuple(
            _dot(a[i * n:(i + 1) * n], v, q, add, mul) for i in range(n))

    def char_poly_code(self) -> int:
        if self._cp is None:
            self._cp = _backend.charpoly_code(
                self.entries, self.n, self.fq.q,
                self.fq.mul, self.fq.add, self.fq.neg)
        return self._cp

    def det(self) -> int:
        """det(g), from the charpoly constant term a_n = (-1)^n det."""
        a_n = self.char_poly_tuple()[-1]
        return self.fq.neg[a_n] if self.n % 2 else a_n

    def char_poly_tuple(self) -> tuple[int, ...]:
        code = self.char_poly_code()
        q = self.fq.q
        out = []
        for _ in range(self.n):
            out.append(code % q)
            code //= q
        return tuple(out)

    def is_invertible(self) -> bool:
        return self.char_poly_tuple()[-1] != 0

    def inverse(self) -> "MatrixGL":
        n, fq = self.n, self.fq
        aug = [row + [1 if j == i else 0 for j in range(n)]
               for i, row in enumerate(self.rows())]
        for col in range(n):
            piv = next((r for r in range(col, n) if aug[r][col]), None)
            if piv is None:
                raise Singular("matrix is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            ipiv = fq.inv[aug[col][col]]
            aug[col] = [fq.mul[ipiv * fq.q + v] for v in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    c = aug[r][col]
                    aug[r] = [fq.sub(aug[r][j], fq.mul[c * fq.q + aug[col][j]])
                              for j in range(2 * n)]
        return MatrixGL(fq, [row[n:] for row in aug])

    def conjugate_by(self, h: "MatrixGL") -> "MatrixGL":
        """h g h^{-1}."""
        return h * self * h.inverse()

    def is_upper_triangular(self) -> bool:
        n = self.n
        return all(self.entries[i * n + j] == 0
                   for i in range(n) for j in range(i))

    def __eq__(self, other):
        return (isinstance(other, MatrixGL) and self.entries == other.entries
                and self.fq is other.fq)

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"MatrixGL({self.rows()})"


def _dot(row, v, q, add, mul):
    acc = 0
    for a, b in zip(row, v):
        acc = add[acc * q + mul[a * q + b]]
    return acc


def char_poly(g: MatrixGL) -> tuple[int, ...]:
    """(a_1, ..., a_n) of det(t Id - g) = t^n + a_1 t^{n-1} + ... + a_n.

    Sign convention: a_n = (-1)^n det(g).  Raises Singular on det = 0.
    """
    coeffs = g.char_poly_tuple()
    if coeffs[-1] == 0:
        raise Singular("characteristic polynomial has zero constant term")
    return coeffs


# -- vector-space helpers -------------------------------------------------------


def _reduce_against(basis: list[tuple[int, ...]], pivots: list[int],
                    v: tuple[int, ...], fq: Fq):
    """Reduce v against an echelonized basis; returns the residue."""
    v = list(v)
    q = fq.q
    for b, piv in zip(basis, pivots):
        c = v[piv]
        if c:
            factor = fq.mul[c * q + fq.inv[b[piv]]]
            v = [fq.sub(v[j], fq.mul[factor * q + b[j]]) for j in range(len(v))]
    return tuple(v)


class _Span:
    """Incremental row space with elimination; append returns True if v was new."""

    def __init__(self, fq: Fq):
        self.fq = fq
        self.basis: list[tuple[int, ...]] = []
        self.pivots: list[int] = []

    def residue(self, v):
        return _reduce_against(self.basis, self.pivots, v, self.fq)

    def contains(self, v) -> bool:
        return not any(self.residue(v))

    def append(self, v) -> bool:
        r = self.residue(v)
        piv = next((i for i, c in enumerate(r) if c), None)
        if piv is None:
            return False
        self.basis.append(r)
        self.pivots.append(piv)
        return True

    @property
    def dim(self) -> int:
        return len(self.basis)


def strata_index(g: MatrixGL) -> int:
    """m = dim span{e_1, g e_1, g^2 e_1, ...} (the Krylov stratum label)."""
    span = _Span(g.fq)
    v = tuple(1 if i == 0 else 0 for i in range(g.n))
    m = 0
    while span.append(v):
        m += 1
        v = g.vec(v)
    return m


def krylov_basis(g: MatrixGL) -> list[tuple[int, ...]]:
    """[e_1, g e_1, ..., g^{m-1} e_1] for m = strata_index(g)."""
    span = _Span(g.fq)
    out = []
    v = tuple(1 if i == 0 else 0 for i in range(g.n))
    while span.append(v):
        out.append(v)
        v = g.vec(v)
    return out


def mirabolic_normalize(g: MatrixGL, m: int | None = None):
    """(q_elt, normal_form): q_elt fixes e_1 and q g q^{-1} is block upper
    triangular with companion top-left m x m block (m the Krylov stratum).

    The Krylov basis is completed to a basis by the smallest standard basis
    vectors; q_elt is the corresponding change of basis.
    """
    kry = krylov_basis(g)
    actual = len(kry)
    if m is not None and m != actual:
        raise StrataMismatch(f"matrix lies in stratum {actual}, not {m}")
    fq, n = g.fq, g.n
    span = _Span(fq)
    cols = list(kry)
    for v in kry:
        span.append(v)
    for j in range(n):
        e = tuple(1 if i == j else 0 for i in range(n))
        if span.append(e):
            cols.append(e)
        if len(cols) == n:
            break
    basis_mat = MatrixGL(fq, [[cols[j][i] for j in range(n)] for i in range(n)])
    q_elt = basis_mat.inverse()
    normal = q_elt * g * basis_mat
    return q_elt, normal


# -- flags ----------------------------------------------------------------------


@dataclass(frozen=True)
class Flag:
    """Complete flag, stored as the reduced triangular basis b_1, ..., b_n.

    b_i spans V_i over V_{i-1}; b_i is scaled so its leading entry is 1 and
    its entries at earlier rows' leading positions vanish, which makes the
    representation unique per flag.
    """

    rows: tuple[tuple[int, ...], ...]


def _normalize_lead(v: tuple[int, ...], fq: Fq) -> tuple[int, ...]:
    piv = next(i for i, c in enumerate(v) if c)
    inv = fq.inv[v[piv]]
    return tuple(fq.mul[inv * fq.q + c] for c in v)


def _canonical_flag(rows: list[tuple[int, ...]], fq: Fq) -> Flag:
    out: list[tuple[int, ...]] = []
    pivots: list[int] = []
    for v in rows:
        r = v
        # Clear entries at earlier leading positions, then normalize.
        for b, piv in zip(out, pivots):
            c = r[piv]
            if c:
                r = tuple(fq.sub(r[j], fq.mul[c * fq.q + b[j]])
                          for j in range(len(r)))
        r = _normalize_lead(r, fq)
        out.append(r)
        pivots.append(next(i for i, c in enumerate(r) if c))
    return Flag(tuple(out))


def _proj_lines(fq: Fq, n: int):
    """Normalized representatives of the lines in F_q^n (leading entry 1)."""
    for piv in range(n):
        head = (0,) * piv + (1,)
        for tail in product(range(fq.q), repeat=n - piv - 1):
            yield head + tail


def all_flags(fq: Fq, n: int) -> list[Flag]:
    """Every complete flag in F_q^n, canonical form, deterministic order."""
    if n == 1:
        return [Flag(((1,),))]
    flags = []
    if n == 2:
        for v in _proj_lines(fq, 2):
            span = _Span(fq)
            span.append(v)
            for j in range(2):
                e = tuple(1 if i == j else 0 for i in range(2))
                if not span.contains(e):
                    flags.append(_canonical_flag([v, e], fq))
                    break
    elif n == 3:
        for v in _proj_lines(fq, 3):
            # Planes through v = kernels of covectors phi with phi(v) = 0.
            for phi in _proj_lines(fq, 3):
                if _dot(phi, v, fq.q, fq.add, fq.mul) != 0:
                    continue
                span = _Span(fq)
                span.append(v)
                w = next(u for u in product(range(fq.q), repeat=3)
                         if any(u) and _dot(phi, u, fq.q, fq.add, fq.mul) == 0
                         and not span.contains(u))
                span.append(w)
                u = next(e for e in _basis_vectors(3) if not span.contains(e))
                flags.append(_canonical_flag([v, w, u], fq))
    else:
        raise ValueError("flag enumeration implemented for n <= 3")
    flags.sort(key=lambda f: f.rows)
    return flags


def _basis_vectors(n: int):
    return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]


def fixed_flags(g: MatrixGL):
    """All flags with g V_i = V_i, each with its torus part (t_1, ..., t_n).

    The torus part is the induced scalar action on successive quotients,
    returned as Fq indices.
    """
    fq, n = g.fq, g.n
    out = []
    for flag in all_flags(fq, n):
        rows = flag.rows
        span = _Span(fq)
        torus = []
        ok = True
        for i in range(n):
            gv = g.vec(rows[i])
            res = span.residue(gv)
            # gv must lie in V_i: residue against V_{i-1} must be a multiple
            # of b_i's residue (= b_i itself, freshly reduced).
            bres = span.residue(rows[i])
            piv = next(j for j, c in enumerate(bres) if c)
            if res[piv] == 0 and any(res):
                ok = False
                break
            scale = fq.mul[res[piv] * fq.q + fq.inv[bres[piv]]]
            check = tuple(fq.sub(res[j], fq.mul[scale * fq.q + bres[j]])
                          for j in range(n))
            if any(check):
                ok = False
                break
            torus.append(scale)
            span.append(rows[i])
        if ok:
            out.append((flag, tuple(torus)))
    return out


# -- group enumerations ----------------------------------------------------------


def all_gl(fq: Fq, n: int):
    """All invertible n x n matrices over F_q (lexicographic entry order)."""
    for ent in product(range(fq.q), repeat=n * n):
        g = MatrixGL(fq, ent)
        if g.char_poly_tuple()[-1] != 0:
            yield g


def unipotent_upper(fq: Fq, n: int) -> list[MatrixGL]:
    """The full unipotent radical U: upper unitriangular matrices."""
    slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = []
    for vals in product(range(fq.q), repeat=len(slots)):
        ent = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for (i, j), v in zip(slots, vals):
            ent[i][j] = v
        out.append(MatrixGL(fq, ent))
    return out


def mirabolic_radical(fq: Fq, n: int) -> list[MatrixGL]:
    """U_Q: matrices Id + e_1 v with v supported off the first coordinate."""
    out = []
    for vals in product(range(fq.q), repeat=n - 1):
        ent = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for k, v in enumerate(vals):
            ent[0][k + 1] = v
        out.append(MatrixGL(fq, ent))
    return out


def block_unipotent(fq: Fq, n: int, m: int, rows: int | None = None) -> list[MatrixGL]:
    """Unipotent radical of the (m, n-m) parabolic; if rows is given, only the
    first `rows` rows of the Hom(E_m, F_m) block are free (U_1, U_{m-1}, ...)."""
    rows = m if rows is None else rows
    slots = [(i, j) for i in range(rows) for j in range(m, n)]
    out = []
    for vals in product(range(fq.q), repeat=len(slots)):
        ent = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for (i, j), v in zip(slots, vals):
            ent[i][j] = v
        out.append(MatrixGL(fq, ent))
    return out


def levi_mirabolic_radical(fq: Fq, n: int, m: int) -> list[MatrixGL]:
    """U_{Q_{L_m}}: Id + e_1 v with v supported in columns 2..m."""
    out = []
    for vals in product(range(fq.q), repeat=m - 1):
        ent = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for k, v in enumerate(vals):
            ent[0][k + 1] = v
        out.append(MatrixGL(fq, ent))
    return out


# -- structural lemma verifier ---------------------------------------------------


@dataclass
class LemmaReport:
    n: int
    q: int
    exhaustive: bool
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and all(v["ok"] for v in self.checks.values())

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        per = ", ".join(f"{k}:{'ok' if v['ok'] else 'FAIL'}"
                        for k, v in sorted(self.checks.items()))
        return f"lemmas n={self.n} q={self.q}: {status} [{per}]"


def verify_structure_lemmas(n: int, q: int, exhaustive: bool = True,
                            samples: int = 200, seed: int = 0) -> LemmaReport:
    """Exhaustive (n <= 3) or sampled checks of the mirabolic structure lemmas.

    (i)   for x in the open stratum X_n, u -> charpoly(u x) is a bijection from
          U_Q onto the coefficient slice with a_n = a_n(x) fixed;
    (ii)  n = 2 only: the same with U for every x outside B;
    (iii) for block matrices with companion top-left m x m block, the
          (u_1, u_{m-1}) action on the y-block is simply transitive;
    (iv)  (u_Q, u_{m-1}) -> u_{m-1} u_Q x u_{m-1}^{-1} is a bijection onto
          U_m U_{Q_{L_m}} x.
    """
    if exhaustive and n > 3:
        raise ValueError("exhaustive mode supports n <= 3")
    fq = fq_for(q)
    rng = random.Random(seed)
    rep = LemmaReport(n=n, q=q, exhaustive=exhaustive)

    if exhaustive:
        gl = list(all_gl(fq, n))
    else:
        gl = [_random_gl(fq, n, rng) for _ in range(samples)]

    uq = mirabolic_radical(fq, n)
    # (i) det-lemma bijection on the open stratum.
    tested = bij_fail = 0
    lin_fail = 0
    for x in gl:
        if strata_index(x) != n:
            continue
        tested += 1
        cps = [(u * x).char_poly_tuple() for u in uq]
        slice_ok = (len(set(cps)) == len(uq)
                    and all(cp[-1] == cps[0][-1] for cp in cps)
                    and {cp[:-1] for cp in cps}
                    == set(product(range(q), repeat=n - 1)))
        if not slice_ok:
            bij_fail += 1
            rep.failures.append(("det_lemma", x.entries))
        # Linearity of u -> c(ux) - c(x) on sampled pairs.
        for _ in range(2):
            u1, u2 = rng.choice(uq), rng.choice(uq)
            u12 = u1 * u2
            c0 = x.char_poly_tuple()
            d1 = _cp_diff((u1 * x).char_poly_tuple(), c0, fq)
            d2 = _cp_diff((u2 * x).char_poly_tuple(), c0, fq)
            d12 = _cp_diff((u12 * x).char_poly_tuple(), c0, fq)
            if d12 != tuple(fq.add[a * q + b] for a, b in zip(d1, d2)):
                lin_fail += 1
                rep.failures.append(("det_lemma_linearity", x.entries))
    rep.checks["det_lemma"] = {
        "ok": bij_fail == 0 and lin_fail == 0, "domain": tested,
        "slice_size": q ** (n - 1)}

    # (ii) GL_2 key isomorphism: u -> c(ux) bijects U onto the (a_1, det x) slice.
    if n == 2:
        uu = unipotent_upper(fq, 2)
        fails = dom = 0
        for x in gl:
            if x.is_upper_triangular():
                continue
            dom += 1
            cps = {(u * x).char_poly_tuple() for u in uu}
            if not (len(cps) == q and all(cp[1] == x.char_poly_tuple()[1]
                                          for cp in cps)):
                fails += 1
                rep.failures.append(("gl2_key_iso", x.entries))
        rep.checks["gl2_key_iso"] = {"ok": fails == 0, "domain": dom,
                                     "slice_size": q}

    # (iii) simply-transitive action and (iv) the U_Q x U_{m-1} bijection.
    for m in range(2, n):
        u1 = block_unipotent(fq, n, m, rows=1)
        um1 = block_unipotent(fq, n, m, rows=m - 1)
        um = block_unipotent(fq, n, m)
        uql = levi_mirabolic_radical(fq, n, m)
        st_fail = st_dom = key2_fail = 0
        xs = _companion_stratum(fq, n, m) if exhaustive else [
            _random_companion_stratum(fq, n, m, rng) for _ in range(samples // 4)]
        for x in xs:
            st_dom += 1
            orbit = {(a * x).entries for a in um}
            hits = set()
            for a in u1:
                for b in um1:
                    y = b * (a * x) * b.inverse()
                    hits.add(y.entries)
            if hits != orbit or len(hits) != len(u1) * len(um1):
                st_fail += 1
                rep.failures.append(("simply_transitive", x.entries))
            target = {(a * (b * x)).entries for a in um for b in uql}
            image = set()
            count = 0
            for uq_el in uq:
                for b in um1:
                    y = b * (uq_el * x) * b.inverse()
                    image.add(y.entries)
                    count += 1
            if image != target or len(image) != count:
                key2_fail += 1
                rep.failures.append(("key_lemma_2", x.entries))
        rep.checks[f"simply_transitive_m{m}"] = {
            "ok": st_fail == 0, "domain": st_dom,
            "orbit_size": len(u1) * len(um1)}
        rep.checks[f"key_lemma_2_m{m}"] = {
            "ok": key2_fail == 0, "domain": st_dom,
            "count": len(uq) * len(um1)}
    return rep


def _cp_diff(cp, c0, fq):
    return tuple(fq.sub(a, b) for a, b in zip(cp, c0))


def _companion_stratum(fq: Fq, n: int, m: int):
    """All block matrices [[C(a), y], [0, x_E]] with invertible companion C."""
    out = []
    for coeffs in product(range(fq.q), repeat=m):
        if coeffs[-1] == 0:
            continue  # singular companion block
        comp = MatrixGL.companion(fq, coeffs)
        for xe_ent in product(range(fq.q), repeat=(n - m) ** 2):
            xe = MatrixGL(fq, xe_ent)
            if xe.char_poly_tuple()[-1] == 0:
                continue
            for y in product(range(fq.q), repeat=m * (n - m)):
                ent = [[0] * n for _ in range(n)]
                for i in range(m):
                    for j in range(m):
                        ent[i][j] = comp.entry(i, j)
                for i in range(m):
                    for j in range(n - m):
                        ent[i][m + j] = y[i * (n - m) + j]
                for i in range(n - m):
                    for j in range(n - m):
                        ent[m + i][m + j] = xe.entry(i, j)
                out.append(MatrixGL(fq, ent))
    return out


def _random_companion_stratum(fq, n, m, rng):
    coeffs = [rng.randrange(fq.q) for _ in range(m - 1)] + [rng.randrange(1, fq.q)]
    comp = MatrixGL.companion(fq, tuple(coeffs))
    while True:
        xe = MatrixGL(fq, [rng.randrange(fq.q) for _ in range((n - m) ** 2)])
        if xe.char_poly_tuple()[-1] != 0:
            break
    ent = [[0] * n for _ in range(n)]
    for i in range(m):
        for j in range(m):
            ent[i][j] = comp.entry(i, j)
        for j in range(n - m):
            ent[i][m + j] = rng.randrange(fq.q)
    for i in range(n - m):
        for j in range(n - m):
            ent[m + i][m + j] = xe.entry(i, j)
    return MatrixGL(fq, ent)


def _random_gl(fq, n, rng):
    while True:
        g = MatrixGL(fq, [rng.randrange(fq.q) for _ in range(n * n)])
        if g.char_poly_tuple()[-1] != 0:
            return g


# -- factorization over F_q (degree <= 3, all the matrix module needs) -----------


def poly_eval(fq: Fq, coeffs_low: tuple[int, ...], x: int) -> int:
    acc = 0
    for c in reversed(coeffs_low):
        acc = fq.add[fq.mul[acc * fq.q + x] * fq.q + c]
    return acc


def _poly_div_linear(fq: Fq, coeffs_low, root):
    """coeffs / (t - root) for monic coeffs with coeffs(root) = 0."""
    out = []
    acc = 0
    for c in reversed(coeffs_low[1:]):
        acc = fq.add[fq.mul[acc * fq.q + root] * fq.q + c]
        out.append(acc)
    return tuple(reversed(out))


def factor_monic(fq: Fq, coeffs_low: tuple[int, ...]):
    """Factor a monic polynomial of degree <= 3 over F_q.

    coeffs_low includes the leading 1; returns sorted ((factor, mult), ...)
    with factors monic in low-to-high coefficient order.
    """
    deg = len(coeffs_low) - 1
    if deg == 0:
        return ()
    rest = coeffs_low
    roots: dict[int, int] = {}
    while len(rest) > 1:
        root = next((x for x in range(fq.q)
                     if poly_eval(fq, rest, x) == 0), None)
        if root is None:
            break
        roots[root] = roots.get(root, 0) + 1
        rest = _poly_div_linear(fq, rest, root)
    factors = [((fq.neg[r], 1), mult) for r, mult in roots.items()]
    if len(rest) > 1:
        factors.append((tuple(rest), 1))  # irreducible leftover (degree 2 or 3)
    return tuple(sorted(factors))


def is_squarefree_charpoly(fq: Fq, cp: tuple[int, ...]) -> bool:
    fac = factor_monic(fq, charpoly_to_monic(cp))
    return all(mult == 1 for _, mult in fac)


def charpoly_to_monic(cp: tuple[int, ...]) -> tuple[int, ...]:
    """(a_1..a_n) -> low-to-high monic coefficients (a_n, ..., a_1, 1)."""
    return tuple(reversed(cp)) + (1,)
