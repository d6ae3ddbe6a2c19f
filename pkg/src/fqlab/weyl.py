"""S_n combinatorics on characters, twisted tori, equivariant trace data, and
the centrality checker.

Orientation conventions (used consistently everywhere):
  * permutations act on tuples by (w.t)[i] = t[w^{-1}(i)];
  * a point of the twisted torus T_w(F_q) has one free coordinate x_c in
    F_{q^l}^x per cycle c = (i_1, ..., i_l) of w (min-first), embedded into
    T(F_qbar) as t[i_k] = x_c^(q^(k-1)); embedded tuples satisfy w(Fr(t)) = t,
    i.e. t[j]^q = t[w(j)];
  * a w-fixed character chi with common exponent a on a cycle of length l
    restricts to the cycle coordinate as chi_a o Norm, the multiplicative
    character with exponent a*(q^l-1)/(q-1).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product

from fqlab.charsum import AddChar
from fqlab.field import FieldTower
from fqlab.torus import (TorusChar, TorusFunction, WeightData, ZeroWeightRow,
                         all_torus_chars, mellin)


class NotFixed(ValueError):
    """restrict_char needs a character fixed by the twisting permutation."""


class NotStable(ValueError):
    """The weight multiset is not stable under the requested permutation."""


class NotAnOrbit(ValueError):
    """orbit_datum needs a full single S_n-orbit of characters."""


@dataclass(frozen=True)
class Perm:
    """Permutation of {0..n-1}; images[i] = w(i)."""

    images: tuple[int, ...]

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Perm":
        im = list(range(n))
        im[i], im[j] = j, i
        return cls(tuple(im))

    @classmethod
    def from_cycles(cls, n: int, *cycles) -> "Perm":
        im = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + type(cyc)((cyc[0],))):
                im[a] = b
        return cls(tuple(im))

    @property
    def n(self) -> int:
        return len(self.images)

    def __mul__(self, other: "Perm") -> "Perm":
        return Perm(tuple(self.images[other.images[i]] for i in range(self.n)))

    def inverse(self) -> "Perm":
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm(tuple(inv))

    def __call__(self, i: int) -> int:
        return self.images[i]

    def act_tuple(self, t: tuple) -> tuple:
        """(w.t)[i] = t[w^{-1}(i)]."""
        out = [None] * self.n
        for i, v in enumerate(t):
            out[self.images[i]] = v
        return tuple(out)

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Cycle decomposition including fixed points, min-first, sorted by min."""
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            j = self.images[start]
            while j != start:
                cyc.append(j)
                seen[j] = True
                j = self.images[j]
            out.append(tuple(cyc))
        return tuple(out)

    @property
    def sign(self) -> int:
        s = 1
        for cyc in self.cycles():
            if (len(cyc) - 1) % 2:
                s = -s
        return s

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def is_identity(self) -> bool:
        return all(self.images[i] == i for i in range(self.n))

    def __repr__(self):
        cycs = [c for c in self.cycles() if len(c) > 1]
        if not cycs:
            return f"Perm(e[{self.n}])"
        return "Perm(" + "".join("(" + " ".join(str(i + 1) for i in c) + ")"
                                 for c in cycs) + ")"


def all_perms(n: int) -> list[Perm]:
    """S_n in lexicographic order of image tuples."""
    return [Perm(im) for im in permutations(range(n))]


def perm_classes(n: int) -> list[tuple[Perm, int]]:
    """One representative per conjugacy class of S_n with the class size."""
    by_type: dict[tuple[int, ...], list[Perm]] = {}
    for w in all_perms(n):
        by_type.setdefault(w.cycle_type(), []).append(w)
    return [(ws[0], len(ws)) for _, ws in sorted(by_type.items())]


def subgroup_closure(n: int, gens: list[Perm]) -> list[Perm]:
    els = {Perm.identity(n)}
    frontier = list(els)
    while frontier:
        new = []
        for g in gens:
            for h in frontier:
                x = g * h
                if x not in els:
                    els.add(x)
                    new.append(x)
        frontier = new
    return sorted(els, key=lambda w: w.images)


@dataclass(frozen=True)
class WChi:
    """Reflection subgroup W_chi and full stabilizer W'_chi of a character."""

    chi: TorusChar
    generators: tuple[Perm, ...]
    elements: tuple[Perm, ...]        # W_chi
    stabilizer: tuple[Perm, ...]      # W'_chi

    def group(self, mode: str) -> tuple[Perm, ...]:
        if mode == "wchi":
            return self.elements
        if mode == "wchiprime":
            return self.stabilizer
        raise ValueError(f"unknown mode {mode!r}")


def w_chi(chi: TorusChar) -> WChi:
    """W_chi (generated by transpositions with equal exponents) and W'_chi."""
    n = chi.n
    a = chi.exponents
    gens = [Perm.transposition(n, i, j)
            for i in range(n) for j in range(i + 1, n) if a[i] == a[j]]
    elements = tuple(subgroup_closure(n, gens))
    stabilizer = tuple(w for w in all_perms(n) if w.act_tuple(a) == a)
    return WChi(chi, tuple(gens), elements, stabilizer)


class TwistedTorus:
    """T_w(F_q): one coordinate in F_{q^l}^x per length-l cycle of w."""

    def __init__(self, tower: FieldTower, w: Perm):
        self.tower = tower
        self.w = w
        self.n = w.n
        self.cycles = w.cycles()
        self.levels = tuple(len(c) for c in self.cycles)
        if max(self.levels) > tower.max_ext:
            raise ValueError("tower too shallow for this twist")
        self.orders = tuple(tower.q ** l - 1 for l in self.levels)
        self.size = 1
        for m in self.orders:
            self.size *= m

    def points(self):
        return product(*(range(m) for m in self.orders))

    def index(self, point: tuple[int, ...]) -> int:
        idx = 0
        for j, m in zip(point, self.orders):
            idx = idx * m + (j % m)
        return idx

    def embed(self, point: tuple[int, ...]) -> tuple[int, ...]:
        """Coordinates in T(F_qbar), as ambient field elements."""
        t = self.tower
        out = [None] * self.n
        for cyc, lvl, j in zip(self.cycles, self.levels, point):
            x = t.element(lvl, j)
            for k, pos in enumerate(cyc):
                out[pos] = t.power(x, t.q ** k)
        return tuple(out)

    def project(self, coords: tuple[int, ...]) -> tuple[int, ...]:
        """Inverse of embed on valid w o Fr - fixed tuples."""
        t = self.tower
        point = []
        for cyc, lvl in zip(self.cycles, self.levels):
            x = coords[cyc[0]]
            if x == t.zero:
                raise ValueError("torus coordinates must be nonzero")
            point.append(t.dlog(x, lvl))
        return tuple(point)

    def char_arg(self, mu: tuple[int, ...], point: tuple[int, ...]) -> int:
        """Exponent m (mod conductor) with mu(point) = zeta_N^m."""
        N = self.tower.cyclo.N
        arg = 0
        for k, j, m in zip(mu, point, self.orders):
            arg += (k * j % m) * (N // m)
        return arg % N

    def char_value(self, mu: tuple[int, ...], point: tuple[int, ...]):
        return self.tower.cyclo.zeta(self.char_arg(mu, point))

    def char_valuef(self, mu: tuple[int, ...], point: tuple[int, ...]) -> complex:
        z = 0.0
        for k, j, m in zip(mu, point, self.orders):
            z += (k * j % m) / m
        return cmath.exp(2j * cmath.pi * z)

    def chars(self):
        """All characters of T_w(F_q), as exponent tuples aligned with cycles."""
        return product(*(range(m) for m in self.orders))

    def point_inverse(self, point: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((-j) % m for j, m in zip(point, self.orders))


def transport_point(tower: FieldTower, v: Perm, w: Perm,
                    point: tuple[int, ...]) -> tuple[int, ...]:
    """Transport a T_w point to T_{v w v^{-1}} along the cycle relabeling."""
    src = TwistedTorus(tower, w)
    dst = TwistedTorus(tower, v * w * v.inverse())
    return dst.project(v.act_tuple(src.embed(point)))


def restrict_char(chi: TorusChar, tt: TwistedTorus) -> tuple[int, ...]:
    """Restriction of a w-fixed chi to T_w(F_q): per cycle, chi_a o Norm."""
    a = chi.exponents
    if tt.w.act_tuple(a) != a:
        raise NotFixed(f"character {a} is not fixed by {tt.w}")
    q = tt.tower.q
    out = []
    for cyc, lvl in zip(tt.cycles, tt.levels):
        exp = a[cyc[0]]
        out.append(exp * ((q ** lvl - 1) // (q - 1)) % (q ** lvl - 1))
    return tuple(out)


def lift_weight_perm(rho: WeightData, w: Perm) -> Perm:
    """Deterministic eta with rho[eta(i)] = w . rho[i]: smallest unused index."""
    used = [False] * rho.r
    images = []
    for i in range(rho.r):
        target = w.act_tuple(rho.rows[i])
        for j in range(rho.r):
            if not used[j] and rho.rows[j] == target:
                used[j] = True
                images.append(j)
                break
        else:
            raise NotStable(f"weights not stable under {w}")
    return Perm(tuple(images))


def all_weight_lifts(rho: WeightData, w: Perm) -> list[Perm]:
    """Every eta with rho[eta(i)] = w . rho[i] (they differ by S_rho)."""
    targets = [w.act_tuple(row) for row in rho.rows]
    out = []

    def rec(i, used, images):
        if i == rho.r:
            out.append(Perm(tuple(images)))
            return
        for j in range(rho.r):
            if not used[j] and rho.rows[j] == targets[i]:
                used[j] = True
                rec(i + 1, used, images + [j])
                used[j] = False

    rec(0, [False] * rho.r, [])
    if not out:
        raise NotStable(f"weights not stable under {w}")
    return out


class TwistedFunction:
    """Function on the points of a twisted torus (values aligned with points())."""

    def __init__(self, tt: TwistedTorus, values: list, mode: str = "exact"):
        self.tt = tt
        self.values = values
        self.mode = mode

    def at(self, point: tuple[int, ...]):
        return self.values[self.tt.index(point)]


def twisted_sum(tower: FieldTower, rho: WeightData, w: Perm, eta: Perm,
                mode: str = "exact") -> TwistedFunction:
    """The raw eta-twisted pushforward on T_w(F_q), without sign prefactors.

    phi(t) = sum over eta o Fr - fixed x in (F_qbar^x)^r with pr_rho(x) =
    embed(t) of psi(sum over eta-orbits O of Tr_{F_{q^dO}/F_q}(x_O)).
    """
    tt = TwistedTorus(tower, w)
    orbits = eta.cycles()
    degs = [len(o) for o in orbits]
    if max(degs) > tower.max_ext:
        raise ValueError("tower too shallow for this lift")
    Q1 = tower.order - 1
    psi = AddChar(tower, 1)
    n = rho.n
    rows = rho.rows
    if mode == "exact":
        step = tower.cyclo.N // tower.p
        bins: list[list] = [[] for _ in range(tt.size)]
    else:
        table = [0j] * tt.size
    strides = [tower.stride(l) for l in tt.levels]
    for free in product(*(range(tower.q ** d - 1) for d in degs)):
        xdlog = [0] * rho.r
        tr_total = tower.zero
        for orb, d, j in zip(orbits, degs, free):
            x = tower.element(d, j)
            tr_total = tower.add(tr_total, tower.trace_to_base(x, d))
            for k, pos in enumerate(orb):
                xdlog[pos] = x * (tower.q ** k) % Q1
        point = []
        ok = True
        for cyc, lvl, s in zip(tt.cycles, tt.levels, strides):
            i = cyc[0]
            coord = 0
            for jrow in range(rho.r):
                coord += rows[jrow][i] * xdlog[jrow]
            coord %= Q1
            if coord % s:
                ok = False
                break
            point.append(coord // s)
        if not ok:
            raise AssertionError("projection left the twisted torus (convention bug)")
        idx = tt.index(tuple(point))
        targ = psi.trace_arg(tr_total)
        if mode == "exact":
            bins[idx].append((targ * step, 1))
        else:
            table[idx] += cmath.exp(2j * cmath.pi * targ / tower.p)
    if mode == "exact":
        values = [tower.cyclo.from_terms(t) for t in bins]
    else:
        values = table
    return TwistedFunction(tt, values, mode)


def bessel_twisted(tower: FieldTower, rho: WeightData, w: Perm,
                   mode: str = "exact") -> TwistedFunction:
    """Twisted Bessel function: sign_W(w) sign_r(eta) (-1)^r times the raw
    eta-twisted sum, with the deterministic lift eta."""
    eta = lift_weight_perm(rho, w)
    fn = twisted_sum(tower, rho, w, eta, mode)
    sign = w.sign * eta.sign * (-1 if rho.r % 2 else 1)
    if sign != 1:
        fn.values = [v * sign if mode == "exact" else sign * v
                     for v in fn.values]
    return fn


class EquivDatum:
    """Trace shadow of a W-equivariant complex: one function per w in S_n."""

    def __init__(self, tower: FieldTower, n: int,
                 functions: dict[Perm, TwistedFunction], mode: str = "exact"):
        self.tower = tower
        self.n = n
        self.mode = mode
        self.functions = functions

    @classmethod
    def from_callable(cls, tower, n, build, mode="exact"):
        fns = {w: build(w) for w in all_perms(n)}
        return cls(tower, n, fns, mode)

    def torus(self, w: Perm) -> TwistedTorus:
        return self.functions[w].tt

    def f(self, w: Perm) -> TwistedFunction:
        return self.functions[w]

    def identity_function(self) -> TorusFunction:
        """f_e as a TorusFunction on T(F_q) (point orders agree)."""
        w = Perm.identity(self.n)
        return TorusFunction(self.tower, self.n, self.functions[w].values,
                             self.mode)

    def transport(self, v: Perm, w: Perm, point: tuple[int, ...]) -> tuple[int, ...]:
        return transport_point(self.tower, v, w, point)

    def conjugation_consistent(self, tol: float = 1e-9) -> bool:
        """Check f_{vwv^{-1}}(v . t) = f_w(t) for all v, w, t."""
        for v in all_perms(self.n):
            for w in all_perms(self.n):
                fw = self.functions[w]
                fwv = self.functions[v * w * v.inverse()]
                for t in fw.tt.points():
                    lhs = fwv.at(self.transport(v, w, t))
                    rhs = fw.at(t)
                    if self.mode == "exact":
                        if lhs != rhs:
                            return False
                    elif abs(lhs - rhs) > tol:
                        return False
        return True


def gamma_datum(tower: FieldTower, rho: WeightData,
                mode: str = "exact") -> EquivDatum:
    """The equivariant datum of twisted Bessel functions for all w in S_n."""
    n = rho.n
    for w in all_perms(n):
        if not rho.stable_under(w):
            raise NotStable("gamma data need an S_n-stable weight multiset")
    return EquivDatum.from_callable(
        tower, n, lambda w: bessel_twisted(tower, rho, w, mode), mode)


def orbit_datum(tower: FieldTower, theta, mode: str = "exact") -> EquivDatum:
    """Central datum with prescribed twisted spectra supported on the orbit theta.

    TM_w(mu) = sign(w) when mu is the restriction of a w-fixed chi in theta,
    else 0; the functions are recovered by Fourier inversion on each T_w(F_q).
    """
    theta = {tuple(a % (tower.q - 1) for a in chi) for chi in theta}
    if not theta:
        raise NotAnOrbit("empty orbit")
    n = len(next(iter(theta)))
    seed = next(iter(sorted(theta)))
    full = {w.act_tuple(seed) for w in all_perms(n)}
    if full != theta:
        raise NotAnOrbit(f"{sorted(theta)} is not a single S_n-orbit")

    def build(w: Perm) -> TwistedFunction:
        tt = TwistedTorus(tower, w)
        fixed = [TorusChar(tower, a) for a in theta if w.act_tuple(a) == a]
        mus = {restrict_char(chi, tt) for chi in fixed}
        scale = Fraction(w.sign, tt.size)
        values = []
        for t in tt.points():
            tinv = tt.point_inverse(t)
            if mode == "exact":
                acc = tower.cyclo.zero()
                for mu in mus:
                    acc = acc + tt.char_value(mu, tinv)
                values.append(acc * scale)
            else:
                acc = sum((tt.char_valuef(mu, tinv) for mu in mus), 0j)
                values.append(acc * float(scale))
        return TwistedFunction(tt, values, mode)

    return EquivDatum.from_callable(tower, n, build, mode)


def constant_datum(tower: FieldTower, n: int, value=1,
                   mode: str = "exact") -> EquivDatum:
    """f_w identically `value` on every twisted torus; the standard negative
    control (not central)."""

    def build(w: Perm) -> TwistedFunction:
        tt = TwistedTorus(tower, w)
        if mode == "exact":
            c = tower.cyclo.from_rational(value)
        else:
            c = complex(value)
        return TwistedFunction(tt, [c] * tt.size, mode)

    return EquivDatum.from_callable(tower, n, build, mode)


def sign_delta_datum(tower: FieldTower, n: int, mode: str = "exact") -> EquivDatum:
    """f_w = sign(w) * delta at the identity point of T_w(F_q); central."""

    def build(w: Perm) -> TwistedFunction:
        tt = TwistedTorus(tower, w)
        if mode == "exact":
            zero, one = tower.cyclo.zero(), tower.cyclo.from_rational(w.sign)
        else:
            zero, one = 0j, complex(w.sign)
        values = [zero] * tt.size
        values[tt.index((0,) * len(tt.cycles))] = one
        return TwistedFunction(tt, values, mode)

    return EquivDatum.from_callable(tower, n, build, mode)


def twisted_mellin(datum: EquivDatum, w: Perm, mu: tuple[int, ...]):
    """TM_w(mu) = sum over t in T_w(F_q) of f_w(t) mu(t)."""
    fn = datum.functions[w]
    tt = fn.tt
    if datum.mode == "exact":
        acc = datum.tower.cyclo.zero()
        for t in tt.points():
            v = fn.at(t)
            if v:
                acc = acc + v * tt.char_value(mu, t)
        return acc
    return sum(fn.at(t) * tt.char_valuef(mu, t) for t in tt.points())


@dataclass
class CentralityRecord:
    chi: tuple[int, ...]
    w: Perm
    lhs: object
    rhs: object
    ok: bool


@dataclass
class CentralityReport:
    n: int
    q: int
    mode: str
    records: list[CentralityRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.records)

    @property
    def failures(self) -> list[CentralityRecord]:
        return [r for r in self.records if not r.ok]

    def summary(self) -> str:
        status = "PASS" if self.passed else f"FAIL ({len(self.failures)} cells)"
        return (f"centrality[{self.mode}] n={self.n} q={self.q}: "
                f"{len(self.records)} (chi, w) cells, {status}")


def centrality_check(datum: EquivDatum, mode: str = "wchi",
                     tol: float = 1e-8) -> CentralityReport:
    """Verify TM_w(chi|_{T_w}) = sign(w) * M(f_e)(chi) for w in W_chi (or W'_chi).

    This is the trace-level shadow of centrality: the w-twisted Mellin
    transform at every w-fixed character must equal the sign character times
    the untwisted one.  Failures are recorded, not raised.
    """
    tower = datum.tower
    n = datum.n
    spectrum = mellin(datum.identity_function())
    report = CentralityReport(n=n, q=tower.q, mode=mode)
    for chi in all_torus_chars(tower, n):
        groups = w_chi(chi)
        for w in groups.group(mode):
            tt = datum.torus(w)
            mu = restrict_char(chi, tt)
            lhs = twisted_mellin(datum, w, mu)
            rhs = spectrum.at(chi) * w.sign
            if datum.mode == "exact":
                ok = lhs == rhs
            else:
                ok = abs(lhs - rhs) <= tol
            report.records.append(
                CentralityRecord(chi.exponents, w, lhs, rhs, ok))
    return report
