"""Functions on the split torus T(F_q) = (F_q^x)^n and their Mellin transforms.

Torus points are tuples of local discrete logs (k_1, ..., k_n), k_i in
Z/(q-1); characters are exponent vectors (a_1, ..., a_n) acting by
zeta_{q-1}^(sum a_i k_i).  Tables are dense, indexed row-major (first
coordinate most significant).  Exact tables hold CycloValue entries; float
tables hold complex entries ("fast" mode).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from fqlab.charsum import AddChar, MultChar, gauss_sum
from fqlab.field import FieldTower


class ZeroWeightRow(ValueError):
    """Weight data rows must be nonzero cocharacters."""


@dataclass(frozen=True)
class WeightData:
    """A multiset of r nonzero integer cocharacter rows in Z^n."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.rows:
            raise ZeroWeightRow("weight data needs at least one row")
        n = len(self.rows[0])
        for row in self.rows:
            if len(row) != n:
                raise ValueError("weight rows must share one length")
            if not any(row):
                raise ZeroWeightRow(f"zero weight row {row}")

    @property
    def r(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])

    def chi_exponent(self, row: tuple[int, ...], chi: "TorusChar") -> int:
        """Exponent of chi composed with the cocharacter row."""
        m = chi.tower.q - 1
        return sum(l * a for l, a in zip(row, chi.exponents)) % m

    def permuted(self, w) -> "WeightData":
        """Row multiset with the coordinate permutation w applied to each row."""
        return WeightData(tuple(w.act_tuple(row) for row in self.rows))

    def stable_under(self, w) -> bool:
        return sorted(self.permuted(w).rows) == sorted(self.rows)

    @classmethod
    def parse(cls, text: str) -> "WeightData":
        """Parse "1,0;0,1"-style weight lists (rows split on ';' or newlines)."""
        rows = []
        for chunk in text.replace("\n", ";").split(";"):
            chunk = chunk.strip()
            if not chunk or chunk.startswith("#"):
                continue
            rows.append(tuple(int(v) for v in chunk.split(",")))
        return cls(tuple(rows))

    @classmethod
    def from_file(cls, path) -> "WeightData":
        with open(path) as fh:
            return cls.parse(fh.read())


def standard_weights(n: int) -> WeightData:
    return WeightData(tuple(tuple(1 if j == i else 0 for j in range(n))
                            for i in range(n)))


def sym2_weights(n: int) -> WeightData:
    rows = []
    for i in range(n):
        for j in range(i, n):
            row = [0] * n
            row[i] += 1
            row[j] += 1
            rows.append(tuple(row))
    return WeightData(tuple(rows))


def det_twisted_weights(n: int) -> WeightData:
    return WeightData(tuple(tuple(2 if j == i else 1 for j in range(n))
                            for i in range(n)))


@dataclass(frozen=True)
class TorusChar:
    """Character of T(F_q) given by its exponent vector."""

    tower: FieldTower
    exponents: tuple[int, ...]

    def __post_init__(self):
        m = self.tower.q - 1
        object.__setattr__(self, "exponents",
                           tuple(a % m for a in self.exponents))

    @property
    def n(self) -> int:
        return len(self.exponents)

    @property
    def trivial(self) -> bool:
        return not any(self.exponents)

    def root_arg(self, point: tuple[int, ...]) -> int:
        m = self.tower.q - 1
        return sum(a * k for a, k in zip(self.exponents, point)) % m

    def value(self, point: tuple[int, ...]):
        t = self.tower
        m = t.q - 1
        return t.cyclo.zeta(self.root_arg(point) * (t.cyclo.N // m))

    def valuef(self, point: tuple[int, ...]) -> complex:
        m = self.tower.q - 1
        return cmath.exp(2j * cmath.pi * self.root_arg(point) / m)

    def inverse(self) -> "TorusChar":
        return TorusChar(self.tower, tuple(-a for a in self.exponents))

    def acted_by(self, w) -> "TorusChar":
        """w . chi = chi o w^{-1}."""
        return TorusChar(self.tower, w.act_tuple(self.exponents))


def all_torus_chars(tower: FieldTower, n: int):
    """All characters of T(F_q), lexicographic in the exponent vector."""
    for exps in product(range(tower.q - 1), repeat=n):
        yield TorusChar(tower, exps)


class TorusFunction:
    """Dense table T(F_q) -> values (CycloValue in exact mode, complex in float)."""

    def __init__(self, tower: FieldTower, n: int, values: list, mode: str = "exact"):
        m = tower.q - 1
        if len(values) != m ** n:
            raise ValueError("table length must be (q-1)^n")
        self.tower = tower
        self.n = n
        self.values = values
        self.mode = mode

    # -- indexing ---------------------------------------------------------------

    def index(self, point: tuple[int, ...]) -> int:
        m = self.tower.q - 1
        idx = 0
        for k in point:
            idx = idx * m + (k % m)
        return idx

    def point(self, idx: int) -> tuple[int, ...]:
        m = self.tower.q - 1
        out = []
        for _ in range(self.n):
            out.append(idx % m)
            idx //= m
        return tuple(reversed(out))

    def at(self, point: tuple[int, ...]):
        return self.values[self.index(point)]

    def points(self):
        return product(range(self.tower.q - 1), repeat=self.n)

    def zero_value(self):
        return self.tower.cyclo.zero() if self.mode == "exact" else 0j

    def __eq__(self, other):
        if not isinstance(other, TorusFunction):
            return NotImplemented
        return self.n == other.n and all(
            a == b for a, b in zip(self.values, other.values))

    def to_float(self) -> "TorusFunction":
        if self.mode == "float":
            return self
        return TorusFunction(self.tower, self.n,
                             [complex(v) for v in self.values], "float")


def delta_function(tower: FieldTower, n: int, point=None,
                   mode: str = "exact") -> TorusFunction:
    m = tower.q - 1
    one = tower.cyclo.one() if mode == "exact" else 1 + 0j
    zero = tower.cyclo.zero() if mode == "exact" else 0j
    values = [zero] * (m ** n)
    f = TorusFunction(tower, n, values, mode)
    values[f.index(point or (0,) * n)] = one
    return f


def constant_function(tower: FieldTower, n: int, value=1,
                      mode: str = "exact") -> TorusFunction:
    m = tower.q - 1
    c = tower.cyclo.from_rational(value) if mode == "exact" else complex(value)
    return TorusFunction(tower, n, [c] * (m ** n), mode)


class TorusSpectrum:
    """Function on the character group, as a dense table over exponent vectors."""

    def __init__(self, tower: FieldTower, n: int, values: list, mode: str = "exact"):
        self.tower = tower
        self.n = n
        self.values = values
        self.mode = mode

    def index(self, exponents: tuple[int, ...]) -> int:
        m = self.tower.q - 1
        idx = 0
        for a in exponents:
            idx = idx * m + (a % m)
        return idx

    def at(self, chi) -> object:
        exps = chi.exponents if isinstance(chi, TorusChar) else tuple(chi)
        return self.values[self.index(exps)]

    def chars(self):
        return all_torus_chars(self.tower, self.n)


def bessel_function(tower: FieldTower, rho: WeightData, mode: str = "exact",
                    psi: AddChar | None = None) -> TorusFunction:
    """Trace function phi(t) = (-1)^r sum_{pr_rho(x) = t} psi(sum x_i) on T(F_q).

    pr_rho(x) = prod_i rho_i(x_i) componentwise; the (-1)^r factor realizes the
    degree shift of the pushforward.
    """
    n, r = rho.n, rho.r
    m = tower.q - 1
    psi = psi or AddChar(tower, 1)
    sign = -1 if r % 2 else 1
    if mode == "exact":
        ctx = tower.cyclo
        step = ctx.N // tower.p
        bins: list[list] = [[] for _ in range(m ** n)]
    else:
        table = [0j] * (m ** n)
    f = TorusFunction(tower, n, [None] * (m ** n), mode)  # for index()
    for xs in product(range(m), repeat=r):
        point = tuple(sum(row[i] * k for row, k in zip(rho.rows, xs)) % m
                      for i in range(n))
        idx = f.index(point)
        total = tower.zero
        for k in xs:
            total = tower.add(total, tower.element(1, k))
        if mode == "exact":
            bins[idx].append((psi.trace_arg(total) * step, sign))
        else:
            table[idx] += sign * psi.valuef(total)
    if mode == "exact":
        values = [tower.cyclo.from_terms(terms) for terms in bins]
    else:
        values = table
    return TorusFunction(tower, n, values, mode)


def _axis_transform(tower, n, values, mode, zeta_arg_sign):
    """Per-axis finite Fourier passes; zeta_arg_sign = +1 forward, -1 inverse."""
    m = tower.q - 1
    if mode == "exact":
        ctx = tower.cyclo
        step = ctx.N // m
        roots = [ctx.zeta(zeta_arg_sign * j * step) for j in range(m)]
        zero = ctx.zero()
    else:
        roots = [cmath.exp(zeta_arg_sign * 2j * cmath.pi * j / m) for j in range(m)]
        zero = 0j
    cur = list(values)
    size = m ** n
    for axis in range(n):
        stride = m ** (n - 1 - axis)
        nxt = [zero] * size
        for base in range(0, size, stride * m):
            for off in range(stride):
                col = [cur[base + off + k * stride] for k in range(m)]
                for a in range(m):
                    acc = zero
                    for k in range(m):
                        acc = acc + roots[a * k % m] * col[k]
                    nxt[base + off + a * stride] = acc
        cur = nxt
    return cur


def mellin(f: TorusFunction) -> TorusSpectrum:
    """M(f)(chi) = sum_t f(t) chi(t)."""
    values = _axis_transform(f.tower, f.n, f.values, f.mode, +1)
    return TorusSpectrum(f.tower, f.n, values, f.mode)


def mellin_inverse(spec: TorusSpectrum) -> TorusFunction:
    """f(t) = (q-1)^(-n) sum_chi M(chi) chi(t)^(-1); inverse of mellin."""
    tower, n = spec.tower, spec.n
    m = tower.q - 1
    values = _axis_transform(tower, n, spec.values, spec.mode, -1)
    if spec.mode == "exact":
        scale = Fraction(1, m ** n)
        values = [v * scale for v in values]
    else:
        values = [v / m ** n for v in values]
    return TorusFunction(tower, n, values, spec.mode)


def convolve(f: TorusFunction, g: TorusFunction) -> TorusFunction:
    """(f * g)(t) = sum_s f(s) g(t s^{-1})."""
    if f.n != g.n or f.tower is not g.tower:
        raise ValueError("convolution operands must live on one torus")
    m = f.tower.q - 1
    out = [f.zero_value() for _ in range(m ** f.n)]
    pts = list(f.points())
    for s in pts:
        fs = f.at(s)
        if (f.mode == "exact" and not fs) or (f.mode == "float" and fs == 0):
            continue
        for t in pts:
            ts = tuple((a - b) % m for a, b in zip(t, s))
            out[f.index(t)] = out[f.index(t)] + fs * g.at(ts)
    return TorusFunction(f.tower, f.n, out, f.mode)


def gauss_product(tower: FieldTower, rho: WeightData, chi: TorusChar,
                  psi: AddChar | None = None):
    """prod_i ( -gauss_sum(chi^<rho_i>, psi) ), the Mellin transform of the
    Bessel function of rho at chi."""
    psi = psi or AddChar(tower, 1)
    out = tower.cyclo.one()
    for row in rho.rows:
        k = rho.chi_exponent(row, chi)
        out = out * (-gauss_sum(MultChar(tower, 1, k), psi))
    return out


def torus_tolerance(tower: FieldTower, n: int, max_abs: float) -> float:
    """Float-mode comparison tolerance: 1e-8 * (q-1)^(n/2) * max|f|."""
    return 1e-8 * (tower.q - 1) ** (n / 2) * max(max_abs, 1.0)
