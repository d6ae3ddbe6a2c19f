"""Prime fields F_p, extensions F_{q^d} (q = p^e), discrete logs, traces, norms.

All extension levels d = 1..max_ext live inside one ambient field F_{q^M},
M = lcm(1, ..., max_ext), realized as F_p[x]/(f) for the lexicographically
smallest monic irreducible f of degree e*M (coefficients compared low-to-high).
Nonzero elements are represented by their discrete log with respect to the
ambient generator g (the smallest-encoding element of full order); zero is the
sentinel ``tower.zero``.  The level-d generator is g_d = g^((q^M-1)/(q^d-1)),
which makes every norm map send generators to generators, so characters
transport through norms by pure exponent arithmetic.

Addition uses Zech logarithms.  Towers whose ambient field exceeds the table
budget are rejected, except plain prime fields (e = 1, max_ext = 1), which fall
back to value representation with baby-step/giant-step discrete logs.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt

from fqlab import _backend
from fqlab.cyclo import CycloContext, factorize


class NotPrime(ValueError):
    """Raised when the requested characteristic is not a prime number."""


class TowerTooLarge(ValueError):
    """Raised when the ambient field would exceed the discrete-log table budget."""


class ZeroElement(ValueError):
    """Raised for operations (dlog, inverse) undefined at zero."""


class ZeroNorm(ZeroElement):
    """Raised by norm maps applied to zero."""


DEFAULT_TABLE_BUDGET = 1 << 22

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _lcm_upto(d: int) -> int:
    m = 1
    for k in range(2, d + 1):
        m = m * k // gcd(m, k)
    return m


# -- dense polynomial arithmetic over F_p (tower construction only) ------------

def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a, b, f, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_rem(out, f, p)


def _poly_rem(a, f, p):
    a = list(a)
    df = len(f) - 1
    for i in range(len(a) - 1, df - 1, -1):
        c = a[i] % p
        if c:
            for j in range(df + 1):
                a[i - df + j] = (a[i - df + j] - c * f[j]) % p
    del a[df:]
    return _poly_trim(a)

def _poly_powmod(a, exp, f, p):
    result = [1]
    base = _poly_rem(list(a), f, p)
    while exp:
        if exp & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        exp >>= 1
    return result


def _poly_gcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        # Make b monic, then reduce a mod b.
        inv = pow(b[-1], -1, p)
        b = [c * inv % p for c in b]
        a = _poly_trim([c % p for c in _poly_longdiv_rem(a, b, p)])
        a, b = b, a
    return a


def _poly_longdiv_rem(a, b, p):
    a = list(a)
    db = len(b) - 1
    while len(a) - 1 >= db and _poly_trim(list(a)):
        c = a[-1] % p
        if c:
            shift = len(a) - 1 - db
            for j in range(db + 1):
                a[shift + j] = (a[shift + j] - c * b[j]) % p
        a.pop()
    return a


def _is_irreducible(f, p):
    m = len(f) - 1
    x = [0, 1]
    xq = _poly_powmod(x, p ** m, f, p)
    diff = _poly_trim([(a - b) % p for a, b in
                       zip(xq + [0] * len(x), x + [0] * len(xq))])
    if diff:
        return False
    for r in set(factorize(m)):
        xr = _poly_powmod(x, p ** (m // r), f, p)
        diff = _poly_trim([(a - b) % p for a, b in
                           zip(xr + [0] * len(x), x + [0] * len(xr))])
        if not diff:
            return False
        if len(_poly_gcd(diff, f, p)) - 1 > 0:
            return False
    return True


def lex_smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree m over F_p, coefficients low-to-high."""
    if m == 1:
        return (0, 1)  # x
    # Iterate constant term outermost: lexicographic in (c_0, ..., c_{m-1}).
    from itertools import product
    for tail in product(range(p), repeat=m):
        if tail[0] == 0:
            continue
        f = list(tail) + [1]
        if _is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")


class FieldTower:
    """F_q and its extensions F_{q^d}, d <= max_ext, with dlog tables.

    Immutable after construction; safe for concurrent reads.  Use
    :func:`make_tower` rather than instantiating directly.
    """

    def __init__(self, p: int, e: int = 1, max_ext: int = 1,
                 table_budget: int = DEFAULT_TABLE_BUDGET):
        if e < 1 or max_ext < 1:
            raise ValueError("degrees must be >= 1")
        if not is_prime(p):
            raise NotPrime(f"p = {p} is not prime")
        self.p = p
        self.e = e
        self.q = p ** e
        self.max_ext = max_ext
        self.ambient_ext = _lcm_upto(max_ext)
        self.ambient_degree = e * self.ambient_ext
        self.order = self.q ** self.ambient_ext
        levels = range(1, max_ext + 1)
        conductor = p
        for d in levels:
            qd = self.q ** d - 1
            conductor = conductor * qd // gcd(conductor, qd)
        self.conductor = conductor

        if self.order <= table_budget:
            self.mode = "table"
            self.zero = -1
            self.one = 0
            self._build_tables()
            self.cyclo = CycloContext(conductor)
        elif e == 1 and max_ext == 1 and p <= 1 << 40:
            self.mode = "bsgs"
            self.zero = 0
            self.one = 1
            self._gen_value = _smallest_primitive_root(p)
            self._baby = None
            self.cyclo = None  # conductor far beyond exact-arithmetic range
        else:
            raise TowerTooLarge(
                f"ambient field F_{{{p}^{self.ambient_degree}}} exceeds the "
                f"table budget {table_budget}")

    # -- construction ----------------------------------------------------------

    def _build_tables(self):
        p, m = self.p, self.ambient_degree
        Q = self.order
        f = list(lex_smallest_irreducible(p, m))
        self.ambient_poly = tuple(f)
        gen_enc = self._find_generator(f)
        self._gen_enc = gen_enc
        exp, log, zech = _backend.gf_build_tables(p, m, f[:-1], gen_enc)
        self._exp = exp
        self._log = log
        self._zech = zech
        self._half = (Q - 1) // 2 if p != 2 else 0  # dlog of -1
        self._prime_of_dlog = {self.zero: 0}
        self._dlog_of_prime = {0: self.zero}
        acc = self.zero
        for c in range(1, p):
            acc = self.add(acc, self.one)
            self._prime_of_dlog[acc] = c
            self._dlog_of_prime[c] = acc

    def _find_generator(self, f) -> int:
        p, m = self.p, self.ambient_degree
        Q = self.order
        radicals = list(factorize(Q - 1))
        enc = 2
        while True:
            digits = []
            v = enc
            for _ in range(m):
                digits.append(v % p)
                v //= p
            cand = _poly_trim(digits)
            ok = True
            for r in radicals:
                power = _poly_powmod(cand, (Q - 1) // r, f, p)
                if power == [1]:
                    ok = False
                    break
            if ok:
                return enc
            enc += 1
            if enc >= Q:
                raise AssertionError("no generator found")

    # -- basic arithmetic ------------------------------------------------------

    def add(self, x: int, y: int) -> int:
        if self.mode == "bsgs":
            return (x + y) % self.p
        if x == -1:
            return y
        if y == -1:
            return x
        Q1 = self.order - 1
        d = y - x
        if d < 0:
            d += Q1
        z = self._zech[d]
        if z == -1:
            return -1
        s = x + z
        return s - Q1 if s >= Q1 else s

    def neg(self, x: int) -> int:
        if self.mode == "bsgs":
            return (-x) % self.p
        if x == -1 or self.p == 2:
            return x
        s = x + self._half
        Q1 = self.order - 1
        return s - Q1 if s >= Q1 else s

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if self.mode == "bsgs":
            return x * y % self.p
        if x == -1 or y == -1:
            return -1
        s = x + y
        Q1 = self.order - 1
        return s - Q1 if s >= Q1 else s

    def inv(self, x: int) -> int:
        if x == self.zero:
            raise ZeroElement("inverse of zero")
        if self.mode == "bsgs":
            return pow(x, -1, self.p)
        return (-x) % (self.order - 1)

    def power(self, x: int, k: int) -> int:
        if x == self.zero:
            if k > 0:
                return self.zero
            if k == 0:
                return self.one
            raise ZeroElement("negative power of zero")
        if self.mode == "bsgs":
            return pow(x, k % (self.p - 1), self.p)
        return x * k % (self.order - 1)

    def frobenius(self, x: int, times: int = 1) -> int:
        """x -> x^(p^times)."""
        return self.power(x, self.p ** times)

    # -- levels, dlogs, traces, norms ------------------------------------------

    def _check_level(self, d: int):
        if not 1 <= d <= self.max_ext:
            raise ValueError(f"level {d} outside tower (max_ext={self.max_ext})")

    def stride(self, d: int) -> int:
        """Index of F_{q^d}^x inside the ambient unit group."""
        return (self.order - 1) // (self.q ** d - 1)

    def gen(self, d: int = 1) -> int:
        self._check_level(d)
        if self.mode == "bsgs":
            return self._gen_value
        return self.stride(d)

    def element(self, d: int, j: int) -> int:
        """g_d^j as an element."""
        self._check_level(d)
        if self.mode == "bsgs":
            return pow(self._gen_value, j % (self.p - 1), self.p)
        return self.stride(d) * (j % (self.q ** d - 1))

    def in_level(self, x: int, d: int) -> bool:
        if x == self.zero:
            return True
        if self.mode == "bsgs":
            return True
        return x % self.stride(d) == 0

    def level_of(self, x: int) -> int:
        for d in range(1, self.max_ext + 1):
            if self.in_level(x, d):
                return d
        raise ValueError("element does not lie in any tower level")

    def dlog(self, x: int, d: int = 1) -> int:
        """Exponent j with g_d^j = x, for nonzero x in F_{q^d}."""
        if x == self.zero:
            raise ZeroElement("dlog of zero")
        self._check_level(d)
        if self.mode == "bsgs":
            return self._bsgs_dlog(x)
        s = self.stride(d)
        if x % s:
            raise ValueError("element not in the requested level")
        return x // s

    def _bsgs_dlog(self, x: int) -> int:
        p, g = self.p, self._gen_value
        if self._baby is None:
            B = isqrt(p - 1) + 1
            baby = {}
            v = 1
            for j in range(B):
                baby.setdefault(v, j)
                v = v * g % p
            self._baby = (B, baby, pow(g, -B, p))
        B, baby, giant = self._baby
        v = x % p
        for i in range(B + 1):
            j = baby.get(v)
            if j is not None:
                return (i * B + j) % (p - 1)
            v = v * giant % p
        raise AssertionError("bsgs failed")

    def units(self, d: int = 1):
        """All nonzero elements of F_{q^d}, generator-power order."""
        self._check_level(d)
        if self.mode == "bsgs":
            return range(1, self.p)
        s = self.stride(d)
        return range(0, self.order - 1, s) if s else range(0)

    def elements(self, d: int = 1):
        yield self.zero
        yield from self.units(d)

    def trace_between(self, x: int, d: int, to: int = 1) -> int:
        """Trace F_{q^d} -> F_{q^to}, to | d."""
        self._check_level(d)
        if d % to:
            raise ValueError("trace target must divide the source level")
        if self.mode == "bsgs":
            return x
        acc = self.zero
        step = self.e * to
        for j in range(d // to):
            acc = self.add(acc, self.power(x, self.p ** (step * j)))
        return acc

    def norm_between(self, x: int, d: int, to: int = 1) -> int:
        self._check_level(d)
        if d % to:
            raise ValueError("norm target must divide the source level")
        if x == self.zero:
            raise ZeroNorm("norm of zero")
        if self.mode == "bsgs":
            return x
        k = (self.q ** d - 1) // (self.q ** to - 1)
        return x * k % (self.order - 1)

    def trace_to_base(self, x: int, d: int) -> int:
        return self.trace_between(x, d, 1)

    def norm_to_base(self, x: int, d: int) -> int:
        return self.norm_between(x, d, 1)

    def trace_to_prime(self, x: int, d: int) -> int:
        """Absolute trace F_{q^d} -> F_p, as an integer in [0, p)."""
        self._check_level(d)
        if self.mode == "bsgs":
            return x
        acc = self.zero
        for j in range(self.e * d):
            acc = self.add(acc, self.power(x, self.p ** j))
        return self._prime_of_dlog[acc]

    def from_int(self, c: int) -> int:
        """The prime-field constant c as an element."""
        if self.mode == "bsgs":
            return c % self.p
        return self._dlog_of_prime[c % self.p]

    def prime_int(self, x: int) -> int:
        """Integer value of a prime-subfield element."""
        if self.mode == "bsgs":
            return x % self.p
        return self._prime_of_dlog[x]

    # -- presentation ----------------------------------------------------------

    def encoding(self, x: int) -> int:
        """Base-p integer encoding of the coefficient vector of x."""
        if self.mode == "bsgs":
            return x
        return 0 if x == self.zero else int(self._exp[x])

    def from_encoding(self, enc: int) -> int:
        if self.mode == "bsgs":
            return enc % self.p
        if enc == 0:
            return self.zero
        k = int(self._log[enc])
        if k < 0:
            raise ValueError("invalid encoding")
        return k

    @lru_cache(maxsize=None)
    def defining_polynomial(self, d: int) -> tuple[int, ...]:
        """Minimal polynomial of g_d over F_p (monic, degree e*d, low-to-high)."""
        self._check_level(d)
        if self.mode == "bsgs":
            return ((-self._gen_value) % self.p, 1)
        g = self.gen(d)
        conjugates = [self.power(g, self.p ** j) for j in range(self.e * d)]
        poly = [self.one]
        for r in conjugates:
            nr = self.neg(r)
            poly = [self.mul(nr, poly[0])] + [
                self.add(poly[i - 1], self.mul(nr, poly[i])) for i in range(1, len(poly))
            ] + [self.one]
        return tuple(self.prime_int(c) for c in poly)

    def __repr__(self):
        return (f"FieldTower(p={self.p}, e={self.e}, max_ext={self.max_ext}, "
                f"mode={self.mode})")


def _smallest_primitive_root(p: int) -> int:
    radicals = list(factorize(p - 1))
    g = 2
    while True:
        if all(pow(g, (p - 1) // r, p) != 1 for r in radicals):
            return g
        g += 1


def make_tower(p: int, e: int = 1, max_ext: int = 1,
               table_budget: int = DEFAULT_TABLE_BUDGET) -> FieldTower:
    """Build the tower F_{p^e} with extensions up to degree max_ext."""
    return FieldTower(p, e=e, max_ext=max_ext, table_budget=table_budget)


@lru_cache(maxsize=None)
def tower_for_q(q: int, max_ext: int = 1) -> FieldTower:
    """Tower over F_q, q = p^e a prime power (cached per (q, max_ext))."""
    fac = factorize(q)
    if len(fac) != 1:
        raise NotPrime(f"q = {q} is not a prime power")
    (p, e), = fac.items()
    return make_tower(p, e=e, max_ext=max_ext)
