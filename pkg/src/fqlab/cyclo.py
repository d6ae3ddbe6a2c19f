"""Exact arithmetic in the cyclotomic ring Q(zeta_N).

A value is a sparse rational combination of roots of unity zeta_N^k.  Addition
and multiplication stay in the sparse exponent representation (exponents add
mod N); equality and the zero test reduce to a canonical basis.

The canonical basis comes from the tensor decomposition over the prime-power
parts of N: writing N = prod_i N_i with N_i = p_i^{a_i}, every exponent k maps
through CRT to digits e_i = k mod N_i, and the only relations needed are the
prime-power ones

    zeta_{N_i}^{(p_i-1)p_i^{a_i-1} + r} = - sum_{j<p_i-1} zeta_{N_i}^{j p_i^{a_i-1} + r}.

Tuples with every digit below phi(N_i) form a basis of dimension phi(N), so a
value is zero iff its canonical coordinates all vanish.  The float embedding
sends zeta_N to exp(2*pi*i/N) and is computed from the canonical form, so the
shadow of an exact zero is exactly 0.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from math import gcd


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (fine for the conductors we use)."""
    fac: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            fac[d] = fac.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        fac[n] = fac.get(n, 0) + 1
    return fac


class CycloContext:
    """Fixed-conductor cyclotomic ring; one instance is shared per field tower."""

    def __init__(self, conductor: int):
        if conductor < 1:
            raise ValueError("conductor must be >= 1")
        self.N = conductor
        fac = sorted(factorize(conductor).items())
        self._primes = [p for p, _ in fac]
        self._pp = [p ** a for p, a in fac]
        self._phi = [pp - pp // p for pp, p in zip(self._pp, self._primes)]
        self.dimension = 1
        for f in self._phi:
            self.dimension *= f
        # CRT idempotents: idem[i] = 1 mod pp[i], = 0 mod pp[j].
        self._idem = []
        for pp in self._pp:
            m = conductor // pp
            self._idem.append((m * pow(m, -1, pp)) % conductor)
        # Mixed-radix strides for linearizing canonical digit tuples.
        self._stride = []
        s = 1
        for f in self._phi:
            self._stride.append(s)
            s *= f
        self._expansion: list[tuple[tuple[int, int], ...] | None] = [None] * conductor
        self._float_of_canon: dict[int, complex] = {}

    # -- canonical reduction ------------------------------------------------

    def _expand(self, k: int) -> tuple[tuple[int, int], ...]:
        """Expansion of zeta^k as ((canonical_index, sign), ...)."""
        cached = self._expansion[k]
        if cached is not None:
            return cached
        parts: list[list[int]] = []
        sign = 1
        for p, pp, phi in zip(self._primes, self._pp, self._phi):
            e = k % pp
            if e < phi:
                parts.append([e])
            else:
                step = pp // p
                r = e - phi  # e = (p-1)*step + r with r < step
                parts.append([j * step + r for j in range(p - 1)])
                sign = -sign
        combos = [(0, sign)]
        for digits, stride, phi in zip(parts, self._stride, self._phi):
            combos = [(idx + d * stride, s) for idx, s in combos for d in digits]
        out = tuple(combos)
        self._expansion[k] = out
        return out

    def _canon_to_exponent(self, idx: int) -> int:
        """Representative exponent k with zeta^k equal to the canonical basis vector."""
        k = 0
        for stride, phi, idem in zip(self._stride, self._phi, self._idem):
            digit = (idx // stride) % phi
            k += digit * idem
        return k % self.N

    def _float_basis(self, idx: int) -> complex:
        z = self._float_of_canon.get(idx)
        if z is None:
            z = cmath.exp(2j * cmath.pi * self._canon_to_exponent(idx) / self.N)
            self._float_of_canon[idx] = z
        return z

    # -- constructors ---------------------------------------------------------

    def zero(self) -> "CycloValue":
        return CycloValue(self, {})

    def one(self) -> "CycloValue":
        return CycloValue(self, {0: Fraction(1)})

    def zeta(self, k: int) -> "CycloValue":
        return CycloValue(self, {k % self.N: Fraction(1)})

    def from_rational(self, c) -> "CycloValue":
        c = Fraction(c)
        return CycloValue(self, {0: c} if c else {})

    def from_terms(self, terms) -> "CycloValue":
        """Build a value from an iterable of (exponent, coefficient) pairs."""
        acc: dict[int, Fraction] = {}
        N = self.N
        for k, c in terms:
            k %= N
            v = acc.get(k, 0) + c
            if v:
                acc[k] = Fraction(v)
            elif k in acc:
                del acc[k]
        return CycloValue(self, acc)


class CycloValue:
    """Immutable element of Q(zeta_N); construct through a CycloContext."""

    __slots__ = ("ctx", "_terms", "_canon")

    def __init__(self, ctx: CycloContext, terms: dict[int, Fraction]):
        self.ctx = ctx
        self._terms = terms
        self._canon: dict[int, Fraction] | None = None

    def _coerce(self, other) -> "CycloValue | None":
        if isinstance(other, CycloValue):
            if other.ctx is not self.ctx and other.ctx.N != self.ctx.N:
                raise ValueError("conductor mismatch between cyclotomic values")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.from_rational(other)
        return None

    def __add__(self, other) -> "CycloValue":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        acc = dict(self._terms)
        for k, c in o._terms.items():
            v = acc.get(k, 0) + c
            if v:
                acc[k] = v
            elif k in acc:
                del acc[k]
        return CycloValue(self.ctx, acc)

    __radd__ = __add__

    def __neg__(self) -> "CycloValue":
        return CycloValue(self.ctx, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "CycloValue":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "CycloValue":
        return (-self) + other

    def __mul__(self, other) -> "CycloValue":
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.ctx.zero()
            return CycloValue(self.ctx, {k: c * other for k, c in self._terms.items()})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        N = self.ctx.N
        a, b = self._terms, o._terms
        if len(a) > len(b):
            a, b = b, a
        acc: dict[int, Fraction] = {}
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                k = k1 + k2
                if k >= N:
                    k -= N
                v = acc.get(k, 0) + c1 * c2
                if v:
                    acc[k] = v
                elif k in acc:
                    del acc[k]
        return CycloValue(self.ctx, acc)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "CycloValue":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError
            inv = Fraction(1, 1) / other
            return CycloValue(self.ctx, {k: c * inv for k, c in self._terms.items()})
        return NotImplemented

    def conjugate(self) -> "CycloValue":
        N = self.ctx.N
        return CycloValue(self.ctx, {(-k) % N: c for k, c in self._terms.items()})

    def norm2(self) -> "CycloValue":
        """self * conj(self); exact |value|^2."""
        return self * self.conjugate()

    # -- canonical form, comparisons, embeddings -------------------------------

    def canonical(self) -> dict[int, Fraction]:
        if self._canon is None:
            acc: dict[int, Fraction] = {}
            expand = self.ctx._expand
            for k, c in self._terms.items():
                for idx, s in expand(k):
                    v = acc.get(idx, 0) + (c if s > 0 else -c)
                    if v:
                        acc[idx] = v
                    elif idx in acc:
                        del acc[idx]
            self._canon = acc
        return self._canon

    def is_zero(self) -> bool:
        if not self._terms:
            return True
        return not self.canonical()

    def is_rational(self) -> bool:
        c = self.canonical()
        return not c or set(c) == {0}

    def rational_part(self) -> Fraction:
        return Fraction(self.canonical().get(0, 0))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    def __hash__(self):
        return hash(frozenset(self.canonical().items()))

    def __complex__(self) -> complex:
        z = 0j
        fb = self.ctx._float_basis
        for idx, c in self.canonical().items():
            z += float(c) * fb(idx)
        return z

    def to_complex(self) -> complex:
        return complex(self)

    def __abs__(self) -> float:
        return abs(complex(self))

    def __repr__(self) -> str:
        return f"CycloValue(N={self.ctx.N}, {self})"

    def __str__(self) -> str:
        canon = self.canonical()
        if not canon:
            return "0"
        bits = []
        for idx in sorted(canon):
            c = canon[idx]
            k = self.ctx._canon_to_exponent(idx)
            if k == 0:
                term = str(c)
            else:
                mono = f"z{self.ctx.N}^{k}" if k != 1 else f"z{self.ctx.N}"
                if c == 1:
                    term = mono
                elif c == -1:
                    term = f"-{mono}"
                else:
                    term = f"{c}*{mono}"
            bits.append(term)
        out = bits[0]
        for term in bits[1:]:
            out += f" + {term}" if not term.startswith("-") else f" - {term[1:]}"
        return out
