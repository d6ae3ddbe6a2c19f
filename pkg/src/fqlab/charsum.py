"""Additive and multiplicative characters of F_{q^d}, Gauss and Kloosterman sums.

Conventions: psi_a(x) = zeta_p^(absolute trace of a*x); chi_k(g_d^m) =
zeta_{q^d-1}^(k*m).  chi(0) is never evaluated; every sum ranges over nonzero
elements explicitly.  Exact values live in the tower's cyclotomic ring.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from fqlab.cyclo import CycloValue
from fqlab.field import FieldTower


class TrivialAddChar(ValueError):
    """Gauss sums require a nontrivial additive character."""


@dataclass(frozen=True)
class AddChar:
    """psi_a on F_{q^d}: x -> zeta_p^(trace-to-prime of a*x)."""

    tower: FieldTower
    level: int = 1
    a: int | None = None  # None means a = 1

    def __post_init__(self):
        if self.a is None:
            object.__setattr__(self, "a", self.tower.one)

    @property
    def trivial(self) -> bool:
        return self.a == self.tower.zero

    def trace_arg(self, x: int) -> int:
        """Integer exponent t with psi(x) = zeta_p^t."""
        t = self.tower
        return t.trace_to_prime(t.mul(self.a, x), self.level)

    def value(self, x: int) -> CycloValue:
        t = self.tower
        return t.cyclo.zeta(self.trace_arg(x) * (t.cyclo.N // t.p))

    def valuef(self, x: int) -> complex:
        return cmath.exp(2j * cmath.pi * self.trace_arg(x) / self.tower.p)

    def at_level(self, level: int) -> "AddChar":
        """Standard character of the degree-`level` extension (psi composed with trace)."""
        if self.a != self.tower.one:
            raise ValueError("level change is defined for the standard character")
        return AddChar(self.tower, level)


@dataclass(frozen=True)
class MultChar:
    """chi_k on F_{q^d}^x: g_d^m -> zeta_{q^d-1}^(k*m)."""

    tower: FieldTower
    level: int = 1
    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "k", self.k % self.group_order)

    @property
    def group_order(self) -> int:
        return self.tower.q ** self.level - 1

    @property
    def trivial(self) -> bool:
        return self.k == 0

    def root_arg(self, x: int) -> int:
        """Exponent m with chi(x) = zeta_{q^d-1}^m."""
        t = self.tower
        return self.k * t.dlog(x, self.level) % self.group_order

    def value(self, x: int) -> CycloValue:
        t = self.tower
        return t.cyclo.zeta(self.root_arg(x) * (t.cyclo.N // self.group_order))

    def valuef(self, x: int) -> complex:
        return cmath.exp(2j * cmath.pi * self.root_arg(x) / self.group_order)

    def compose_norm(self, level: int) -> "MultChar":
        """chi o Norm from the degree-`level` extension down to this character's level.

        With norm-compatible generators this is the character with exponent
        k * (q^level - 1)/(q^d - 1).
        """
        if level % self.level:
            raise ValueError("norm source level must be a multiple of the target")
        q_to = self.tower.q ** self.level - 1
        q_from = self.tower.q ** level - 1
        return MultChar(self.tower, level, self.k * (q_from // q_to))

    def __mul__(self, other: "MultChar") -> "MultChar":
        if other.level != self.level:
            raise ValueError("character level mismatch")
        return MultChar(self.tower, self.level, self.k + other.k)

    def inverse(self) -> "MultChar":
        return MultChar(self.tower, self.level, -self.k)


def gauss_sum(chi: MultChar, psi: AddChar) -> CycloValue:
    """Sum over x in F_{q^d}^x of chi(x) psi(x), exact."""
    if psi.trivial:
        raise TrivialAddChar("gauss_sum needs a nontrivial additive character")
    if chi.level != psi.level:
        raise ValueError("character level mismatch")
    tower = chi.tower
    cache = getattr(tower, "_gauss_cache", None)
    if cache is None:
        cache = tower._gauss_cache = {}
    key = (chi.level, chi.k, psi.a)
    val = cache.get(key)
    if val is None:
        ctx = tower.cyclo
        N = ctx.N
        d = chi.level
        order = tower.q ** d - 1
        chi_step = N // order
        psi_step = N // tower.p
        terms = []
        for j in range(order):
            x = tower.element(d, j)
            terms.append((chi.k * j % order * chi_step
                          + psi.trace_arg(x) * psi_step, 1))
        val = ctx.from_terms(terms)
        cache[key] = val
    return val


def kloosterman(tower: FieldTower, a: int, level: int = 1) -> CycloValue:
    """Sum over x in F_{q^d}^x of psi(x + a/x); a may be zero."""
    ctx = tower.cyclo
    psi = AddChar(tower, level)
    step = ctx.N // tower.p
    terms = []
    for x in tower.units(level):
        arg = tower.add(x, tower.mul(a, tower.inv(x)))
        terms.append((psi.trace_arg(arg) * step, 1))
    return ctx.from_terms(terms)


def hasse_davenport_check(chi: MultChar, d: int) -> bool:
    """Whether g(chi o Norm, psi o Tr) = (-1)^(d-1) g(chi, psi)^d holds exactly."""
    if chi.level != 1:
        raise ValueError("hasse_davenport_check expects a base-level character")
    tower = chi.tower
    psi = AddChar(tower, 1)
    lifted = gauss_sum(chi.compose_norm(d), psi.at_level(d))
    g = gauss_sum(chi, psi)
    rhs = tower.cyclo.one()
    for _ in range(d):
        rhs = rhs * g
    if (d - 1) % 2:
        rhs = -rhs
    return lifted == rhs
