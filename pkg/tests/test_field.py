"""Field towers: generators, traces, norms, dlogs, and their invariants."""

import random

import pytest

from fqlab.field import (FieldTower, NotPrime, TowerTooLarge, ZeroElement,
                         ZeroNorm, is_prime, lex_smallest_irreducible,
                         make_tower, tower_for_q)


def test_make_tower_basics():
    t = make_tower(3, 1, 2)
    assert t.q == 3 and t.max_ext == 2
    assert len(list(t.units(2))) == 8  # |F_9^x| = 8


def test_not_prime():
    with pytest.raises(NotPrime):
        make_tower(4)
    with pytest.raises(NotPrime):
        make_tower(1)


def test_generator_order_by_exponentiation():
    # order of g_2 is exactly 8: g^d != 1 for proper divisors d of 8.
    t = make_tower(3, 1, 2)
    g = t.gen(2)
    assert t.power(g, 8) == t.one
    for d in (1, 2, 4):
        assert t.power(g, d) != t.one


def test_trace_examples():
    t = make_tower(3, 1, 2)
    # trace of 1 in F_9 -> F_3 is 2 (trace of 1 equals d mod p)
    assert t.prime_int(t.trace_to_base(t.one, 2)) == 2
    t7 = make_tower(7, 1, 3)
    assert t7.prime_int(t7.trace_to_base(t7.one, 3)) == 3


def test_norm_of_generator_is_generator():
    # With norm-compatible generators, Norm(g_d) = g_1 exactly.
    for (p, e, D) in [(3, 1, 2), (5, 1, 3), (2, 2, 2)]:
        t = make_tower(p, e, D)
        for d in range(2, D + 1):
            assert t.norm_to_base(t.gen(d), d) == t.gen(1)


def test_trace_additivity_random_pairs():
    t = make_tower(5, 1, 2)
    rng = random.Random(0)
    units = list(t.elements(2))
    for _ in range(100):
        x, y = rng.choice(units), rng.choice(units)
        lhs = t.trace_to_base(t.add(x, y), 2)
        rhs = t.add(t.trace_to_base(x, 2), t.trace_to_base(y, 2))
        assert lhs == rhs


def test_dlog():
    t = make_tower(3, 1, 2)
    assert t.dlog(t.gen(2), 2) == 1
    assert t.dlog(t.one, 2) == 0
    with pytest.raises(ZeroElement):
        t.dlog(t.zero, 2)
    rng = random.Random(1)
    units = list(t.units(2))
    for _ in range(50):
        x, y = rng.choice(units), rng.choice(units)
        assert t.dlog(t.mul(x, y), 2) == (t.dlog(x, 2) + t.dlog(y, 2)) % 8


def test_norm_surjective_with_even_fibers():
    t = make_tower(3, 1, 2)
    from collections import Counter
    fibers = Counter(t.norm_to_base(x, 2) for x in t.units(2))
    assert set(fibers) == set(t.units(1))
    assert all(v == (3 ** 2 - 1) // (3 - 1) for v in fibers.values())
    with pytest.raises(ZeroNorm):
        t.norm_to_base(t.zero, 2)


def test_norm_trace_transitivity():
    # Composite steps through intermediate levels (chain 4 -> 2 -> 1).
    t = make_tower(2, 1, 4)
    for x in t.units(4):
        step = t.norm_between(t.norm_between(x, 4, 2), 2, 1)
        assert t.norm_between(x, 4, 1) == step
        step_t = t.trace_between(t.trace_between(x, 4, 2), 2, 1)
        assert t.trace_between(x, 4, 1) == step_t


def test_artin_schreier_shadow_all_levels():
    # sum over F_{q^d} of zeta_p^trace = 0: trace values are equidistributed.
    for (p, e, D) in [(2, 1, 3), (3, 1, 3), (2, 2, 1), (3, 2, 1), (2, 3, 1),
                      (5, 1, 2), (7, 1, 1)]:
        t = make_tower(p, e, D)
        for d in range(1, D + 1):
            total = t.cyclo.zero()
            N = t.cyclo.N
            for x in t.elements(d):
                total = total + t.cyclo.zeta(t.trace_to_prime(x, d) * (N // p))
            assert total.is_zero(), (p, e, d)


def test_conductor_covers_every_level():
    t = make_tower(5, 1, 3)
    for d in (1, 2, 3):
        assert t.cyclo.N % (5 ** d - 1) == 0
    assert t.cyclo.N % 5 == 0


def test_tower_too_large():
    with pytest.raises(TowerTooLarge):
        make_tower(2, 4, 3, table_budget=1 << 12)


def test_lex_smallest_irreducible():
    # x^2 + 1 is the low-to-high lexicographically smallest over F_3.
    assert lex_smallest_irreducible(3, 2) == (1, 0, 1)
    assert lex_smallest_irreducible(2, 2) == (1, 1, 1)  # x^2 + x + 1


def test_defining_polynomial_is_monic_irreducible_degree_ed():
    t = make_tower(3, 1, 2)
    f1 = t.defining_polynomial(1)
    f2 = t.defining_polynomial(2)
    assert len(f1) == 2 and f1[-1] == 1
    assert len(f2) == 3 and f2[-1] == 1
    # g_2 is a root of its defining polynomial.
    g = t.gen(2)
    acc = t.zero
    for c in reversed(f2):
        acc = t.add(t.mul(acc, g), t.from_int(c))
    assert acc == t.zero


def test_encoding_roundtrip():
    t = make_tower(3, 1, 2)
    for x in t.elements(2):
        assert t.from_encoding(t.encoding(x)) == x


def test_bsgs_prime_mode():
    t = FieldTower(10_000_019, table_budget=1 << 10)
    assert t.mode == "bsgs"
    g = t.gen(1)
    for k in (0, 1, 2, 12345, 999_983):
        assert t.dlog(t.power(g, k), 1) == k % (t.p - 1)
    assert t.add(t.from_int(5), t.from_int(-5)) == t.zero
    assert t.trace_to_prime(t.from_int(17), 1) == 17


def test_is_prime():
    assert is_prime(2) and is_prime(97) and is_prime(10_000_019)
    assert not is_prime(1) and not is_prime(91) and not is_prime(561)


def test_tower_for_q_cache_and_prime_powers():
    t = tower_for_q(9)
    assert (t.p, t.e) == (3, 2)
    assert tower_for_q(9) is t
    with pytest.raises(NotPrime):
        tower_for_q(12)
