"""Gauss and Kloosterman sums and the Hasse-Davenport identity."""

import pytest

from fqlab.charsum import (AddChar, MultChar, TrivialAddChar, gauss_sum,
                           hasse_davenport_check, kloosterman)
from fqlab.field import make_tower


def test_gauss_trivial_chi_is_minus_one():
    for q in (3, 5, 7):
        t = make_tower(q)
        assert gauss_sum(MultChar(t, 1, 0), AddChar(t, 1)) == -1


def test_gauss_quadratic_q3():
    # q=3, order-2 character: zeta_3 - zeta_3^2 (the generator of F_3^x is 2).
    t = make_tower(3)
    ctx = t.cyclo
    g = gauss_sum(MultChar(t, 1, 1), AddChar(t, 1))
    step = ctx.N // 3
    assert g == ctx.zeta(step) - ctx.zeta(2 * step)


def test_gauss_norm_squared_is_q():
    for q in (3, 5, 7):
        t = make_tower(q)
        psi = AddChar(t, 1)
        for k in range(1, q - 1):
            assert gauss_sum(MultChar(t, 1, k), psi).norm2() == q


def test_gauss_requires_nontrivial_psi():
    t = make_tower(3)
    with pytest.raises(TrivialAddChar):
        gauss_sum(MultChar(t, 1, 1), AddChar(t, 1, a=t.zero))


def test_gauss_multiplicativity_in_psi_scaling():
    # g(chi, psi_a) = chi(a)^{-1} g(chi, psi_1) for all a != 0.
    for q in (3, 5, 7):
        t = make_tower(q)
        psi1 = AddChar(t, 1)
        for k in range(q - 1):
            chi = MultChar(t, 1, k)
            base = gauss_sum(chi, psi1)
            for a in t.units(1):
                lhs = gauss_sum(chi, AddChar(t, 1, a=a))
                assert lhs == MultChar(t, 1, -k).value(a) * base


def test_kloosterman_degenerate_and_q3():
    t = make_tower(3)
    assert kloosterman(t, t.zero) == -1
    assert kloosterman(t, t.from_int(1)) == -1  # psi(2) + psi(1) = -1


def test_kloosterman_real_at_q5():
    t = make_tower(5)
    for a in t.elements(1):
        v = kloosterman(t, a)
        assert v == v.conjugate()


def test_hasse_davenport_d1_trivial():
    t = make_tower(3, 1, 2)
    assert hasse_davenport_check(MultChar(t, 1, 1), 1)


def test_hasse_davenport_q3_quadratic():
    t = make_tower(3, 1, 2)
    assert hasse_davenport_check(MultChar(t, 1, 1), 2)


def test_hasse_davenport_q5_d3_all_characters():
    t = make_tower(5, 1, 3)
    for k in range(4):
        assert hasse_davenport_check(MultChar(t, 1, k), 3)


def test_gauss_cache_hits():
    t = make_tower(5)
    psi = AddChar(t, 1)
    v1 = gauss_sum(MultChar(t, 1, 2), psi)
    v2 = gauss_sum(MultChar(t, 1, 2), psi)
    assert v1 is v2  # memoized per (level, k, a)


def test_kloosterman_equals_two_row_bessel():
    # kloosterman(t) = bessel_function(((1),(1)))(t) for all t, q <= 7.
    from fqlab.torus import WeightData, bessel_function
    for q in (3, 5, 7):
        t = make_tower(q)
        f = bessel_function(t, WeightData(((1,), (1,))))
        for j in range(q - 1):
            assert f.at((j,)) == kloosterman(t, t.element(1, j))
