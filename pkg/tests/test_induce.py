"""Induction to GL_n: flag formula, rss route, DL expansion, Mackey."""

import random
import warnings
from fractions import Fraction

import pytest

from fqlab.charsum import AddChar
from fqlab.field import make_tower
from fqlab.induce import (GREEN_POLYNOMIALS, ConjClass, NotRegularSemisimple,
                          RankUnsupported, TORUS_TYPE_CONSTANTS, build_phi,
                          conjugacy_classes, deligne_shadow_check,
                          dl_character, fingerprint, gl_order, green_value,
                          induce_full, induce_rss, mackey_check,
                          rep_from_fingerprint, twisted_spectrum_coefficients,
                          validate_green_table)
from fqlab.matrix import Fq, MatrixGL, all_gl
from fqlab.torus import (constant_function, delta_function, standard_weights,
                         sym2_weights)
from fqlab.weyl import (Perm, all_perms, gamma_datum, sign_delta_datum,
                        TwistedTorus)


def _trace(tower, fq, g):
    tr = tower.zero
    for i in range(g.n):
        tr = tower.add(tr, fq.elems[g.entry(i, i)])
    return tr


def test_class_sizes_sum_to_group_order():
    for n, q in [(2, 2), (2, 3), (2, 5), (3, 2), (3, 3)]:
        tower = make_tower(*_pq(q), max_ext=n)
        fq = Fq(tower)
        classes = conjugacy_classes(fq, n)
        assert sum(c.size for c in classes) == gl_order(n, q)
        # fingerprints of representatives reproduce themselves
        for c in classes:
            assert fingerprint(fq, c.rep) == c.fingerprint
            assert fingerprint(fq, rep_from_fingerprint(fq, c.fingerprint)) \
                == c.fingerprint


def _pq(q):
    from fqlab.field import factorize
    (p, e), = factorize(q).items()
    return p, e


def test_fingerprint_constant_on_conjugates():
    tower = make_tower(3, 1, 2)
    fq = Fq(tower)
    rng = random.Random(1)
    gl = list(all_gl(fq, 2))
    for _ in range(30):
        g, h = rng.choice(gl), rng.choice(gl)
        assert fingerprint(fq, g) == fingerprint(fq, g.conjugate_by(h))


def test_green_table_values():
    # Q_{T_w}(regular unipotent) = 1; values at 1 = +-|G|_{p'} / |T_w|.
    assert green_value(2, (1, 1), (1, 1), 3) == 4
    assert green_value(2, (2,), (1, 1), 3) == -2
    assert green_value(3, (1, 1, 1), (1, 1, 1), 2) == 21
    assert green_value(3, (2, 1), (1, 1, 1), 2) == -7
    assert green_value(3, (3,), (1, 1, 1), 2) == 3
    for key, _ in GREEN_POLYNOMIALS.items():
        m, sigma, lam = key
        if lam == (m,):
            assert green_value(m, sigma, lam, 5) == 1


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_green_orthogonality(n, q):
    assert validate_green_table(n, q)


def test_induce_full_examples():
    tower = make_tower(3, 1, 2)
    fq = Fq(tower)
    # delta at identity: value at 1 is the number of flags, q + 1 = 4.
    cf = induce_full(fq, delta_function(tower, 2))
    assert cf.at(MatrixGL.identity(fq, 2)) == 4
    # constant 1: value is |fixed flags|.
    cf1 = induce_full(fq, constant_function(tower, 2))
    from fqlab.matrix import fixed_flags
    for cls in conjugacy_classes(fq, 2):
        assert cf1.at(cls.rep) == len(fixed_flags(cls.rep))
    # regular split: sum of f over eigenvalue orderings.
    f = delta_function(tower, 2, (0, 1))
    cf2 = induce_full(fq, f)
    g = MatrixGL.diagonal(fq, (fq.from_dlog(0), fq.from_dlog(1)))
    assert cf2.at(g) == 1


def test_induce_rss_gl2():
    tower = make_tower(3, 1, 2)
    fq = Fq(tower)
    d = gamma_datum(tower, standard_weights(2))
    psi = AddChar(tower, 1)
    # split rss diag(s, t): value = psi(s + t).
    g = MatrixGL.diagonal(fq, (1, 2))
    assert induce_rss(d, g, fq) == psi.value(_trace(tower, fq, g))
    # nonsplit rss (charpoly t^2 + 1, irreducible over F_3): value = psi(tr g).
    gns = MatrixGL(fq, [0, 1, 2, 0])
    assert induce_rss(d, gns, fq) == psi.value(_trace(tower, fq, gns))
    # sign-delta datum vanishes at rss (no identity-eigenvalue tuple).
    sd = sign_delta_datum(tower, 2)
    assert induce_rss(sd, g, fq).is_zero()


def test_induce_rss_rejects_non_squarefree():
    tower = make_tower(3, 1, 2)
    fq = Fq(tower)
    d = gamma_datum(tower, standard_weights(2))
    with pytest.raises(NotRegularSemisimple):
        induce_rss(d, MatrixGL.identity(fq, 2), fq)


def test_dl_character_examples():
    tower = make_tower(3, 1, 2)
    fq = Fq(tower)
    e = Perm.identity(2)
    R = dl_character(tower, fq, e, (0, 0))
    assert R.at(MatrixGL.identity(fq, 2)) == 4  # q + 1
    # Constancy on conjugacy classes.
    rng = random.Random(6)
    gl = list(all_gl(fq, 2))
    Rc = dl_character(tower, fq, Perm.from_cycles(2, (0, 1)), (1,))
    for _ in range(10):
        g, h = rng.choice(gl), rng.choice(gl)
        assert Rc.at(g) == Rc.at(g.conjugate_by(h))
    # Split rss: sum over Weyl conjugates of mu.
    tt = TwistedTorus(tower, e)
    mu = (1, 0)
    Rs = dl_character(tower, fq, e, mu)
    g = MatrixGL.diagonal(fq, (fq.from_dlog(0), fq.from_dlog(1)))
    expected = tt.char_value(mu, (0, 1)) + tt.char_value(mu, (1, 0))
    assert Rs.at(g) == expected


def test_dl_character_rank_cap():
    tower = make_tower(2, 1, 1)
    fq = Fq(tower)
    with pytest.raises(RankUnsupported):
        dl_character(tower, fq, Perm.identity(4), (0, 0, 0, 0))


def test_build_phi_equals_spectral_route():
    # The collapsed evaluation agrees with sum_mu coeff(mu) R_{T_w,mu}.
    for n, q in [(2, 3), (3, 2)]:
        tower = make_tower(*_pq(q), max_ext=n)
        fq = Fq(tower)
        d = gamma_datum(tower, standard_weights(n))
        d._fq = fq
        phi = build_phi(d)
        from fqlab.induce import _levi_classes
        from math import factorial
        for cls in conjugacy_classes(fq, n):
            total = tower.cyclo.zero()
            for w, size in _levi_classes((n,)):
                coeffs = twisted_spectrum_coefficients(d, w)
                for mu, c in coeffs.items():
                    if not c:
                        continue
                    R = dl_character(tower, fq, w, mu)
                    total = total + R.at(cls.rep) * c * Fraction(size, factorial(n))
            assert total == phi.at(cls.rep)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_closed_form_gl2(q):
    tower = make_tower(*_pq(q), max_ext=2)
    fq = Fq(tower)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = gamma_datum(tower, standard_weights(2))
    d._fq = fq
    phi = build_phi(d)
    psi = AddChar(tower, 1)
    for cls in conjugacy_classes(fq, 2):
        assert phi.at(cls.rep) == psi.value(_trace(tower, fq, cls.rep))


@pytest.mark.parametrize("q", [2, 3])
def test_closed_form_gl3(q):
    tower = make_tower(*_pq(q), max_ext=3)
    fq = Fq(tower)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = gamma_datum(tower, standard_weights(3))
    d._fq = fq
    phi = build_phi(d)
    psi = AddChar(tower, 1)
    for cls in conjugacy_classes(fq, 3):
        assert phi.at(cls.rep) == -psi.value(_trace(tower, fq, cls.rep))


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (2, 4), (2, 5),
                                 (3, 2), (3, 3), (3, 4), (3, 5)])
def test_rss_consistency(n, q):
    tower = make_tower(*_pq(q), max_ext=n)
    fq = Fq(tower)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = gamma_datum(tower, standard_weights(n))
    d._fq = fq
    phi = build_phi(d)
    checked = 0
    for cls in conjugacy_classes(fq, n):
        try:
            v = induce_rss(d, cls.rep, fq)
        except NotRegularSemisimple:
            continue
        checked += 1
        assert phi.at(cls.rep) == v, cls.fingerprint
    assert checked > 0


def test_rss_consistency_sign_delta():
    tower = make_tower(3, 1, 2)
    fq = Fq(tower)
    d = sign_delta_datum(tower, 2)
    d._fq = fq
    phi = build_phi(d)
    for cls in conjugacy_classes(fq, 2):
        try:
            v = induce_rss(d, cls.rep, fq)
        except NotRegularSemisimple:
            continue
        assert phi.at(cls.rep) == v


def test_phi_conjugation_invariance():
    tower = make_tower(3, 1, 2)
    fq = Fq(tower)
    d = gamma_datum(tower, standard_weights(2))
    d._fq = fq
    phi = build_phi(d)
    rng = random.Random(8)
    gl = list(all_gl(fq, 2))
    for _ in range(20):
        g, h = rng.choice(gl), rng.choice(gl)
        assert phi.at(g) == phi.at(g.conjugate_by(h))


def test_torus_type_constants_regeneration():
    # Re-solve the per-type normalization constants from rss agreement at
    # (2, 3) and confirm the frozen values.
    tower = make_tower(3, 1, 2)
    fq = Fq(tower)
    d = gamma_datum(tower, standard_weights(2))
    d._fq = fq
    from fqlab.induce import _levi_classes, _torus_type_data, _green_factor
    from fqlab.induce import _fingerprint_charpoly
    # For each type, collect equations sum_t f_w(t) * green = contribution.
    # With two types and rss classes split/nonsplit, the system decouples:
    # split rss touches only w = e, nonsplit only w = (1 2).
    import math
    for cls in conjugacy_classes(fq, 2):
        try:
            target = induce_rss(d, cls.rep, fq)
        except NotRegularSemisimple:
            continue
        for w, size in _levi_classes((2,)):
            tt, data = _torus_type_data(tower, fq, w, [0, 0])
            contrib = tower.cyclo.zero()
            fp = cls.fingerprint
            want = _fingerprint_charpoly(fq, fp)
            for point, blocks in data:
                poly, asgn = blocks[0]
                if poly != want:
                    continue
                gf = _green_factor(fp, asgn, tower.q)
                contrib = contrib + d.functions[w].at(point) * gf
            contrib = contrib * Fraction(size, 2)
            if not contrib.is_zero():
                # solve c_w * contrib = target restricted to this type
                assert contrib * TORUS_TYPE_CONSTANTS[w.cycle_type()] == target
    assert all(c == 1 for c in TORUS_TYPE_CONSTANTS.values())


def test_mackey_gl2_split_levi():
    tower = make_tower(3, 1, 2)
    d = gamma_datum(tower, standard_weights(2))
    rep = mackey_check(d, (1, 1))
    assert rep.passed
    assert rep.constant == 3  # q^{dim U_P}, frozen as a regression


def test_mackey_gl3_two_one():
    tower = make_tower(2, 1, 3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = gamma_datum(tower, standard_weights(3))
    rep = mackey_check(d, (2, 1))
    assert rep.passed
    assert rep.constant == 4  # q^{dim U_P} = 2^2


def test_mackey_levi_1_1_reduces_to_torus():
    # For L = T the right side is f_e itself (up to the same constant).
    tower = make_tower(3, 1, 2)
    d = gamma_datum(tower, standard_weights(2))
    rep = mackey_check(d, (1, 1))
    assert rep.passed and rep.points == (tower.q - 1) ** 2


@pytest.mark.parametrize("q", [3, 5])
def test_deligne_shadow(q):
    tower = make_tower(*_pq(q), max_ext=2)
    d = gamma_datum(tower, standard_weights(2))
    assert deligne_shadow_check(d)
    # Sym^2 weights give another central datum; the identity must hold too.
    d2 = gamma_datum(tower, sym2_weights(2))
    assert deligne_shadow_check(d2)
