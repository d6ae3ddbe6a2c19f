"""Acceptance suite: every criterion at its stated tolerance, one line each.

Exact-mode criteria admit no tolerance at all (CycloValue equality); float
tolerances, where a criterion allows them, are pinned inline.  The two orbit
cases of criterion 9 are exploratory and report without gating.
"""

import time
import warnings

import pytest

from fqlab.charsum import AddChar, MultChar, gauss_sum, hasse_davenport_check
from fqlab.field import factorize, make_tower
from fqlab.induce import (NotRegularSemisimple, build_phi, conjugacy_classes,
                          induce_rss, mackey_check)
from fqlab.matrix import Fq, verify_structure_lemmas
from fqlab.torus import (all_torus_chars, bessel_function, det_twisted_weights,
                         gauss_product, mellin, standard_weights, sym2_weights)
from fqlab.verify import SUITE_CHECKS, VerifyConfig, verify_mirabolic, \
    verify_vanishing
from fqlab.weyl import (NotStable, all_perms, all_weight_lifts,
                        centrality_check, gamma_datum, twisted_sum)

warnings.filterwarnings("ignore", message=".*divides n!.*")


def _pq(q):
    (p, e), = factorize(q).items()
    return p, e


def _report(num, name, ok, extra=""):
    tag = "PASS" if ok else "FAIL"
    print(f"[{tag}] criterion {num}: {name}" + (f" ({extra})" if extra else ""))
    return ok


def _rho_set(n):
    return [("standard", standard_weights(n)), ("sym2", sym2_weights(n)),
            ("det-twisted", det_twisted_weights(n))]


def test_criterion_01_artin_schreier():
    ok = True
    for q in (2, 3, 4, 5, 7, 8, 9):
        tower = make_tower(*_pq(q), max_ext=1)
        psi = AddChar(tower, 1)
        total = tower.cyclo.zero()
        for x in tower.elements(1):
            total = total + psi.value(x)
        ok &= total.is_zero()
    assert _report(1, "Artin-Schreier shadow, q in {2,3,4,5,7,8,9}", ok)


def test_criterion_02_gauss_suite():
    ok = True
    for q in (2, 3, 4, 5, 7, 8, 9):
        tower = make_tower(*_pq(q), max_ext=1)
        psi = AddChar(tower, 1)
        for k in range(1, q - 1):
            ok &= gauss_sum(MultChar(tower, 1, k), psi).norm2() == q
    for q in (2, 3, 4, 5, 7):
        tower = make_tower(*_pq(q), max_ext=3)
        for k in range(q - 1):
            for d in (1, 2, 3):
                ok &= hasse_davenport_check(MultChar(tower, 1, k), d)
    assert _report(2, "|g(chi)|^2 = q (q <= 9) and Hasse-Davenport (d <= 3, "
                      "q <= 7), exact", ok)


def test_criterion_03_mellin_bessel_product():
    ok = True
    for n in (2, 3):
        for q in (3, 5):
            tower = make_tower(*_pq(q), max_ext=1)
            for name, rho in _rho_set(n):
                spec = mellin(bessel_function(tower, rho))
                for chi in all_torus_chars(tower, n):
                    ok &= spec.at(chi) == gauss_product(tower, rho, chi)
    assert _report(3, "mellin(bessel(rho)) = gauss_product(rho, .) exactly, "
                      "rho in {standard, Sym2, det-twisted}, n <= 3, q in {3,5}", ok)


def test_criterion_04_gamma_centrality():
    ok = True
    cells = 0
    for n in (2, 3):
        for q in (3, 5):
            tower = make_tower(*_pq(q), max_ext=n)
            for name, rho in _rho_set(n):
                rep = centrality_check(gamma_datum(tower, rho), "wchiprime")
                ok &= rep.passed
                cells += len(rep.records)
    assert _report(4, "gamma-data centrality in W'_chi mode, exact", ok,
                   f"{cells} cells")


def test_criterion_05_lift_independence():
    from fqlab.torus import WeightData
    rho = WeightData(((1, 0), (1, 0), (0, 1)))
    ok = True
    for q in (3, 5):
        tower = make_tower(*_pq(q), max_ext=2)
        for w in all_perms(2):
            try:
                lifts = all_weight_lifts(rho, w)
            except NotStable:
                continue
            ref = None
            for eta in lifts:
                fn = twisted_sum(tower, rho, w, eta)
                vals = [v * eta.sign for v in fn.values]
                if ref is None:
                    ref = vals
                else:
                    ok &= all(a == b for a, b in zip(ref, vals))
    assert _report(5, "lift independence for a repeated-row multiset, "
                      "n=2, q in {3,5}, pointwise exact", ok)


def test_criterion_06_structure_lemmas():
    ok = True
    details = []
    for n, q in [(2, 3), (2, 5), (3, 2), (3, 3)]:
        rep = verify_structure_lemmas(n, q)
        ok &= rep.passed
        ok &= rep.checks["det_lemma"]["slice_size"] == q ** (n - 1)
        if n == 2:
            ok &= rep.checks["gl2_key_iso"]["slice_size"] == q
        if n == 3:
            ok &= rep.checks["simply_transitive_m2"]["orbit_size"] == q ** 2
        details.append(f"({n},{q})")
    assert _report(6, "structure lemmas exhaustive", ok, " ".join(details))


def test_criterion_07_rss_consistency():
    ok = True
    checked = 0
    for n in (2, 3):
        for q in (2, 3, 4, 5):
            tower = make_tower(*_pq(q), max_ext=n)
            fq = Fq(tower)
            datum = gamma_datum(tower, standard_weights(n))
            datum._fq = fq
            phi = build_phi(datum)
            for cls in conjugacy_classes(fq, n):
                try:
                    v = induce_rss(datum, cls.rep, fq)
                except NotRegularSemisimple:
                    continue
                checked += 1
                ok &= phi.at(cls.rep) == v
    assert _report(7, "build_phi = induce_rss on every rss class, "
                      "n <= 3, q <= 5, exact", ok, f"{checked} classes")


def test_criterion_08_closed_form():
    ok = True
    for n, qs, sign in ((2, (2, 3, 5), 1), (3, (2, 3), -1)):
        for q in qs:
            tower = make_tower(*_pq(q), max_ext=n)
            fq = Fq(tower)
            datum = gamma_datum(tower, standard_weights(n))
            datum._fq = fq
            phi = build_phi(datum)
            psi = AddChar(tower, 1)
            for cls in conjugacy_classes(fq, n):
                tr = tower.zero
                for i in range(n):
                    tr = tower.add(tr, fq.elems[cls.rep.entry(i, i)])
                expected = psi.value(tr) * sign
                ok &= phi.at(cls.rep) == expected
    assert _report(8, "closed form: Phi = psi(tr) at n=2, -psi(tr) at n=3, "
                      "exact on all class representatives", ok)


def test_criterion_09_vanishing_borel():
    ok = True
    total = 0
    for n, q in [(2, 3), (2, 5), (2, 7), (3, 2), (3, 3)]:
        rep = verify_vanishing(VerifyConfig(n=n, q=q,
                                            weights=standard_weights(n)))
        ok &= rep.passed
        total += rep.cosets
    for q in (3, 5):
        rep = verify_vanishing(VerifyConfig(n=2, q=q, weights=sym2_weights(2)))
        ok &= rep.passed
        total += rep.cosets
    assert _report(9, "Borel-variant vanishing: standard at (2,3),(2,5),(2,7),"
                      "(3,2),(3,3); Sym2 at (2,3),(2,5); exact zeros", ok,
                   f"{total} cosets")
    # Exploratory orbit cases (non-gating, reported only).
    for seed, name in [((0, 0), "trivial orbit"), ((0, 1), "regular orbit")]:
        rep = verify_vanishing(VerifyConfig(n=2, q=5, orbit=seed))
        tag = "PASS" if rep.passed else "fail"
        print(f"[INFO] criterion 9 exploratory ({name} at (2,5)): {tag}, "
              f"{rep.cosets} cosets, max|S| = {rep.max_abs:.3g}")


def test_criterion_10_vanishing_mirabolic():
    ok = True
    total = 0
    for n, q in [(3, 2), (3, 3)]:
        rep = verify_mirabolic(VerifyConfig(n=n, q=q,
                                            weights=standard_weights(n)))
        ok &= rep.passed
        total += rep.cosets
    assert _report(10, "mirabolic-variant vanishing at (3,2),(3,3), "
                       "exact zeros", ok, f"{total} cosets")


def test_criterion_11_mackey():
    tower2 = make_tower(3, 1, 2)
    rep2 = mackey_check(gamma_datum(tower2, standard_weights(2)), (1, 1))
    tower3 = make_tower(2, 1, 3)
    rep3 = mackey_check(gamma_datum(tower3, standard_weights(3)), (2, 1))
    ok = rep2.passed and rep3.passed
    assert _report(11, "Mackey consistency: uniform constant over every Levi "
                       "point", ok,
                   f"GL2>(1,1)@q=3: c={rep2.constant}; "
                   f"GL3>(2,1)@q=2: c={rep3.constant}")


def test_criterion_12_negative_control():
    t0 = time.perf_counter()
    ok, details = SUITE_CHECKS["negative_control"][0]({"n": 2, "q": 3})
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    assert _report(12, "negative control: constant datum fails centrality and "
                       "a forced sweep finds a nonzero coset sum", ok,
                   f"{elapsed:.2f}s")
