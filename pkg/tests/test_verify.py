"""The vanishing verifier: domains, canonical cosets, reports, suite runner."""

import json
import warnings

import pytest

from fqlab.field import make_tower
from fqlab.matrix import Fq, MatrixGL, unipotent_upper
from fqlab.torus import standard_weights
from fqlab.verify import (BudgetExceeded, ConfigError, NotCentral,
                          VerifyConfig, VerifyReport, borel_side_nonzero,
                          run_suite, verify_mirabolic, verify_vanishing,
                          _canonical_borel, _coset_sum, _fact_table)
from fqlab.weyl import constant_datum, gamma_datum


def test_vanishing_gl2_q3():
    cfg = VerifyConfig(n=2, q=3, weights=standard_weights(2))
    rep = verify_vanishing(cfg)
    assert rep.passed
    # |G \ B| = 48 - 12 = 36 elements in 12 U-cosets of size q = 3.
    assert rep.cosets == 12
    assert rep.max_abs == 0.0
    assert all(r["exact_zero"] for r in rep.records)


def test_specific_coset_sum_is_psi_sweep():
    # x = [[0,1],[1,0]]: Phi = psi(tr) and tr(u x) sweeps F_3, so S(x) = 0.
    tower = make_tower(3, 1, 2)
    fq = Fq(tower)
    d = gamma_datum(tower, standard_weights(2))
    d._fq = fq
    from fqlab.induce import build_phi
    phi = build_phi(d)
    x = MatrixGL(fq, [0, 1, 1, 0])
    us = unipotent_upper(fq, 2)
    s = _coset_sum(phi, x, us, [u.entries for u in us], fq,
                   _fact_table(fq, 2), "exact")
    assert s.is_zero()
    traces = sorted(fq.add[(u * x).entry(0, 0) * 3 + (u * x).entry(1, 1)]
                    for u in us)
    assert traces == [0, 1, 2]


def test_coset_sum_is_coset_invariant():
    # S(u0 x) = S(x) for any u0 in U.
    tower = make_tower(3, 1, 2)
    fq = Fq(tower)
    d = gamma_datum(tower, standard_weights(2))
    d._fq = fq
    from fqlab.induce import build_phi
    phi = build_phi(d)
    us = unipotent_upper(fq, 2)
    fact = _fact_table(fq, 2)
    x = MatrixGL(fq, [1, 2, 1, 0])
    base = _coset_sum(phi, x, us, [u.entries for u in us], fq, fact, "exact")
    for u0 in us:
        s = _coset_sum(phi, u0 * x, us, [u.entries for u in us], fq, fact,
                       "exact")
        assert s == base
    # and u0 x canonicalizes to the same representative
    assert _canonical_borel(x) == _canonical_borel(us[1] * x)


def test_non_central_datum_refused():
    tower = make_tower(3, 1, 2)
    cfg = VerifyConfig(n=2, q=3, weights=standard_weights(2))
    # monkey-build: replace the datum with the constant one via orbit of...
    # simplest: drive _verify with a doctored config through force=False.
    from fqlab import verify as V

    datum = constant_datum(tower, 2)
    from fqlab.weyl import centrality_check
    assert not centrality_check(datum).passed
    # The public path: a gamma datum is central, so use the negative-control
    # suite check for the refusal + bypass behavior.
    ok, details = V.SUITE_CHECKS["negative_control"][0]({"n": 2, "q": 3})
    assert ok and details["nonzero_coset_found"]


def test_vanishing_orbit_data_q5():
    for seed in [(0, 0), (1, 0)]:
        rep = verify_vanishing(VerifyConfig(n=2, q=5, orbit=seed))
        assert rep.passed


def test_mirabolic_gl2_matches_borel_domain():
    # For n = 2, U_Q = U and Q = B-line stabilizer: mirabolic reps form a
    # subset of Borel reps (strata 2 excludes more), with vanishing sums.
    rep_m = verify_mirabolic(VerifyConfig(n=2, q=3, weights=standard_weights(2)))
    rep_b = verify_vanishing(VerifyConfig(n=2, q=3, weights=standard_weights(2)))
    assert rep_m.passed and rep_b.passed
    reps_m = {r["rep"] for r in rep_m.records}
    reps_b = {r["rep"] for r in rep_b.records}
    assert reps_m <= reps_b


def test_mirabolic_gl3_q2():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = verify_mirabolic(VerifyConfig(n=3, q=2, weights=standard_weights(3)))
    assert rep.passed
    # |G| - |Q| = 168 - 24 = 144 elements in 36 U_Q-cosets of size 4.
    assert rep.cosets == 36


def test_support_side_nonzero():
    tower = make_tower(3, 1, 2)
    d = gamma_datum(tower, standard_weights(2))
    assert borel_side_nonzero(d)


def test_budget_and_sampling():
    with pytest.raises(BudgetExceeded):
        verify_vanishing(VerifyConfig(n=3, q=7, weights=standard_weights(3),
                                      mode="float"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = verify_vanishing(VerifyConfig(n=2, q=3,
                                            weights=standard_weights(2),
                                            max_cosets=5, seed=3))
    assert rep.cosets == 5 and rep.passed


def test_float_mode_below_tolerance():
    cfg = VerifyConfig(n=2, q=3, weights=standard_weights(2), mode="float")
    rep = verify_vanishing(cfg)
    assert rep.passed
    assert rep.max_abs <= 1e-8 * 3 * 3  # |U| * max|Phi| scale


def test_report_json_and_csv(tmp_path):
    out = tmp_path / "report.json"
    cfg = VerifyConfig(n=2, q=3, weights=standard_weights(2), out=str(out))
    rep = verify_vanishing(cfg)
    payload = json.loads(out.read_text())
    for key in ("n", "q", "variant", "mode", "cosets", "max_abs", "failures",
                "elapsed_ms", "version", "records", "config"):
        assert key in payload
    assert payload["failures"] == 0
    csv_path = tmp_path / "report.csv"
    rep.write_csv(csv_path)
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "rep,abs,exact_zero"
    assert len(lines) == rep.cosets + 1
    # records sorted by representative fingerprint
    reps = [r["rep"] for r in rep.records]
    assert reps == sorted(reps)


def test_workers_match_serial():
    cfg1 = VerifyConfig(n=2, q=3, weights=standard_weights(2))
    cfg2 = VerifyConfig(n=2, q=3, weights=standard_weights(2), workers=2)
    r1 = verify_vanishing(cfg1)
    r2 = verify_vanishing(cfg2)
    assert [r["rep"] for r in r1.records] == [r["rep"] for r in r2.records]
    assert r1.failures == r2.failures == 0


def test_config_validation():
    with pytest.raises(ValueError):
        VerifyConfig(n=2, q=3).validate()
    with pytest.raises(ValueError):
        VerifyConfig(n=2, q=6, weights=standard_weights(2)).validate()
    with pytest.raises(ValueError):
        VerifyConfig(n=2, q=3, weights=standard_weights(2),
                     variant="nope").validate()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        VerifyConfig(n=2, q=2, weights=standard_weights(2)).validate()
    assert any("divides" in str(w.message) for w in caught)


def test_run_suite_default(tmp_path):
    summary = run_suite(out_dir=str(tmp_path))
    assert summary["failed"] == 0
    assert (tmp_path / "summary.json").exists()
    names = [c["name"] for c in summary["checks"]]
    assert "vanishing" in names and "negative_control" in names


def test_run_suite_unknown_check(tmp_path):
    cfg = tmp_path / "suite.json"
    cfg.write_text(json.dumps({"checks": [{"check": "nonsense"}]}))
    with pytest.raises(ConfigError):
        run_suite(str(cfg))
