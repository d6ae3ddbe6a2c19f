"""The coset-sum vanishing verifier and the check-suite runner.

For a central datum with invariant-summand class function Phi, the verifier
enumerates representatives x of left U(F_q)-cosets outside the Borel (or
U_Q-cosets outside the line stabilizer Q, "mirabolic" variant) and checks

    S(x) = sum over u of Phi(u x) = 0      (exactly, or |S| <= tol in float).

Centrality of the datum is a hard precondition; failures of S(x) = 0 are data
and land in the report.  The report language is deliberately "consistent
with": the sums are the Lefschetz shadows of the cohomological statement, not
equivalents.
"""

from __future__ import annotations

import json
import random
import time
import warnings
from dataclasses import dataclass, field as dc_field
from itertools import product
from math import factorial

from fqlab import __version__, _backend
from fqlab.field import FieldTower, factorize, make_tower
from fqlab.matrix import (Fq, MatrixGL, _Span, charpoly_to_monic, factor_monic,
                          mirabolic_radical, strata_index, unipotent_upper)
from fqlab.induce import build_phi, conjugacy_classes, fingerprint
from fqlab.torus import WeightData
from fqlab.weyl import centrality_check, gamma_datum, orbit_datum


class NotCentral(RuntimeError):
    """The datum failed the centrality precondition."""


class BudgetExceeded(RuntimeError):
    """Full coset enumeration would exceed the configured budget."""


ENUMERATION_BUDGET = 2_100_000  # matrices scanned during full enumeration


@dataclass
class VerifyConfig:
    n: int
    q: int
    weights: WeightData | None = None
    orbit: tuple[int, ...] | None = None
    variant: str = "borel"          # borel | mirabolic
    mode: str = "exact"             # exact | float
    max_cosets: int | None = None   # sampling policy; None = full enumeration
    seed: int = 0
    out: str | None = None
    force: bool = False             # bypass the centrality precondition
    workers: int = 1

    def validate(self):
        if self.variant not in ("borel", "mirabolic"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.mode not in ("exact", "float"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if (self.weights is None) == (self.orbit is None):
            raise ValueError("exactly one of weights/orbit must be given")
        if self.mode == "exact" and self.n > 3:
            raise ValueError("exact mode supports n <= 3")
        fac = factorize(self.q)
        if len(fac) != 1:
            raise ValueError(f"q = {self.q} is not a prime power")
        (p, _), = fac.items()
        if factorial(self.n) % p == 0:
            warnings.warn(
                f"p = {p} divides n! = {factorial(self.n)}; the trace-level "
                "sums remain well-defined, proceeding", stacklevel=2)
        if self.weights is not None and self.weights.n != self.n:
            raise ValueError("weight rows must have length n")


@dataclass
class VerifyReport:
    n: int
    q: int
    variant: str
    mode: str
    cosets: int
    records: list = dc_field(default_factory=list)
    max_abs: float = 0.0
    failures: int = 0
    nonzero_exact: int = 0
    elapsed_ms: int = 0
    config: dict = dc_field(default_factory=dict)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {
            "n": self.n, "q": self.q, "variant": self.variant,
            "mode": self.mode, "cosets": self.cosets,
            "max_abs": self.max_abs, "failures": self.failures,
            "elapsed_ms": self.elapsed_ms, "version": self.version,
            "config": self.config, "records": self.records,
        }

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)

    def write_csv(self, path):
        import csv
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["rep", "abs", "exact_zero"])
            for rec in self.records:
                writer.writerow([rec["rep"], rec["abs"], rec["exact_zero"]])

    def summary(self) -> str:
        status = "PASS" if self.passed else f"FAIL ({self.failures} cosets)"
        return (f"vanishing[{self.variant}/{self.mode}] n={self.n} q={self.q}: "
                f"{self.cosets} cosets, max|S| = {self.max_abs:.3g}, {status}")


def _build_datum(cfg: VerifyConfig, tower: FieldTower):
    if cfg.weights is not None:
        return gamma_datum(tower, cfg.weights, cfg.mode)
    from fqlab.weyl import all_perms
    theta = {w.act_tuple(cfg.orbit) for w in all_perms(cfg.n)}
    return orbit_datum(tower, theta, cfg.mode)


def _canonical_borel(g: MatrixGL) -> tuple:
    """Canonical representative of Ux under left multiplication by upper
    unitriangular matrices: each row reduced against the span of lower rows."""
    fq = g.fq
    rows = [tuple(r) for r in g.rows()]
    n = len(rows)
    for i in range(n - 2, -1, -1):
        span = _Span(fq)
        for j in range(i + 1, n):
            span.append(rows[j])
        rows[i] = span.residue(rows[i])
    return tuple(v for row in rows for v in row)


def _canonical_mirabolic(g: MatrixGL) -> tuple:
    """Canonical representative of U_Q x: first row reduced against the rest."""
    fq = g.fq
    rows = [tuple(r) for r in g.rows()]
    span = _Span(fq)
    for j in range(1, len(rows)):
        span.append(rows[j])
    rows[0] = span.residue(rows[0])
    return tuple(v for row in rows for v in row)


def _coset_reps(cfg: VerifyConfig, fq: Fq) -> list[tuple]:
    n, q = cfg.n, cfg.q
    in_domain = ((lambda g: not g.is_upper_triangular())
                 if cfg.variant == "borel" else
                 (lambda g: strata_index(g) >= 2))
    canon = _canonical_borel if cfg.variant == "borel" else _canonical_mirabolic
    if cfg.max_cosets is None:
        if q ** (n * n) > ENUMERATION_BUDGET:
            raise BudgetExceeded(
                f"full enumeration needs {q ** (n * n)} matrices; set "
                "max_cosets to sample instead")
        reps = set()
        for ent in product(range(q), repeat=n * n):
            g = MatrixGL(fq, ent)
            if g.char_poly_tuple()[-1] == 0 or not in_domain(g):
                continue
            reps.add(canon(g))
        return sorted(reps)
    rng = random.Random(cfg.seed)
    reps = set()
    attempts = 0
    while len(reps) < cfg.max_cosets and attempts < 200 * cfg.max_cosets:
        attempts += 1
        g = MatrixGL(fq, [rng.randrange(q) for _ in range(n * n)])
        if g.char_poly_tuple()[-1] == 0 or not in_domain(g):
            continue
        reps.add(canon(g))
    return sorted(reps)


def _coset_sum(phi, x: MatrixGL, us: list[MatrixGL], us_entries, fq: Fq,
               fact_table, mode: str):
    """S(x) = sum over u of Phi(u x), through the fingerprint memo."""
    codes = _backend.charpolys_of_products(
        x.entries, us_entries, x.n, fq.q, fq.mul, fq.add, fq.neg)
    acc = None
    for code, u in zip(codes, us):
        fac = fact_table[code]
        if all(m == 1 for _, m in fac):
            key = (tuple((f, (1,)) for f, _ in fac),)
        else:
            key = (fingerprint(fq, u * x),)
        val = phi._memo.get(key)
        if val is None:
            val = phi._eval(key)
            phi._memo[key] = val
        acc = val if acc is None else acc + val
    return acc


def _fact_table(fq: Fq, n: int) -> dict[int, tuple]:
    """Factorization of every invertible monic charpoly, keyed by packed code."""
    out = {}
    q = fq.q
    for cp in product(range(q), repeat=n):
        if cp[-1] == 0:
            continue
        code = sum(a * q ** i for i, a in enumerate(cp))
        out[code] = factor_monic(fq, charpoly_to_monic(cp))
    return out


def _verify(cfg: VerifyConfig) -> VerifyReport:
    cfg.validate()
    t0 = time.perf_counter()
    tower = make_tower(*_pq(cfg.q), max_ext=cfg.n)
    datum = _build_datum(cfg, tower)
    central = centrality_check(datum, "wchi")
    if not central.passed and not cfg.force:
        raise NotCentral(
            f"datum fails centrality at {len(central.failures)} cells; "
            "the vanishing statement does not apply")
    fq = Fq(tower)
    datum._fq = fq
    phi = build_phi(datum)
    # Warm the memo on all classes; also yields max|Phi| for the tolerance.
    max_phi = 0.0
    for cls in conjugacy_classes(fq, cfg.n):
        max_phi = max(max_phi, abs(complex(phi.at(cls.rep)))
                      if cfg.mode == "exact" else abs(phi.at(cls.rep)))
    if cfg.variant == "borel":
        us = unipotent_upper(fq, cfg.n)
    else:
        us = mirabolic_radical(fq, cfg.n)
    us_entries = [u.entries for u in us]
    tol = 1e-8 * len(us) * max(max_phi, 1.0)
    fact_table = _fact_table(fq, cfg.n)
    reps = _coset_reps(cfg, fq)

    if cfg.workers > 1:
        sums = _parallel_sums(cfg, reps)
    else:
        sums = [(_coset_sum(phi, MatrixGL(fq, rep), us, us_entries, fq,
                            fact_table, cfg.mode)) for rep in reps]

    report = VerifyReport(n=cfg.n, q=cfg.q, variant=cfg.variant, mode=cfg.mode,
                          cosets=len(reps), config=_config_echo(cfg))
    for rep, s in zip(reps, sums):
        if cfg.mode == "exact":
            zero = s.is_zero()
            sabs = 0.0 if zero else abs(complex(s))
        else:
            sabs = abs(s)
            zero = sabs <= tol
        if not zero:
            report.failures += 1
        if cfg.mode == "exact" and not zero:
            report.nonzero_exact += 1
        report.max_abs = max(report.max_abs, sabs)
        report.records.append({
            "rep": ",".join(str(v) for v in rep),
            "abs": sabs,
            "exact_zero": bool(zero) if cfg.mode == "exact" else None,
        })
    report.elapsed_ms = int(1000 * (time.perf_counter() - t0))
    if cfg.out:
        report.write_json(cfg.out)
    return report


def verify_vanishing(cfg: VerifyConfig) -> VerifyReport:
    """Borel variant: U-cosets outside B."""
    cfg.variant = "borel"
    return _verify(cfg)


def verify_mirabolic(cfg: VerifyConfig) -> VerifyReport:
    """Mirabolic variant: U_Q-cosets outside the line stabilizer Q = X_1."""
    cfg.variant = "mirabolic"
    return _verify(cfg)


def _pq(q: int) -> tuple[int, int]:
    (p, e), = factorize(q).items()
    return p, e


def _config_echo(cfg: VerifyConfig) -> dict:
    return {
        "n": cfg.n, "q": cfg.q,
        "weights": [list(r) for r in cfg.weights.rows] if cfg.weights else None,
        "orbit": list(cfg.orbit) if cfg.orbit else None,
        "variant": cfg.variant, "mode": cfg.mode,
        "max_cosets": cfg.max_cosets, "seed": cfg.seed,
        "workers": cfg.workers, "force": cfg.force,
    }


# -- optional worker pool ------------------------------------------------------

_POOL_STATE: dict = {}


def _pool_init(cfg_dict):
    cfg = VerifyConfig(**cfg_dict)
    cfg.weights = (WeightData(tuple(tuple(r) for r in cfg.weights))
                   if cfg.weights else None)
    cfg.orbit = tuple(cfg.orbit) if cfg.orbit else None
    tower = make_tower(*_pq(cfg.q), max_ext=cfg.n)
    datum = _build_datum(cfg, tower)
    fq = Fq(tower)
    datum._fq = fq
    phi = build_phi(datum)
    us = (unipotent_upper(fq, cfg.n) if cfg.variant == "borel"
          else mirabolic_radical(fq, cfg.n))
    _POOL_STATE.update(phi=phi, fq=fq, us=us,
                       us_entries=[u.entries for u in us],
                       fact=_fact_table(fq, cfg.n), mode=cfg.mode)


def _pool_sum(rep):
    st = _POOL_STATE
    val = _coset_sum(st["phi"], MatrixGL(st["fq"], rep), st["us"],
                     st["us_entries"], st["fq"], st["fact"], st["mode"])
    if st["mode"] == "exact":
        return (rep, val.is_zero(), 0.0 if val.is_zero() else abs(complex(val)))
    return (rep, None, abs(val))


def _parallel_sums(cfg: VerifyConfig, reps):
    import multiprocessing as mp

    echo = _config_echo(cfg)
    with mp.Pool(cfg.workers, initializer=_pool_init, initargs=(echo,)) as pool:
        results = pool.map(_pool_sum, reps, chunksize=max(1, len(reps) // (4 * cfg.workers)))
    by_rep = {r: (z, a) for r, z, a in results}
    out = []
    for rep in reps:
        zero, sabs = by_rep[rep]
        out.append(_WorkerSum(zero, sabs))
    return out


class _WorkerSum:
    """Stand-in for the coset sum when computed in a worker process."""

    def __init__(self, zero, sabs):
        self._zero = zero
        self._abs = sabs

    def is_zero(self):
        return self._zero

    def __complex__(self):
        return complex(self._abs)

    def __abs__(self):
        return self._abs


def borel_side_nonzero(datum, phi=None) -> bool:
    """Sanity: the support statement.  Coset sums over U *at torus elements*
    need not vanish; the standard datum must show at least one nonzero."""
    tower = datum.tower
    fq = getattr(datum, "_fq", None) or Fq(tower)
    datum._fq = fq
    phi = phi or build_phi(datum)
    us = unipotent_upper(fq, datum.n)
    for diag in product(range(1, fq.q), repeat=datum.n):
        t = MatrixGL.diagonal(fq, diag)
        acc = None
        for u in us:
            v = phi.at(u * t)
            acc = v if acc is None else acc + v
        nonzero = (not acc.is_zero()) if datum.mode == "exact" else abs(acc) > 1e-8
        if nonzero:
            return True
    return False


# -- suite runner ----------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    gating: bool
    elapsed_ms: int
    details: dict


class ConfigError(ValueError):
    """Unknown check name or malformed suite configuration."""


def _check_artin_schreier(params):
    from fqlab.charsum import AddChar
    qs = params.get("qs", [2, 3, 4, 5, 7, 8, 9])
    ok = True
    for q in qs:
        tower = make_tower(*_pq(q), max_ext=1)
        psi = AddChar(tower, 1)
        total = tower.cyclo.zero()
        for x in tower.elements(1):
            total = total + psi.value(x)
        ok = ok and total.is_zero()
    return ok, {"qs": qs}


def _check_gauss(params):
    from fqlab.charsum import AddChar, MultChar, gauss_sum, hasse_davenport_check
    ok = True
    for q in params.get("qs", [2, 3, 4, 5, 7, 8, 9]):
        tower = make_tower(*_pq(q), max_ext=1)
        psi = AddChar(tower, 1)
        for k in range(1, q - 1):
            ok = ok and gauss_sum(MultChar(tower, 1, k), psi).norm2() == q
    for q in params.get("hd_qs", [2, 3, 4, 5, 7]):
        tower = make_tower(*_pq(q), max_ext=3)
        for k in range(q - 1):
            for d in (2, 3):
                ok = ok and hasse_davenport_check(MultChar(tower, 1, k), d)
    return ok, {}


def _check_mellin_bessel(params):
    from fqlab.torus import (all_torus_chars, bessel_function, gauss_product,
                             mellin)
    n, q = params["n"], params["q"]
    rho = _rho_from_params(params, n)
    tower = make_tower(*_pq(q), max_ext=n)
    f = bessel_function(tower, rho)
    spec = mellin(f)
    ok = all(spec.at(chi) == gauss_product(tower, rho, chi)
             for chi in all_torus_chars(tower, n))
    return ok, {"rho": [list(r) for r in rho.rows]}


def _check_centrality(params):
    n, q = params["n"], params["q"]
    rho = _rho_from_params(params, n)
    tower = make_tower(*_pq(q), max_ext=n)
    rep = centrality_check(gamma_datum(tower, rho),
                           params.get("mode", "wchiprime"))
    return rep.passed, {"cells": len(rep.records)}


def _check_lemmas(params):
    from fqlab.matrix import verify_structure_lemmas
    rep = verify_structure_lemmas(params["n"], params["q"],
                                  exhaustive=params.get("exhaustive", True),
                                  samples=params.get("samples", 200),
                                  seed=params.get("seed", 0))
    return rep.passed, {"checks": {k: v["ok"] for k, v in rep.checks.items()}}


def _check_vanishing(params):
    n = params["n"]
    orbit = tuple(params["orbit"]) if "orbit" in params else None
    weights = None if orbit else _rho_from_params(params, n)
    cfg = VerifyConfig(
        n=n, q=params["q"], weights=weights, orbit=orbit,
        variant=params.get("variant", "borel"),
        mode=params.get("mode", "exact"),
        max_cosets=params.get("max_cosets"),
        force=params.get("force", False))
    rep = _verify(cfg)
    return rep.passed, {"cosets": rep.cosets, "max_abs": rep.max_abs,
                        "failures": rep.failures}


def _check_mackey(params):
    from fqlab.induce import mackey_check
    n = sum(params["comp"])
    tower = make_tower(*_pq(params["q"]), max_ext=n)
    rho = _rho_from_params(params, n)
    rep = mackey_check(gamma_datum(tower, rho), tuple(params["comp"]))
    return rep.passed, {"constant": str(rep.constant)}


def _check_negative_control(params):
    from fqlab.weyl import constant_datum
    n, q = params.get("n", 2), params.get("q", 3)
    tower = make_tower(*_pq(q), max_ext=n)
    datum = constant_datum(tower, n)
    central = centrality_check(datum, "wchi")
    if central.passed:
        return False, {"reason": "constant datum unexpectedly central"}
    # Bypass the precondition: sweep with the non-central datum directly.
    fq = Fq(tower)
    datum._fq = fq
    phi = build_phi(datum)
    us = unipotent_upper(fq, n)
    us_entries = [u.entries for u in us]
    fact = _fact_table(fq, n)
    found = False
    for ent in product(range(q), repeat=n * n):
        g = MatrixGL(fq, ent)
        if g.char_poly_tuple()[-1] == 0 or g.is_upper_triangular():
            continue
        s = _coset_sum(phi, g, us, us_entries, fq, fact, "exact")
        if not s.is_zero():
            found = True
            break
    return found, {"centrality_failed": True, "nonzero_coset_found": found}


def standard_like(n: int) -> WeightData:
    from fqlab.torus import standard_weights
    return standard_weights(n)


def _rho_from_params(params, n: int) -> WeightData:
    from fqlab.torus import (det_twisted_weights, standard_weights,
                             sym2_weights)
    rho = params.get("rho", params.get("weights", "standard"))
    if isinstance(rho, str):
        return {"standard": standard_weights,
                "sym2": sym2_weights,
                "det_twisted": det_twisted_weights}[rho](n)
    return WeightData(tuple(tuple(r) for r in rho))


SUITE_CHECKS = {
    "artin_schreier": (_check_artin_schreier, True),
    "gauss": (_check_gauss, True),
    "mellin_bessel": (_check_mellin_bessel, True),
    "centrality": (_check_centrality, True),
    "lemmas": (_check_lemmas, True),
    "vanishing": (_check_vanishing, True),
    "mackey": (_check_mackey, True),
    "negative_control": (_check_negative_control, True),
}

DEFAULT_SUITE = [
    {"check": "artin_schreier", "qs": [2, 3, 4, 5, 7, 8, 9]},
    {"check": "gauss", "qs": [3, 5, 7], "hd_qs": [3, 5]},
    {"check": "mellin_bessel", "n": 2, "q": 3, "rho": "standard"},
    {"check": "centrality", "n": 2, "q": 3, "rho": "standard"},
    {"check": "lemmas", "n": 2, "q": 3},
    {"check": "vanishing", "n": 2, "q": 3, "rho": "standard"},
    {"check": "mackey", "comp": [1, 1], "q": 3, "rho": "standard"},
    {"check": "negative_control", "n": 2, "q": 3},
]


def run_suite(config_path=None, out_dir=None, fast=False) -> dict:
    """Run the named checks from a JSON config (or the default suite).

    Emits one JSON per check plus a summary; the returned dict carries
    "failed" = number of gating failures.
    """
    import os

    if config_path:
        with open(config_path) as fh:
            spec = json.load(fh)
        checks = spec["checks"]
    else:
        checks = DEFAULT_SUITE
    results = []
    for item in checks:
        item = dict(item)
        name = item.pop("check", None)
        if name not in SUITE_CHECKS:
            raise ConfigError(f"unknown check name {name!r}")
        fn, gating = SUITE_CHECKS[name]
        gating = item.pop("gating", gating)
        if fast and name == "vanishing":
            item.setdefault("mode", "float")
        t0 = time.perf_counter()
        passed, details = fn(item)
        elapsed = int(1000 * (time.perf_counter() - t0))
        results.append(CheckResult(name=name, passed=passed, gating=gating,
                                   elapsed_ms=elapsed, details=details))
    summary = {
        "version": __version__,
        "checks": [{"name": r.name, "passed": r.passed, "gating": r.gating,
                    "elapsed_ms": r.elapsed_ms, "details": r.details}
                   for r in results],
        "failed": sum(1 for r in results if r.gating and not r.passed),
    }
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        for i, r in enumerate(results):
            with open(os.path.join(out_dir, f"check_{i:02d}_{r.name}.json"),
                      "w") as fh:
                json.dump(summary["checks"][i], fh, indent=1, sort_keys=True)
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            json.dump(summary, fh, indent=1, sort_keys=True)
    return summary
