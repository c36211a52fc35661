"""Acceptance criteria 1-7, each with its own time limit.

Every criterion records one PASS/FAIL line, printed in the terminal summary.
"""
import time

import pytest

from conftest import ACCEPTANCE
from strongmin import fixtures
from strongmin.amalgam import alpha_demand, build_generic
from strongmin.core import Flavor, Structure, automorphisms
from strongmin.decomp import tree_decompose
from strongmin.definability import classify_dclstar, orbit_report, quasigroup_experiment
from strongmin.errors import LineTooShort
from strongmin.pairs import MuFunction, in_Lmu, triples_in
from strongmin.predim import delta
from strongmin.properties import run_suite


def record(n, ok, detail, secs, limit=None):
    lim = f" (limit {limit:g} s)" if limit else ""
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}  [{secs:.2f} s{lim}]"
    ACCEPTANCE.append(line)
    print(line)


def test_criterion_1_examp1():
    t = time.perf_counter()
    f = fixtures.get("examp1")
    s, I = f.structure, ["a1", "a2"]
    d = delta(s, s.points)
    td = tree_decompose(s, I, "pointwise")
    lvl1 = sorted((sorted(p.points), sorted(p.base)) for p in td.petals if p.stratum == 1)
    lvl2 = sorted((sorted(p.points), sorted(p.base)) for p in td.petals if p.stratum == 2)
    rep = orbit_report(s, I, "pointwise", "certified")
    secs = time.perf_counter() - t
    checks = {
        "delta=2": d == 2,
        "height 2": td.height == 2,
        "petals {b1},{b2} over I": lvl1 == [(["b1"], ["a1", "a2"]), (["b2"], ["a1", "a2"])],
        "petal {c1,c2} over {b1,b2}": lvl2 == [(["c1", "c2"], ["b1", "b2"])],
        "orbit(c1)={c1,c2}": rep.orbit_of("c1") == {"c1", "c2"},
        "dcl trace misses c1,c2": not (rep.dcl_trace & {"c1", "c2"}),
    }
    ok = all(checks.values()) and secs < 1
    record(1, ok, "examp1: " + ", ".join(k for k, v in checks.items() if v) or "none", secs, 1)
    assert all(checks.values()), checks
    assert secs < 1


def test_criterion_2_examp2():
    t = time.perf_counter()
    f = fixtures.get("examp2")
    s, I = f.structure, list(f.base)
    td = tree_decompose(s, I, "pointwise", f.mu)
    (top,) = [p for p in td.petals if p.stratum == 2 and len(p.points) == 6]
    pm = s.mask(top.points)
    perms = automorphisms(s, I)
    invariant = all(sum(1 << p[v] for v in range(s.n) if (pm >> v) & 1) == pm for p in perms)
    stratum2 = s.mask(td.strata[2])
    in_rel = {x: sum(1 for tm in s.triple_masks if tm & stratum2 == tm and (tm >> s.index[x]) & 1)
              for x in top.points}
    four = sorted(x for x, k in in_rel.items() if k == 4)
    res = classify_dclstar(s, I, f.normality, f.mu)
    g = fixtures.get("examp2-sym")
    sym = classify_dclstar(g.structure, g.base, g.normality, g.mu)
    secs = time.perf_counter() - t
    checks = {
        "6-point petal invariant": invariant,
        "al2 unique in 4 relations": four == ["al2"],
        "al2 in dcl*": "al2" in res.dclstar,
        "al2 not in sdcl* (symmetrized)": "al2" not in sym.sdclstar and "al2" not in sym.undetermined_sdclstar,
    }
    ok = all(checks.values()) and secs < 5
    record(2, ok, "examp2: " + ", ".join(k for k, v in checks.items() if v), secs, 5)
    assert all(checks.values()), checks
    assert secs < 5


def test_criterion_3_steiner():
    t = time.perf_counter()
    f = fixtures.get("steiner-ce")
    res = classify_dclstar(f.structure, ["a1", "a2"], f.normality, f.mu)
    secs = time.perf_counter() - t
    ok = "al1" in res.dclstar
    record(3, ok and secs < 10, f"steiner-ce: al1 in dcl*(a1,a2): {ok}; dcl* = {sorted(res.dclstar)}", secs, 10)
    assert ok and secs < 10


@pytest.mark.parametrize("k", [3, 4, 5])
def test_criterion_4_quasigroup(k):
    t = time.perf_counter()
    s = fixtures.get(f"alpha-line-{k}").structure
    if k == 3:
        try:
            quasigroup_experiment(s, s.points, ["a1", "a2"])
            ok, detail = False, "no error raised"
        except LineTooShort as e:
            ok = e.verdict == "definable-product" and e.product == "x1"
            detail = f"{e.verdict}, product {e.product}"
    else:
        r = quasigroup_experiment(s, s.points, ["a1", "a2"])
        order = {4: 2, 5: 6}[k]
        ok = r.verdict == "no-definable-product" and r.symmetric and r.group_order == order \
            and r.orbit_size == k - 2
        detail = f"{r.verdict}, S{k - 2} on {{{','.join(r.free)}}} (order {r.group_order})"
    secs = time.perf_counter() - t
    record(f"4 (alpha-line-{k})", ok and secs < 1, detail, secs, 1)
    assert ok and secs < 1


@pytest.fixture(scope="module")
def suite():
    t = time.perf_counter()
    results = run_suite(seed=0, count=500)
    return results, time.perf_counter() - t


def test_criterion_5_property_suite(suite):
    results, secs = suite
    literal = [r for r in results if r.known_false]
    others = [r for r in results if not r.known_false]
    bad = [r.name for r in others if not r.ok]
    ok = not bad and not any(r.violations for r in literal) and secs < 60
    detail = (f"{len(others)} properties with 0 violations" if not bad else f"violations in {bad}")
    for r in literal:
        detail += f"; literal '{r.name}': {len(r.violations)} of {r.structures} structures violate ({r.known_false})"
    record(5, ok, detail, secs, 60)
    # everything except the known-false literal statement must hold
    assert not bad, bad
    assert secs < 60


@pytest.mark.xfail(strict=True, reason="flatness over arbitrary subsets fails in linear spaces; see the 4-point line")
def test_criterion_5_linear_flatness_all_families(suite):
    results, _ = suite
    (r,) = [x for x in results if x.name == "flatness, linear spaces, all families"]
    assert r.ok


@pytest.mark.parametrize("k", [3, 4, 5])
def test_criterion_6_build_generic(k):
    t = time.perf_counter()
    seed = Structure.build(Flavor.LINEAR, ["a1", "a2"], [])
    mu = MuFunction(k - 2)
    res = build_generic(seed, mu, 20, [alpha_demand(Flavor.LINEAR, ["a1", "a2"])], max_ext=4)
    s = res.structure
    i = s.mask(["a1", "a2"])
    through = [lm for lm in s.line_masks if lm & i == i]
    sizes = [bin(lm).count("1") for lm in through]
    lmu = in_Lmu(s, mu, 4)
    secs = time.perf_counter() - t
    ok = sizes == [k] and bool(lmu)
    record(f"6 (k={k})", ok and secs < 30, f"line through a1,a2 has {sizes} points; in L_mu: {bool(lmu)}", secs, 30)
    assert ok and secs < 30


def test_criterion_7_tripling_fixtures():
    t = time.perf_counter()
    chosen, problems = [], []
    for name, f in fixtures.registry().items():
        s = f.structure
        if s.flavor is not Flavor.HYPERGRAPH or f.base is None or f.mu is None or not triples_in(s, f.mu, 4):
            continue
        chosen.append(name)
        res = classify_dclstar(s, f.base, f.normality, f.mu)
        if res.dclstar or res.undetermined_dclstar:
            problems.append(f"{name}: dcl* = {sorted(res.dclstar | res.undetermined_dclstar)}")
        sw = res.setwise
        for o, d in sw.orbit_dims.items():
            if not o <= sw.acl0 and d < 2:
                problems.append(f"{name}: setwise orbit {sorted(o)} has dim {d}")
        if not res.pointwise.dim_m_ok:
            problems.append(f"{name}: pointwise orbit off the zero stratum with dim < 2")
    secs = time.perf_counter() - t
    ok = bool(chosen) and not problems
    record(7, ok, f"fixtures {chosen}: " + ("dcl* empty, orbits safe" if not problems else "; ".join(problems)),
           secs)
    assert chosen and not problems, problems
