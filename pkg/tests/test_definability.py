import pytest

from strongmin import fixtures
from strongmin.core import Structure
from strongmin.definability import (classify_dclstar, finite_codes, orbit_report, quasigroup_experiment,
                                    verify_fixture)
from strongmin.errors import LineTooShort, NoCertificate, StrongMinError, UnknownFixture


def fx(name):
    return fixtures.get(name)


def classify(name):
    f = fx(name)
    return classify_dclstar(f.structure, f.base, f.normality, f.mu)


def test_examp2_alpha2_in_dclstar():
    f = fx("examp2")
    rep = orbit_report(f.structure, f.base, "pointwise", "certified")
    v = rep.per_element["al2"]
    assert v.orbit == {"al2"} and v.in_dcl and v.in_dclstar == "yes"


def test_symmetrized_alpha2_not_in_sdclstar():
    f = fx("examp2-sym")
    rep = orbit_report(f.structure, f.base, "setwise", "certified")
    v = rep.per_element["al2"]
    assert len(v.orbit) > 1 and v.in_sdclstar == "no"


def test_examp1_c1_not_in_dcl():
    f = fx("examp1")
    rep = orbit_report(f.structure, f.base, "pointwise", "certified")
    assert rep.orbit_of("c1") == {"c1", "c2"}
    assert not rep.per_element["c1"].in_dcl


def test_no_certificate():
    with pytest.raises(NoCertificate):
        orbit_report(fx("examp1").structure, ["a1", "a2"], "pointwise", None)


@pytest.mark.parametrize("name", ["examp1", "examp2", "examp2-sym", "steiner-ce", "examp1-triple", "k4-design"])
@pytest.mark.parametrize("group", ["pointwise", "setwise"])
def test_report_invariants(name, group):
    f = fx(name)
    rep = orbit_report(f.structure, f.base, group, "certified")
    for p, v in rep.per_element.items():
        fixed = v.in_dcl if group == "pointwise" else v.in_sdcl
        assert fixed == (len(v.orbit) == 1)
        if v.in_dclstar == "yes":
            assert v.in_dcl
        if v.in_sdclstar == "yes":
            assert v.in_sdcl
    # safety is monotone under unions of orbits
    from strongmin.predim import dim
    for o in rep.orbits:
        if rep.orbit_dims[o] >= 2:
            assert all(dim(f.structure, o | o2) >= 2 for o2 in rep.orbits)


def test_classify_examples():
    assert classify("examp2").dclstar == {"al1", "al2"}
    assert classify("examp2-sym").sdclstar == frozenset()
    assert "al1" in classify("steiner-ce").dclstar
    for name in ("examp1-triple", "k4-design"):
        r = classify(name)
        assert r.dclstar == frozenset() and not r.undetermined_dclstar
        assert all(ok for _, ok in r.checks)


def test_tripling_checks_are_attached():
    labels = [label for label, _ in classify("examp1-triple").checks]
    assert "dcl* trace empty (mu triples)" in labels
    labels = [label for label, _ in classify("examp2").checks]
    assert "dcl* trace empty (mu triples)" not in labels


def test_setwise_orbits_are_safe_on_tripling_fixtures():
    for name in ("examp1-triple", "k4-design"):
        r = classify(name)
        assert r.setwise.all_safe and r.pointwise.dim_m_ok


def test_coding():
    f = fx("examp2-sym")
    assert not orbit_report(f.structure, f.base, "setwise", "certified").sdcl_trace
    assert finite_codes(f.structure, f.base, 3) == []
    f = fx("examp2")
    codes = finite_codes(f.structure, f.base, 2)
    assert codes and all(len(c) <= 2 for c in codes)


def test_coding_brute_force_meaning():
    from strongmin.core import automorphisms
    f = fx("examp2")
    s = f.structure
    perms = automorphisms(s)
    i = s.mask(f.base)
    for S in finite_codes(s, f.base, 2):
        for p in perms:
            fixes_i = sum(1 << p[v] for v in range(s.n) if (i >> v) & 1) == i
            fixes_s = all(p[s.index[x]] == s.index[x] for x in S)
            assert fixes_i == fixes_s


@pytest.mark.parametrize("k,order", [(4, 2), (5, 6)])
def test_quasigroup_no_product(k, order):
    f = fx(f"alpha-line-{k}")
    s = f.structure
    line = s.points
    r = quasigroup_experiment(s, line, ["a1", "a2"])
    assert r.verdict == "no-definable-product" and r.symmetric
    assert r.orbit_size == k - 2 and r.group_order == order


def test_quasigroup_three_point_line():
    s = fx("alpha-line-3").structure
    with pytest.raises(LineTooShort) as e:
        quasigroup_experiment(s, s.points, ["a1", "a2"])
    assert e.value.verdict == "definable-product" and e.value.product == "x1"


def test_quasigroup_errors():
    with pytest.raises(StrongMinError):
        quasigroup_experiment(fx("examp1").structure, ["a1", "a2", "b1"], ["a1", "a2"])
    s = Structure.from_lines(["a", "b", "c", "d", "e"], [["a", "b", "c", "d"]])
    with pytest.raises(StrongMinError):
        quasigroup_experiment(s, ["a", "b", "c"], ["a", "b"])
    with pytest.raises(StrongMinError):
        quasigroup_experiment(s, ["a", "b", "c", "d"], ["a", "e"])


@pytest.mark.parametrize("name", fixtures.names())
def test_every_fixture_verifies(name):
    rep = verify_fixture(name)
    assert rep.ok, [r for r in rep.rows if not r[2]]


def test_unknown_fixture():
    with pytest.raises(UnknownFixture):
        verify_fixture("nope")
