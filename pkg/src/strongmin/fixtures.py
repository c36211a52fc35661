"""Registered fixtures: small normal ambients with their expected facts.

Each fixture carries a structure, a base I, a mu-function, the normality
status per group and a list of named checks.  The checks are plain
callables returning a bool; `definability.verify_fixture` runs them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .core import Flavor, Structure
from .errors import UnknownFixture
from .pairs import MuFunction, make_pair, pair_code


@dataclass(frozen=True)
class Check:
    label: str
    source: str  # short note on where the expected value comes from
    run: Callable


@dataclass
class Fixture:
    name: str
    structure: Structure
    base: tuple | None
    mu: MuFunction | None
    normality: dict = field(default_factory=dict)  # group -> "certified" | "assumed"
    checks: list = field(default_factory=list)
    note: str = ""


H = Flavor.HYPERGRAPH


# ---------------------------------------------------------------- structures

def examp1_structure() -> Structure:
    pts = ["a1", "a2", "b1", "b2", "c1", "c2"]
    rels = [("a1", "a2", "b1"), ("a1", "a2", "b2"), ("c1", "c2", "b1"), ("c1", "c2", "b2")]
    return Structure.build(H, pts, rels, ("a1", "a2"))


def examp1_triple_structure() -> Structure:
    """examp1 saturated for mu = 3: three alpha points over I, three c-pairs per b-pair."""
    pts = ["a1", "a2", "b1", "b2", "b3"]
    rels = [("a1", "a2", b) for b in ("b1", "b2", "b3")]
    for x, y in (("b1", "b2"), ("b1", "b3"), ("b2", "b3")):
        for k in (1, 2):
            c, c2 = f"c{x[1]}{y[1]}.{k}", f"e{x[1]}{y[1]}.{k}"
            pts += [c, c2]
            rels += [(c, c2, x), (c, c2, y)]
    return Structure.build(H, pts, rels, ("a1", "a2"))


def _block(tag: str, p: str, q: str):
    """Three points t1,t2,t3 with R(p,t1,t3), R(q,t1,t2), R(q,t2,t3)."""
    t1, t2, t3 = f"{tag}1", f"{tag}2", f"{tag}3"
    return [t1, t2, t3], [(p, t1, t3), (q, t1, t2), (q, t2, t3)]


def _upper(prefix: str, p1: str, p2: str, g: str, d: str, c2: str, d2: str):
    """Copy of {p1,p2,g1,g3,d1,d3} over {c2,d2} built from the a-roles p1, p2."""
    a1, a2 = f"{prefix}1", f"{prefix}2"
    g1, g3, e1, e3 = f"{g}1", f"{g}3", f"{d}1", f"{d}3"
    pts = [a1, a2, g1, g3, e1, e3]
    rels = [(a1, g1, g3), (a2, g1, c2), (a2, c2, g3), (a1, e1, e3), (a2, e1, d2), (a2, d2, e3)]
    return pts, rels


def examp2_structure() -> Structure:
    pts, rels = ["a1", "a2"], []
    for tag in ("c", "d"):
        p, r = _block(tag, "a1", "a2")
        pts += p
        rels += r
    p, r = _upper("al", "a1", "a2", "ga", "de", "c2", "d2")
    return Structure.build(H, pts + p, rels + r, ("a1", "a2"))


def examp2_sym_structure() -> Structure:
    """examp2 closed under the swap of a1 and a2."""
    pts, rels = ["a1", "a2"], []
    for tag in ("c", "d"):
        p, r = _block(tag, "a1", "a2")
        pts += p
        rels += r
    for tag in ("cx", "dx"):
        p, r = _block(tag, "a2", "a1")
        pts += p
        rels += r
    p, r = _upper("al", "a1", "a2", "ga", "de", "c2", "d2")
    p2, r2 = _upper("alx", "a2", "a1", "gax", "dex", "cx2", "dx2")
    return Structure.build(H, pts + p + p2, rels + r + r2, ("a1", "a2"))


def steiner_ce_structure() -> Structure:
    lines = []
    for t in ("d", "c"):
        lines += [("a1", f"{t}2", f"{t}1"), ("a1", f"{t}4", f"{t}5"),
                  ("a2", f"{t}5", f"{t}3", f"{t}1"), (f"{t}2", f"{t}3", f"{t}4")]
    # copy of everything but {d3, c3} over {d3, c3}
    ren = {"a1": "al1", "a2": "al2"}
    for i in (1, 2, 4, 5):
        ren[f"d{i}"] = f"de{i}"
        ren[f"c{i}"] = f"ga{i}"
    lines += [tuple(ren.get(p, p) for p in ln) for ln in lines]
    pts = ["a1", "a2"] + [f"{t}{i}" for t in ("d", "c") for i in range(1, 6)]
    pts += ["al1", "al2"] + [ren[f"{t}{i}"] for t in ("d", "c") for i in (1, 2, 4, 5)]
    return Structure.from_lines(pts, lines, ("a1", "a2"))


def alpha_line_structure(k: int) -> Structure:
    pts = ["a1", "a2"] + [f"x{i}" for i in range(1, k - 1)]
    return Structure.from_lines(pts, [pts], ("a1", "a2"))


def k4_structure() -> Structure:
    pts = ["w", "x", "y", "z"]
    rels = [("w", "x", "y"), ("w", "x", "z"), ("w", "y", "z"), ("x", "y", "z")]
    return Structure.build(H, pts, rels)


def overlap_structure() -> Structure:
    """Seven copies of a 3-cycle over {b1,b2,b3}; copies (i,0) and (i,1) share one point."""
    pts = ["b1", "b2", "b3", "x", "y", "z"]
    rels = [("x", "y", "b1"), ("y", "z", "b2"), ("z", "x", "b3")]
    for i in range(3):
        hub = f"h{i}"
        pts.append(hub)
        for j in range(2):
            y, z = f"y{i}{j}", f"z{i}{j}"
            pts += [y, z]
            rels += [(hub, y, "b1"), (y, z, "b2"), (z, hub, "b3")]
    return Structure.build(H, pts, rels, ("b1", "b2", "b3"))


def two_flowers_structure() -> Structure:
    pts, rels = ["b1", "b2"], []
    for t, p, q in (("c", "b1", "b2"), ("d", "b2", "b1")):
        for i in (1, 2):
            x1, x2, x3 = f"{t}{i}1", f"{t}{i}2", f"{t}{i}3"
            pts += [x1, x2, x3]
            rels += [(p, x1, x2), (q, x2, x3), (q, x3, x1)]
    return Structure.build(H, pts, rels, ("b1", "b2"))


def determines_structure() -> Structure:
    """examp1-like blocks with one extra point over a pair inside each block."""
    pts, rels = ["a1", "a2"], []
    for tag in ("c", "d"):
        p, r = _block(tag, "a1", "a2")
        pts += p
        rels += r
    pts += ["e", "f"]
    rels += [("c1", "c2", "e"), ("d1", "d2", "f")]
    return Structure.build(H, pts, rels, ("a1", "a2"))


# ---------------------------------------------------------------- checks

@lru_cache(maxsize=None)
def _td(name, group="pointwise"):
    from .decomp import tree_decompose
    fx = get(name)
    return tree_decompose(fx.structure, fx.base, group, fx.mu)


@lru_cache(maxsize=None)
def _report(name, group):
    from .definability import orbit_report
    fx = get(name)
    return orbit_report(fx.structure, fx.base, group, fx.normality.get(group, "assumed"))


@lru_cache(maxsize=None)
def _classify(name):
    from .definability import classify_dclstar
    fx = get(name)
    return classify_dclstar(fx.structure, fx.base, fx.normality)


def _petal_sets(td, m):
    return sorted(sorted(p.points) for p in td.petals if p.stratum == m)


def _examp1_checks():
    from .closure import acl_trace, icl, is_strong
    from .decomp import determines, linear_decompose
    from .predim import delta, dim

    s = lambda: get("examp1").structure

    def chain_shape():
        ld = linear_decompose(s(), ["a1", "a2"])
        return [sorted(st.ext) for st in ld.steps] == [["b1"], ["b2"], ["c1", "c2"]]

    def tree_shape():
        td = _td("examp1")
        return (td.height == 2 and _petal_sets(td, 1) == [["b1"], ["b2"]]
                and _petal_sets(td, 2) == [["c1", "c2"]]
                and all(p.base == frozenset({"a1", "a2"}) for p in td.petals if p.stratum == 1)
                and all(p.base == frozenset({"b1", "b2"}) for p in td.petals if p.stratum == 2))

    def downward_copy():
        td = _td("examp1")
        cl = td.clusters_at(2)[0]
        return cl.copies == [frozenset({"a1", "a2"})] and cl.nu == 1 and cl.ell == 1

    def orbit_c1():
        rep = _report("examp1", "pointwise")
        return rep.orbit_of("c1") == frozenset({"c1", "c2"})

    def not_in_dcl():
        rep = _report("examp1", "pointwise")
        return not any(rep.per_element[x].in_dcl for x in ("c1", "c2"))

    def c_in_acl():
        return {"c1", "c2"} <= acl_trace(s(), ["a1", "a2"])

    def empty_star():
        v = _classify("examp1")
        return not v.dclstar and not v.sdclstar

    return [
        Check("delta of the full diagram is 2", "6 points minus 4 triples", lambda: delta(s(), s().points) == 2),
        Check("diagram is strong, I is independent", "stated hypothesis",
              lambda: is_strong(s(), s().points) and dim(s(), ["a1", "a2"]) == 2),
        Check("chain adds b1, b2, then {c1,c2}", "reference value", chain_shape),
        Check("tree: {b1},{b2} over I and {c1,c2} over {b1,b2}, height 2", "reference value", tree_shape),
        Check("the copy of {c1,c2} over {b1,b2} inside the lower stratum is I", "reference value",
              downward_copy),
        Check("c1, c2 are algebraic over I", "reference value", c_in_acl),
        Check("pointwise orbit of c1 is {c1,c2}", "reference value", orbit_c1),
        Check("c1, c2 are not in dcl(I)", "reference value", not_in_dcl),
        Check("dcl* and sdcl* traces are empty", "reference value", empty_star),
        Check("icl(c1) = {c1}", "computed", lambda: icl(s(), ["c1"]).closure == frozenset({"c1"})),
        Check("the c-petal determines nothing", "base meets two lower petals",
              lambda: determines(_td("examp1"), _td("examp1").clusters_at(2)[0].petals[0]) is None),
    ]


def _examp1_triple_checks():
    from .pairs import enumerate_good_pairs, in_Lmu, mu_triples

    fx = lambda: get("examp1-triple")

    def accounting():
        td = _td("examp1-triple")
        return all(c.accounting_ok for c in td.clusters)

    return [
        Check("in L_mu", "construction", lambda: bool(in_Lmu(fx().structure, fx().mu, 4))),
        Check("mu triples on the pair catalog", "construction",
              lambda: mu_triples(fx().mu, enumerate_good_pairs(fx().structure, 4))),
        Check("every cluster has ell + nu = mu", "saturation", accounting),
        Check("dcl* trace is empty", "structural check", lambda: not _classify("examp1-triple").dclstar),
        Check("safety holds for both groups", "structural check",
              lambda: _report("examp1-triple", "pointwise").dim_m_ok and _report("examp1-triple", "setwise").all_safe),
    ]


def _examp2_checks():
    from .decomp import determines
    from .predim import delta

    s = lambda: get("examp2").structure
    upper = frozenset({"al1", "al2", "ga1", "ga3", "de1", "de3"})

    def tree_shape():
        td = _td("examp2")
        return (td.height == 2
                and _petal_sets(td, 1) == [["c1", "c2", "c3"], ["d1", "d2", "d3"]]
                and _petal_sets(td, 2) == [sorted(upper)]
                and td.petals[-1].base == frozenset({"c2", "d2"}))

    def nu_one():
        cl = _td("examp2").clusters_at(2)[0]
        return cl.nu == 1 and cl.copies == [frozenset({"a1", "a2", "c1", "c3", "d1", "d3"})]

    def invariant():
        rep = _report("examp2", "pointwise")
        return all(rep.orbit_of(x) <= upper for x in upper)

    def four_relations():
        st = s()
        cnt = {x: sum(1 for t in st.named_triples() if x in t) for x in upper}
        return [x for x in upper if cnt[x] == 4] == ["al2"]

    def c2_orbit():
        return _report("examp2", "pointwise").orbit_of("c2") == frozenset({"c2", "d2"})

    return [
        Check("delta of the full diagram is 2", "reference value", lambda: delta(s(), s().points) == 2),
        Check("tree: two 3-point petals, then a 6-point petal over {c2,d2}", "reference value", tree_shape),
        Check("nu = 1 with copy {a1,a2,c1,c3,d1,d3}", "reference value", nu_one),
        Check("the 6-point petal is invariant under the pointwise group", "reference value", invariant),
        Check("al2 is the unique point of the petal in 4 relations", "reference value", four_relations),
        Check("pointwise orbit of c2 is {c2,d2}", "reference value", c2_orbit),
        Check("al2 is in the dcl* trace", "reference value", lambda: "al2" in _classify("examp2").dclstar),
        Check("the upper petal determines nothing", "base meets two lower petals",
              lambda: determines(_td("examp2"), "2.1.1") is None),
    ]


def _examp2_sym_checks():
    def moved():
        rep = _report("examp2-sym", "setwise")
        return rep.orbit_of("al2") == frozenset({"al2", "alx2"})

    return [
        Check("setwise group moves al2 to its mirror", "reference value", moved),
        Check("al2 is not in the sdcl* trace", "reference value",
              lambda: "al2" not in _classify("examp2-sym").sdclstar),
        Check("sdcl* trace is empty", "no symmetric definable functions",
              lambda: not _classify("examp2-sym").sdclstar),
    ]


def _steiner_checks():
    from .decomp import line_strata_violations

    return [
        Check("al1 is in the dcl* trace of {a1,a2}", "reference value",
              lambda: "al1" in _classify("steiner-ce").dclstar),
        Check("no line meets more than three strata", "structural check",
              lambda: not line_strata_violations(_td("steiner-ce"))),
    ]


def _alpha_line_checks(k):
    name = f"alpha-line-{k}"

    def tree_shape():
        td = _td(name)
        cl = td.clusters
        free = frozenset(get(name).structure.points) - {"a1", "a2"}
        return (len(cl) == 1 and cl[0].linear_cluster and cl[0].stratum == 1
                and frozenset().union(*(td.petal(p).points for p in cl[0].petals)) == free
                and len(free) == get(name).mu.alpha_value)

    def experiment():
        from .definability import quasigroup_experiment
        from .errors import LineTooShort

        st = get(name).structure
        try:
            r = quasigroup_experiment(st, st.points, ["a1", "a2"])
        except LineTooShort as e:
            return k == 3 and e.verdict == "definable-product"
        return k > 3 and r.verdict == "no-definable-product" and r.orbit_size == k - 2 and r.symmetric

    return [
        Check("one linear cluster of mu(alpha) points in stratum 1", "structural check", tree_shape),
        Check("quasigroup experiment verdict", "structural check", experiment),
    ]


def _k4_checks():
    from .closure import acl_trace

    st = lambda: get("k4-design").structure
    return [
        Check("every point is algebraic over the empty set", "dim 0",
              lambda: acl_trace(st(), []) == frozenset(st().points)),
        Check("dcl of the empty set is empty", "full symmetric group",
              lambda: not _classify("k4-design").dclstar),
    ]


def _overlap_checks():
    from .decomp import flowers_and_bouquet

    def flower():
        st = get("overlap-flowers").structure
        gp = make_pair(st, ["x", "y", "z"], ["b1", "b2", "b3"])
        bq = flowers_and_bouquet(st, gp, ["b1", "b2", "b3"])
        fl = [f for f in bq.flowers if f.base_arrangement == ("b1", "b2", "b3")][0]
        return len(fl.petals) == 7 and len(fl.certificates) == 8 and all(len(c) == 4 for c in fl.certificates)

    return [Check("7 petals and 8 certificates of size 4", "reference value", flower)]


def _two_flowers_checks():
    from .decomp import flowers_and_bouquet

    def bouquet():
        st = get("two-flowers").structure
        gp = make_pair(st, ["c11", "c12", "c13"], ["b1", "b2"])
        bq = flowers_and_bouquet(st, gp, ["b1", "b2"])
        arr = {f.base_arrangement: sorted(sorted(p) for p in f.petals) for f in bq.flowers}
        return arr == {
            ("b1", "b2"): [["c11", "c12", "c13"], ["c21", "c22", "c23"]],
            ("b2", "b1"): [["d11", "d12", "d13"], ["d21", "d22", "d23"]],
        }

    return [Check("two flowers, C over <b1,b2> and D over <b2,b1>", "reference value", bouquet)]


def _determines_checks():
    from .decomp import determines

    def det():
        td = _td("determines-demo")
        e = next(p for p in td.petals if p.points == frozenset({"e"}))
        f = next(p for p in td.petals if p.points == frozenset({"f"}))
        pe, pf = determines(td, e.id), determines(td, f.id)
        return (pe is not None and td.petal(pe).points == frozenset({"c1", "c2", "c3"})
                and pf is not None and td.petal(pf).points == frozenset({"d1", "d2", "d3"}))

    return [Check("a petal based inside one lower petal determines it", "constructed case", det)]


# ---------------------------------------------------------------- registry

def _code(s, A, B):
    return pair_code(s, s.mask(A), s.mask(B))


def _build_registry() -> dict:
    reg = {}
    both = {"pointwise": "certified", "setwise": "certified"}

    s = examp1_structure()
    mu = MuFunction(2, default=0)
    reg["examp1"] = Fixture("examp1", s, ("a1", "a2"), mu, dict(both), _examp1_checks())

    s = examp1_triple_structure()
    mu = MuFunction(3, default=1)
    reg["examp1-triple"] = Fixture("examp1-triple", s, ("a1", "a2"), mu, dict(both), _examp1_triple_checks(),
                                   "examp1 saturated for a tripling mu")

    s = examp2_structure()
    mu = MuFunction(2, default=0)
    reg["examp2"] = Fixture("examp2", s, ("a1", "a2"), mu, {"pointwise": "certified", "setwise": "assumed"},
                            _examp2_checks())

    s = examp2_sym_structure()
    reg["examp2-sym"] = Fixture("examp2-sym", s, ("a1", "a2"), MuFunction(2, default=0), dict(both),
                                _examp2_sym_checks(), "examp2 closed under swapping a1 and a2")

    s = steiner_ce_structure()
    reg["steiner-ce"] = Fixture("steiner-ce", s, ("a1", "a2"), MuFunction(2, default=0),
                                {"pointwise": "certified", "setwise": "assumed"}, _steiner_checks())

    for k in (3, 4, 5):
        s = alpha_line_structure(k)
        reg[f"alpha-line-{k}"] = Fixture(f"alpha-line-{k}", s, ("a1", "a2"), MuFunction(k - 2, default=0),
                                         dict(both), _alpha_line_checks(k))

    s = k4_structure()
    reg["k4-design"] = Fixture("k4-design", s, (), MuFunction(3, default=1), dict(both), _k4_checks())

    s = overlap_structure()
    mu = MuFunction(2, {_code(s, ["x", "y", "z"], ["b1", "b2", "b3"]): 4}, default=0)
    reg["overlap-flowers"] = Fixture("overlap-flowers", s, None, mu, {}, _overlap_checks(),
                                     "flower demo; the base is not strong, so no decomposition")

    s = two_flowers_structure()
    reg["two-flowers"] = Fixture("two-flowers", s, ("b1", "b2"), MuFunction(2, default=0),
                                 {"pointwise": "assumed", "setwise": "assumed"}, _two_flowers_checks())

    s = determines_structure()
    reg["determines-demo"] = Fixture("determines-demo", s, ("a1", "a2"), MuFunction(2, default=0),
                                     {"pointwise": "assumed", "setwise": "assumed"}, _determines_checks())
    return reg


@lru_cache(maxsize=None)
def registry() -> dict:
    return _build_registry()


def names() -> list:
    return list(registry())


def get(name: str) -> Fixture:
    reg = registry()
    if name not in reg:
        raise UnknownFixture(f"unknown fixture {name!r}; known: {', '.join(reg)}")
    return reg[name]
