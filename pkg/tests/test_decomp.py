import random
from functools import lru_cache
from itertools import combinations

import pytest

from strongmin import fixtures, report
from strongmin.core import Flavor, Structure
from strongmin.decomp import (determines, flowers_and_bouquet, independence_violations, line_strata_violations,
                              linear_decompose, reorder, tree_decompose)
from strongmin.errors import DependentBase, IllegalSwap, NotNormal
from strongmin.pairs import make_pair
from strongmin.properties import oracle_lines


def fx(name):
    return fixtures.get(name)


def odelta(s, m):
    """delta from the raw triples, independent of the library's line code."""
    n = bin(m).count("1")
    if s.flavor is Flavor.HYPERGRAPH:
        return n - sum(1 for t in s.triples if all((m >> v) & 1 for v in t))
    return n - sum(max(0, bin(lm & m).count("1") - 2) for lm in oracle_lines(s))


def valid_chain(ld):
    """Every step is 0-primitive over the previous set (brute force over subsets)."""
    s = ld.ambient
    T = lru_cache(maxsize=None)(lambda m: odelta(s, m))
    for prev, nxt, st in zip(ld.chain, ld.chain[1:], ld.steps):
        p, a = s.mask(prev), s.mask(st.ext)
        if s.mask(nxt) != p | a or p & a:
            return False
        if T(p | a) != T(p):
            return False
        pts = [1 << v for v in range(s.n) if (a >> v) & 1]
        for k in range(1, len(pts)):
            for sub in combinations(pts, k):
                if T(p | sum(sub)) <= T(p):
                    return False
    return True


def test_chain_of_examp1():
    ld = linear_decompose(fx("examp1").structure, ["a1", "a2"])
    assert [sorted(st.ext) for st in ld.steps] == [["b1"], ["b2"], ["c1", "c2"]]
    assert valid_chain(ld)


def test_trivial_chain():
    s = fx("examp1").structure.induced(["a1", "a2"])
    assert len(linear_decompose(s, ["a1", "a2"])) == 0


def test_chain_of_examp2():
    ld = linear_decompose(fx("examp2").structure, ["a1", "a2"])
    exts = [sorted(st.ext) for st in ld.steps]
    assert exts[:2] == [["c1", "c2", "c3"], ["d1", "d2", "d3"]]
    assert len(exts) == 3 and len(exts[2]) == 6
    assert valid_chain(ld)


def test_reorder_examples():
    ld = linear_decompose(fx("examp1").structure, ["a1", "a2"])
    sw = reorder(ld, 1)
    assert [sorted(st.ext) for st in sw.steps][:2] == [["b2"], ["b1"]]
    assert valid_chain(sw)
    with pytest.raises(IllegalSwap):
        reorder(ld, 2)
    with pytest.raises(IllegalSwap):
        reorder(ld, 3)


def test_200_random_swaps():
    rng = random.Random(0)
    names = ["examp1", "examp2", "examp2-sym", "steiner-ce", "examp1-triple", "two-flowers", "determines-demo"]
    done = legal = 0
    while done < 200:
        f = fx(rng.choice(names))
        ld = linear_decompose(f.structure, f.base)
        for _ in range(rng.randint(1, 6)):
            n = rng.randint(1, len(ld.steps) - 1)
            try:
                new = reorder(ld, n)
            except IllegalSwap:
                done += 1
                continue
            assert valid_chain(new)
            assert new.chain[-1] == ld.chain[-1]
            ld = new
            done += 1
            legal += 1
    assert legal > 50


def test_tree_examp1():
    td = tree_decompose(fx("examp1").structure, ["a1", "a2"], "pointwise", fx("examp1").mu)
    assert td.height == 2
    assert sorted(sorted(p.points) for p in td.petals if p.stratum == 1) == [["b1"], ["b2"]]
    (top,) = [p for p in td.petals if p.stratum == 2]
    assert top.points == {"c1", "c2"} and top.base == {"b1", "b2"}
    assert td.clusters_at(2)[0].copies == [frozenset({"a1", "a2"})]
    assert all(c.accounting_ok for c in td.clusters)


def test_tree_examp2():
    f = fx("examp2")
    td = tree_decompose(f.structure, f.base, "pointwise", f.mu)
    assert sorted(len(p.points) for p in td.petals if p.stratum == 1) == [3, 3]
    (top,) = td.clusters_at(2)
    assert top.base == {"c2", "d2"} and top.nu == 1
    assert top.copies == [frozenset({"a1", "a2", "c1", "c3", "d1", "d3"})]


def test_tree_is_deterministic():
    f = fx("steiner-ce")
    a = report.tree(tree_decompose(f.structure, f.base, "pointwise", f.mu))
    b = report.tree(tree_decompose(f.structure, f.base, "pointwise", f.mu))
    assert a == b


@pytest.mark.parametrize("name", ["examp1", "examp2", "examp2-sym", "steiner-ce", "examp1-triple", "alpha-line-5"])
def test_no_relations_between_petals(name):
    f = fx(name)
    td = tree_decompose(f.structure, f.base, "pointwise", f.mu)
    assert independence_violations(td) == []
    if f.structure.flavor is Flavor.LINEAR:
        assert line_strata_violations(td) == []


def test_accounting_on_tripling_fixture():
    f = fx("examp1-triple")
    td = tree_decompose(f.structure, f.base, "pointwise", f.mu)
    assert all(c.ell + c.nu == c.mu == 3 for c in td.clusters)


def test_linear_cluster():
    f = fx("alpha-line-5")
    td = tree_decompose(f.structure, f.base, "pointwise", f.mu)
    (c,) = td.clusters
    assert c.linear_cluster and c.ell == 3 and c.symmetric


def test_determines():
    f = fx("examp2")
    td = tree_decompose(f.structure, f.base)
    (top,) = [p for p in td.petals if p.stratum == 2]
    assert determines(td, top.id) is None
    td1 = tree_decompose(fx("examp1").structure, ["a1", "a2"])
    assert determines(td1, "2.1.1") is None
    assert determines(td1, "1.1.1") is None


def test_base_errors():
    s = fx("examp1").structure
    with pytest.raises(DependentBase):
        tree_decompose(s, ["a1", "a2", "b1"])
    with pytest.raises(NotNormal):
        tree_decompose(s, ["a1"])


def test_flower_unique_embedding():
    s = Structure.build(Flavor.HYPERGRAPH, ["b1", "b2", "x"], [("b1", "b2", "x")])
    gp = make_pair(s, ["x"], ["b1", "b2"])
    bq = flowers_and_bouquet(s, gp, ["b1", "b2"])
    # the swap of b1 and b2 gives a second arrangement with the same petal set
    assert len(bq.flowers) == 1
    assert bq.flowers[0].petals == [frozenset({"x"})] and len(bq.flowers[0].certificates) == 1


def test_overlapping_flower_and_bound():
    f = fx("overlap-flowers")
    s = f.structure
    gp = make_pair(s, ["x", "y", "z"], ["b1", "b2", "b3"])
    bq = flowers_and_bouquet(s, gp, ["b1", "b2", "b3"], f.mu)
    fl = next(x for x in bq.flowers if x.base_arrangement == ("b1", "b2", "b3"))
    assert len(fl.petals) == 7 and len(fl.certificates) == 8
    assert fl.within_bound is not None
