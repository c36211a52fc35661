from itertools import permutations
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strongmin import fixtures
from strongmin.core import (Flavor, Structure, automorphisms, canon, embeddings, isomorphic, load, orbits,
                            parse, serialize)
from strongmin.errors import DuplicateRelation, DuplicateTriplePoint, LinearityViolation, ParseError, UnknownPoint

DATA = Path(__file__).resolve().parents[1] / "src" / "strongmin" / "data"


def brute_auts(s, pointwise=()):
    """Every permutation preserving the triples (and fixing `pointwise`)."""
    fix = [s.index[p] for p in pointwise]
    trip = {frozenset(t) for t in s.triples}
    out = []
    for p in permutations(range(s.n)):
        if any(p[v] != v for v in fix):
            continue
        if all(frozenset(p[v] for v in t) in trip for t in trip):
            out.append(p)
    return sorted(out)


def chain():
    return fixtures.get("examp1").structure


def test_parse_smallest():
    s = parse("flavor: hypergraph\npoints: a1 a2 b1\nrel: a1 a2 b1\n")
    assert s.n == 3 and len(s.triples) == 1


def test_parse_examp2_counts():
    s = load(DATA / "examp2.struct")
    assert s.n == 14 and len(s.triples) == 12


def test_two_lines_through_a_pair():
    with pytest.raises(LinearityViolation):
        parse("flavor: linear\npoints: a b c d\nrel: a b c\nrel: a b d\n")


def test_four_clique_is_one_line():
    s = parse("flavor: linear\npoints: a b c d\nrel: a b c\nrel: a b d\nrel: a c d\nrel: b c d\n")
    assert len(s.line_masks) == 1


@pytest.mark.parametrize("text,err", [
    ("flavor: hypergraph\npoints: a b\nrel: a a b\n", DuplicateTriplePoint),
    ("flavor: hypergraph\npoints: a b c\nrel: a b c\nrel: c b a\n", DuplicateRelation),
    ("flavor: hypergraph\npoints: a b\nrel: a b c\n", UnknownPoint),
    ("points: a b c\n", ParseError),
    ("flavor: nope\n", ParseError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse(text, "f.struct")


def test_parse_error_has_location():
    with pytest.raises(UnknownPoint) as e:
        parse("flavor: hypergraph\npoints: a b\n\nrel: a b c\n", "bad.struct")
    assert "bad.struct:4:" in str(e.value)


@pytest.mark.parametrize("path", sorted(DATA.glob("*.struct")), ids=lambda p: p.stem)
def test_data_files_round_trip(path):
    s = load(path)
    again = parse(serialize(s))
    assert serialize(again) == serialize(s)
    fx = fixtures.get(path.stem)
    assert set(again.named_triples()) == set(fx.structure.named_triples())


def test_embeddings_of_a_triple():
    t = Structure.build(Flavor.HYPERGRAPH, "xyz", [("x", "y", "z")])
    assert len(embeddings(t, t)) == 6


def test_examp2_petal_has_two_images():
    s = fixtures.get("examp2").structure
    src = s.induced(["a1", "a2", "c1", "c2", "c3"])
    imgs = {e.image - {"a1", "a2"} for e in embeddings(src, s, ["a1", "a2"])}
    assert imgs == {frozenset({"c1", "c2", "c3"}), frozenset({"d1", "d2", "d3"})}


def test_k4_design_has_all_of_s4():
    s = fixtures.get("k4-design").structure
    assert len(embeddings(s, s)) == 24
    assert len(automorphisms(s)) == 24


def test_chain_stabilizer_order_four():
    s = chain()
    got = sorted(automorphisms(s, ["a1", "a2"]))
    assert got == brute_auts(s, ["a1", "a2"])
    assert len(got) == 4
    orb = [o for o in orbits(s.n, got) if s.index["c1"] in o][0]
    assert {s.points[v] for v in orb} == {"c1", "c2"}


def test_pointwise_all_points_is_trivial():
    s = chain()
    assert automorphisms(s, s.points) == [tuple(range(s.n))]


def test_four_point_line_stabilizer_is_s2():
    s = Structure.from_lines("abcd", ["abcd"])
    perms = automorphisms(s, ["a", "b"])
    assert sorted(tuple(p[s.index[x]] for x in "cd") for p in perms) == [(2, 3), (3, 2)]


def test_setwise_stabilizer():
    s = chain()
    got = automorphisms(s, (), ["a1", "a2"])
    want = [p for p in brute_auts(s) if {p[0], p[1]} == {0, 1}]
    assert sorted(got) == want


def test_canon_relabel_and_alpha():
    a = Structure.build(Flavor.HYPERGRAPH, ["b1", "b2", "x"], [("b1", "b2", "x")])
    b = Structure.build(Flavor.HYPERGRAPH, ["q", "p", "r"], [("p", "q", "r")])
    assert canon(a) == canon(b)
    assert canon(a, [{"b1", "b2"}, {"x"}]) == canon(b, [{"p", "q"}, {"r"}])
    s = chain()
    cpair = canon(s.induced(["b1", "b2", "c1", "c2"]), [{"b1", "b2"}, {"c1", "c2"}])
    assert cpair != canon(a, [{"b1", "b2"}, {"x"}])


triples_st = st.sets(st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
                     .filter(lambda t: len(set(t)) == 3).map(lambda t: tuple(sorted(t))), max_size=10)


@settings(max_examples=60, deadline=None)
@given(triples_st, st.permutations(list(range(7))))
def test_canon_is_isomorphism_invariant(ts, perm):
    pts = [f"p{i}" for i in range(7)]
    s = Structure.build(Flavor.HYPERGRAPH, pts, [tuple(pts[i] for i in t) for t in ts])
    r = s.relabel({pts[i]: f"q{perm[i]}" for i in range(7)})
    assert canon(s) == canon(r)
    assert isomorphic(s, r)
    assert len(automorphisms(s)) == len(automorphisms(r))


@settings(max_examples=25, deadline=None)
@given(triples_st)
def test_automorphisms_match_brute_force(ts):
    pts = [f"p{i}" for i in range(7)]
    s = Structure.build(Flavor.HYPERGRAPH, pts, [tuple(pts[i] for i in t) for t in ts])
    assert sorted(automorphisms(s)) == brute_auts(s)
