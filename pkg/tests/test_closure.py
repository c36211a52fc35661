import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strongmin import fixtures
from strongmin.closure import acl_trace, icl, is_dclosed, is_strong
from strongmin.core import Flavor, Structure
from strongmin.properties import oracle_icl, oracle_strong, oracle_table


def chain():
    return fixtures.get("examp1").structure


def k4():
    return fixtures.get("k4-design").structure


def test_is_strong_examples():
    w = k4().points[0]
    assert not is_strong(k4(), [w])
    assert is_strong(chain(), ["a1", "a2"])
    assert is_strong(chain(), chain().points)


def test_icl_examples():
    assert icl(k4(), [k4().points[0]]).closure == frozenset(k4().points)
    assert icl(chain(), ["c1"]).closure == {"c1"}
    r = icl(chain(), ["a1", "a2"])
    assert r.closure == {"a1", "a2"}


def test_icl_chain_ends_at_closure():
    r = icl(k4(), [k4().points[0]])
    assert r.chain[0][0] == {k4().points[0]}
    assert r.chain[-1][0] == r.closure
    assert r.chain[-1][1] == 0


def test_is_dclosed():
    assert is_dclosed(chain(), chain().points)
    assert not is_dclosed(chain(), ["a1", "a2"])
    assert not is_dclosed(k4(), [])


def test_acl_trace():
    assert acl_trace(chain(), []) == frozenset()
    assert acl_trace(chain(), ["a1", "a2"]) == frozenset(chain().points)


@pytest.mark.parametrize("name", ["examp1", "examp2", "k4-design", "alpha-line-4"])
def test_icl_against_oracle_on_fixtures(name):
    s = fixtures.get(name).structure
    T = oracle_table(s)
    strong = oracle_strong(T)
    for m in range(0, 1 << s.n, max(1, (1 << s.n) // 300)):
        assert s.mask(icl(s, s.names(m)).closure) == oracle_icl(T, strong, m)


triples_st = st.sets(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
                     .filter(lambda t: len(set(t)) == 3).map(lambda t: tuple(sorted(t))), max_size=8)


@settings(max_examples=50, deadline=None)
@given(triples_st, st.integers(0, 63), st.integers(0, 63))
def test_icl_laws(ts, a, b):
    pts = [f"p{i}" for i in range(6)]
    s = Structure.build(Flavor.HYPERGRAPH, pts, [tuple(pts[i] for i in t) for t in ts])
    A, B = s.names(a), s.names(a | b)
    ca, cb = icl(s, A).closure, icl(s, B).closure
    assert A <= ca and is_strong(s, ca)
    assert icl(s, ca).closure == ca
    assert ca <= cb  # monotone
