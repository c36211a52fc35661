import pytest

from strongmin import fixtures
from strongmin.amalgam import Demand, alpha_demand, build_generic, free_amalgam
from strongmin.closure import is_strong
from strongmin.core import Flavor, Structure, serialize
from strongmin.errors import BadGlue, BudgetExhausted, LineOverflow, SeedNotAdmissible
from strongmin.pairs import MuFunction, in_Lmu
from strongmin.predim import delta, in_K0
from strongmin.properties import prop_amalgam, random_structures

H, L = Flavor.HYPERGRAPH, Flavor.LINEAR


def test_two_alpha_extensions_hypergraph():
    A = Structure.build(H, ["b1", "b2", "x"], [("b1", "b2", "x")])
    res = free_amalgam(A, A, {"b1": "b1", "b2": "b2"}).result
    assert res.n == 4 and delta(res, res.points) == 2
    assert len(res.triples) == 2


def test_partial_lines_merge():
    A = Structure.from_lines(["b1", "b2", "x"], [["b1", "b2", "x"]])
    out = free_amalgam(A, A, {"b1": "b1", "b2": "b2"})
    res = out.result
    assert res.n == 4 and len(res.line_masks) == 1
    assert delta(res, res.points) == 2
    assert out.identified == (("x", "x_1"),)


def test_line_overflow_needs_mu():
    A = Structure.from_lines(["b1", "b2", "x"], [["b1", "b2", "x"]])
    with pytest.raises(LineOverflow):
        free_amalgam(A, A, {"b1": "b1", "b2": "b2"}, MuFunction(1))
    free_amalgam(A, A, {"b1": "b1", "b2": "b2"}, MuFunction(2))


def test_bad_glue():
    A = Structure.build(H, ["b1", "b2", "x"], [("b1", "b2", "x")])
    with pytest.raises(BadGlue):
        free_amalgam(A, A, {"b1": "b1", "x": "x", "b2": "b1"})
    with pytest.raises(BadGlue):
        free_amalgam(A, A, {"zz": "b1"})
    B = Structure.build(H, ["p", "q", "r"], [])
    with pytest.raises(BadGlue):
        free_amalgam(A, B, {"p": "b1", "q": "b2", "r": "x"})


def test_right_factor_strong_in_result():
    s = fixtures.get("examp1").structure
    A = s.induced(["a1", "a2", "b1", "b2"])
    B = s.induced(["b1", "b2", "c1", "c2"])
    res = free_amalgam(A, B, {"b1": "b1", "b2": "b2"}).result
    assert in_K0(res)
    assert is_strong(res, ["b1", "b2", "c1", "c2"])


def test_prop_amalgam_random():
    structs = random_structures(4, 60, H) + random_structures(4, 60, L)
    r = prop_amalgam(structs, 4)
    assert r.ok, r.violations[:2]


@pytest.mark.parametrize("k", [3, 4, 5])
def test_alpha_lines_close_at_k(k):
    seed = Structure.build(L, ["a1", "a2"], [])
    res = build_generic(seed, MuFunction(k - 2), 20, [alpha_demand(L, ["a1", "a2"])])
    s = res.structure
    assert s.n == k and [bin(m).count("1") for m in s.line_masks] == [k]
    assert all(line.startswith("realized:") for line in res.log)
    assert in_Lmu(s, MuFunction(k - 2), 4)


def test_fixture_seed_unchanged():
    fx = fixtures.get("examp2")
    res = build_generic(fx.structure, fx.mu)
    assert serialize(res.structure) == serialize(fx.structure)
    assert res.realized == []


def test_saturated_pair_gets_no_copy():
    s = fixtures.get("examp1").structure
    d = Demand(s.induced(["b1", "b2", "c1", "c2"]), ("b1", "b2"), ("b1", "b2"))
    res = build_generic(s, MuFunction(2, default=0), 20, [d])
    assert res.structure.n == s.n
    assert res.log[0].startswith("saturated:")


def test_seed_not_admissible():
    s = fixtures.get("examp1").structure
    with pytest.raises(SeedNotAdmissible):
        build_generic(s, MuFunction(1, default=0))


def test_budget_exhausted_keeps_partial():
    seed = Structure.build(L, ["a1", "a2"], [])
    with pytest.raises(BudgetExhausted) as e:
        build_generic(seed, MuFunction(3), 3, [alpha_demand(L, ["a1", "a2"])])
    assert e.value.partial.n == 3 and e.value.unmet


def test_build_is_deterministic():
    seed = Structure.build(H, ["a1", "a2"], [])
    runs = [build_generic(seed, MuFunction(2), 12, [alpha_demand(H, ["a1", "a2"])]) for _ in range(2)]
    assert serialize(runs[0].structure) == serialize(runs[1].structure)
    assert runs[0].log == runs[1].log
