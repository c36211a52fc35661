"""Predimension, relation counts, lines and the dimension function.

For a hypergraph, delta(A) = |A| - (number of triples inside A).  For a linear
space, delta(A) = |A| - sum over lines l of A of (|l| - 2), where the lines of
A are the maximal cliques of size >= 3 of the induced substructure.

dim(A) is the least delta of a superset of A inside the structure.  It is
computed exactly: by a full subset table for at most EXHAUSTIVE_MAX points and
by a minimum s-t cut above that.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import networkx as nx
import numpy as np

from .core import Flavor, Structure, bits, popcount
from .errors import BadIntersection, TooManySets

EXHAUSTIVE_MAX = 16


@dataclass(frozen=True)
class LineSet:
    lines: tuple  # of frozensets

    def support(self, B) -> tuple:
        B = frozenset(B)
        return tuple(l for l in self.lines if len(l & B) >= 2)

    def __len__(self):
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)


def _clique_masks(s: Structure, m: int) -> list:
    """Maximal R-cliques of size >= 3 inside mask m, by direct search."""
    if s.flavor is Flavor.LINEAR:
        out = []
        for lm in s.line_masks:
            x = lm & m
            if popcount(x) >= 3:
                out.append(x)
        return out
    tset = s.triple_set
    found = set()

    def grow(clique, cands):
        ext = False
        for x in list(cands):
            if all(tuple(sorted((x, u, w))) in tset for u, w in combinations(clique, 2)):
                ext = True
                grow(clique + [x], [y for y in cands if y > x])
        if not ext:
            found.add(sum(1 << v for v in clique))

    for (a, b, c), tm in zip(s.triples, s.triple_masks):
        if tm & m == tm:
            grow([a, b, c], [v for v in bits(m & ~tm)])
    maximal = [c for c in found if not any(c != d and c & d == c for d in found)]
    return sorted(maximal)


def lines(s: Structure, A=None) -> LineSet:
    """Maximal cliques of size >= 3 of the substructure induced on A."""
    m = s.full if A is None else s.mask(A)
    return LineSet(tuple(s.names(x) for x in _clique_masks(s, m)))


# ---------------------------------------------------------------- counts

def rcount(s: Structure, A, B, C) -> int:
    """Number of triples of s meeting each of A, B and C."""
    a, b, c = s.mask(A), s.mask(B), s.mask(C)
    return sum(1 for t in s.triple_masks if t & a and t & b and t & c)


def delta_mask(s: Structure, m: int) -> int:
    if s.flavor is Flavor.HYPERGRAPH:
        return popcount(m) - sum(1 for t in s.triple_masks if t & m == t)
    d = popcount(m)
    for lm in s.line_masks:
        k = popcount(lm & m)
        if k > 2:
            d -= k - 2
    return d


def delta(s: Structure, A) -> int:
    return delta_mask(s, s.mask(A))


def delta_rel(s: Structure, B, A) -> int:
    """delta(B/A) = delta(A u B) - delta(A)."""
    a = s.mask(A)
    return delta_mask(s, a | s.mask(B)) - delta_mask(s, a)


# ---------------------------------------------------------------- minimisation

class _Table:
    """delta of every subset, and the superset-minimum transform."""

    def __init__(self, s: Structure):
        n = s.n
        N = 1 << n
        masks = np.arange(N, dtype=np.int64)
        bitv = [((masks >> b) & 1).astype(np.int16) for b in range(n)]
        d = np.zeros(N, dtype=np.int16)
        for b in bitv:
            d += b
        if s.flavor is Flavor.HYPERGRAPH:
            for tm in s.triple_masks:
                d -= ((masks & tm) == tm).astype(np.int16)
        else:
            for lm in s.line_masks:
                k = np.zeros(N, dtype=np.int16)
                for b in bits(lm):
                    k += bitv[b]
                d -= np.maximum(k - 2, 0)
        sup = d.copy()
        for b in range(n):
            v = sup.reshape(-1, 2, 1 << b)
            np.minimum(v[:, 0, :], v[:, 1, :], out=v[:, 0, :])
        self.masks = masks
        self.delta = d
        self.supmin = sup

    def minimizers(self, m: int):
        val = int(self.supmin[m])
        sel = ((self.masks & m) == m) & (self.delta == val)
        hits = self.masks[sel]
        return val, int(np.bitwise_and.reduce(hits)), int(np.bitwise_or.reduce(hits))


@lru_cache(maxsize=128)
def _table(s: Structure) -> _Table:
    return _Table(s)


def _mincut(s: Structure, m: int):
    """Exact min of delta over supersets of m, via a minimum s-t cut.

    Returns (value, minimal minimizer, maximal minimizer).
    """
    G = nx.DiGraph()
    G.add_node("S")
    G.add_node("T")
    const = 0
    if s.flavor is Flavor.HYPERGRAPH:
        # |Y| - #{e inside Y} = |Y| + #{e not inside Y} - |E|
        const = -len(s.triples)
        for v in range(s.n):
            G.add_edge(("y", v), "T", capacity=1)
        for i, t in enumerate(s.triples):
            G.add_edge("S", ("t", i), capacity=1)
            for v in t:
                G.add_edge(("t", i), ("y", v))
    else:
        # delta(Y) = sum_y (1 - lambda(y)) + sum_l min(|l & Y|, 2)
        for v in range(s.n):
            c = 1 - len(s.lines_at[v])
            G.add_node(("y", v))
            if c > 0:
                G.add_edge(("y", v), "T", capacity=c)
            elif c < 0:
                G.add_edge("S", ("y", v), capacity=-c)
                const += c
        for i, lm in enumerate(s.line_masks):
            G.add_edge(("t", i), "T", capacity=2)
            for v in bits(lm):
                G.add_edge(("y", v), ("t", i), capacity=1)
    for v in bits(m):
        if G.has_edge("S", ("y", v)):
            del G["S"][("y", v)]["capacity"]
        else:
            G.add_edge("S", ("y", v))
    R = nx.algorithms.flow.edmonds_karp(G, "S", "T")
    value = R.graph["flow_value"] + const

    def reach(start, forward):
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            nbrs = R.succ[u] if forward else R.pred[u]
            for w, attr in nbrs.items():
                e = attr if forward else R[w][u]
                if e["capacity"] - e["flow"] > 0 and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    src = reach("S", True)
    to_sink = reach("T", False)
    lo = sum(1 << v for v in range(s.n) if ("y", v) in src)
    hi = sum(1 << v for v in range(s.n) if ("y", v) not in to_sink)
    return int(value), lo, hi


def minimizers(s: Structure, m: int, method: str = "auto"):
    """(min delta over supersets of m, least minimizer, greatest minimizer)."""
    if method == "auto":
        method = "table" if s.n <= EXHAUSTIVE_MAX else "mincut"
    if method == "table":
        return _table(s).minimizers(m)
    return _mincut(s, m)


def dim_mask(s: Structure, m: int) -> int:
    if s.n <= EXHAUSTIVE_MAX:
        return int(_table(s).supmin[m])
    return _mincut(s, m)[0]


def dim(s: Structure, A) -> int:
    return dim_mask(s, s.mask(A))


def in_K0(s: Structure) -> bool:
    """Hereditarily non-negative delta."""
    return minimizers(s, 0)[0] >= 0


# ---------------------------------------------------------------- independence

def independence(s: Structure, A, B, C) -> dict:
    a, b, c = s.mask(A), s.mask(B), s.mask(C)
    if a & b != c:
        raise BadIntersection("A and B must intersect exactly in C")
    u = a | b
    dind = delta_mask(s, u) == delta_mask(s, a) + delta_mask(s, b) - delta_mask(s, c)
    ac, bc = a & ~c, b & ~c
    cross = sum(1 for t in s.triple_masks if t & u == t and t & ac and t & bc)
    full = cross == 0
    if s.flavor is Flavor.HYPERGRAPH:
        # here the two notions coincide: delta counts exactly the cross triples
        assert dind == full
    return {"delta_independent": dind, "fully_independent": full}


def check_flat(s: Structure, F) -> bool:
    F = [s.mask(x) for x in F]
    if not 1 <= len(F) <= 5:
        raise TooManySets("flatness is checked for 1 to 5 sets")
    union = 0
    for x in F:
        union |= x
    rhs = 0
    for k in range(1, len(F) + 1):
        for T in combinations(F, k):
            inter = T[0]
            for x in T[1:]:
                inter &= x
            rhs += (-1) ** (k + 1) * delta_mask(s, inter)
    return delta_mask(s, union) <= rhs
