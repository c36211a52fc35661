"""Linear decompositions, strata/petal trees, flowers and bouquets."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import networkx as nx

from .closure import acl_trace_mask, is_strong
from .core import Flavor, Structure, _embed_idx, apply_perm, automorphisms, bits, popcount
from .errors import DependentBase, IllegalSwap, NotNormal, NotStrongBase, Stuck
from .pairs import (
    MuFunction,
    _base_mask,
    _primitive_masks,
    make_pair,
    max_packing,
    pair_code,
)
from .predim import delta_mask, dim_mask, minimizers


# ---------------------------------------------------------------- chains

@dataclass(frozen=True)
class Step:
    ext: frozenset
    base: frozenset
    extended_base: frozenset | None = None


@dataclass(frozen=True)
class LinearDecomposition:
    ambient: Structure = field(repr=False)
    chain: tuple  # X_0 = I, ..., X_r = all points
    steps: tuple  # steps[n-1] describes X_n minus X_(n-1)

    def __len__(self):
        return len(self.steps)


def _ext_base(s: Structure, a: int, over: int):
    if s.flavor is Flavor.LINEAR and popcount(a) == 1:
        v = next(bits(a))
        for lm in s.lines_at[v]:
            if popcount(lm & over) >= 2:
                return s.names(lm & over)
    return None


def _next_step(s: Structure, x: int, allowed: int):
    """Smallest, then lexicographically least, 0-primitive extension of x.

    Over a strong x every 0-primitive A equals icl(x + p) - x for each p in
    A, so the candidates are the inclusion-minimal sets of that form.
    """
    dx = delta_mask(s, x)
    cands = set()
    for v in bits(allowed & ~x):
        val, lo, _ = minimizers(s, x | (1 << v))
        if val == dx:
            cands.add(lo & ~x)
    minimal = [c for c in cands if not any(d != c and d & c == d for d in cands)]
    if not minimal:
        return None
    return min(minimal, key=lambda m: (popcount(m), list(bits(m))))


def _decompose_masks(s: Structure, start: int, targets) -> list:
    x = start
    chain = [x]
    steps = []
    for target in targets:
        while x != target:
            a = _next_step(s, x, target)
            if a is None:
                raise Stuck(
                    f"no 0-primitive extension of {sorted(s.names(x))}; "
                    "the ambient is not inside the algebraic closure of the base"
                )
            assert _primitive_masks(s, a, x), "closure-minimal extension is not 0-primitive"
            steps.append(Step(s.names(a), s.names(_base_mask(s, a, x)), _ext_base(s, a, x)))
            x |= a
            chain.append(x)
    return chain, steps


def linear_decompose(s: Structure, I, through=None) -> LinearDecomposition:
    """Chain of 0-primitive steps from I to the whole structure.

    If `through` is given the chain first exhausts that set (it must be a
    strong superset of I).
    """
    i = s.mask(I)
    if not is_strong(s, i):
        raise NotStrongBase("the base is not strong in the ambient")
    targets = [s.full]
    if through is not None:
        t = s.mask(through) | i
        targets = [t, s.full]
    chain, steps = _decompose_masks(s, i, targets)
    return LinearDecomposition(s, tuple(s.names(c) for c in chain), tuple(steps))


def reorder(ld: LinearDecomposition, n: int) -> LinearDecomposition:
    """Swap steps n and n+1 (1-based: X_n - X_(n-1) and X_(n+1) - X_n)."""
    s = ld.ambient
    if not 1 <= n < len(ld.steps):
        raise IllegalSwap("step index out of range")
    prev = s.mask(ld.chain[n - 1])
    first, second = ld.steps[n - 1], ld.steps[n]
    if not second.base <= s.names(prev):
        raise IllegalSwap("the later step's base uses the earlier step")
    a1, a2 = s.mask(first.ext), s.mask(second.ext)
    mid = prev | a2
    if not _primitive_masks(s, a2, prev) or not _primitive_masks(s, a1, mid):
        raise IllegalSwap("swapped steps are not 0-primitive")
    steps = list(ld.steps)
    steps[n - 1] = Step(second.ext, s.names(_base_mask(s, a2, prev)), _ext_base(s, a2, prev))
    steps[n] = Step(first.ext, s.names(_base_mask(s, a1, mid)), _ext_base(s, a1, mid))
    chain = list(ld.chain)
    chain[n] = s.names(mid)
    return LinearDecomposition(s, tuple(chain), tuple(steps))


# ---------------------------------------------------------------- trees

@dataclass
class Petal:
    id: str
    stratum: int
    cluster: int
    index: int
    points: frozenset
    base: frozenset
    linear_cluster: bool = False
    copies: list = field(default_factory=list)


@dataclass
class Cluster:
    id: str
    stratum: int
    j: int
    base: frozenset
    petals: list  # petal ids
    code: str
    linear_cluster: bool = False
    copies: list = field(default_factory=list)  # embedded copies below the stratum
    ell: int = 0
    nu: int = 0
    mu: int | None = None
    well_placed: bool = False
    transitive: bool = False
    symmetric: bool | None = None  # linear clusters: full symmetric action

    @property
    def accounting_ok(self):
        if self.mu is None or not self.well_placed:
            return None
        return self.ell + self.nu == self.mu


@dataclass
class TreeDecomposition:
    ambient: Structure = field(repr=False)
    base: tuple
    group: str
    strata: list
    zero_parts: tuple  # (D0, [D1, ..., Dv])
    petals: list
    clusters: list
    j_classes: dict
    height: int
    linear: LinearDecomposition = field(repr=False)
    stratum_of: dict = field(default_factory=dict)

    def petal(self, pid: str) -> Petal:
        for p in self.petals:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def cluster_of(self, p: Petal) -> Cluster:
        return self.clusters_at(p.stratum)[p.cluster - 1]

    def clusters_at(self, m: int) -> list:
        return [c for c in self.clusters if c.stratum == m]

    def star_petals(self, m: int) -> list:
        """(id, points) of the *-petals of stratum m."""
        out = []
        for c in self.clusters_at(m):
            if c.linear_cluster:
                pts = frozenset().union(*(self.petal(p).points for p in c.petals))
                out.append((c.id, pts))
            else:
                out.extend((p, self.petal(p).points) for p in c.petals)
        return out


def group_perms(s: Structure, I, group: str) -> list:
    if group == "pointwise":
        return automorphisms(s, I, ())
    if group == "setwise":
        return automorphisms(s, (), I)
    raise ValueError("group must be 'pointwise' or 'setwise'")


def tree_decompose(s: Structure, I, group: str = "pointwise", mu: MuFunction | None = None) -> TreeDecomposition:
    i = s.mask(I)
    order = [p for p in (s.base or ()) if (i >> s.index[p]) & 1]
    order += [p for p in s.ordered(I) if p not in order]
    if dim_mask(s, i) < popcount(i):
        raise DependentBase("the base is not independent")
    if acl_trace_mask(s, i) != s.full:
        raise NotNormal("the ambient is not inside the algebraic closure of the base")
    perms = group_perms(s, I, group)

    d0 = acl_trace_mask(s, 0)
    ds = [acl_trace_mask(s, 1 << s.index[a]) for a in order]
    zero = d0
    for d in ds:
        zero |= d
    ld = linear_decompose(s, I, through=s.names(zero))

    strat = {v: 0 for v in bits(zero)}
    raw = []  # (stratum, ext mask, base mask, line mask or 0)
    for st in ld.steps:
        a = s.mask(st.ext)
        if a & zero == a:
            continue
        if a & zero:
            raise NotNormal("a chain step straddles the zero stratum")
        if s.flavor is Flavor.LINEAR and popcount(a) == 1:
            v = next(bits(a))
            known = [w for w in strat]
            line = next(lm for lm in s.lines_at[v] if popcount(lm & sum(1 << w for w in known)) >= 2)
            levels = sorted(strat[w] for w in bits(line) if w in strat)
            m = levels[1] + 1
            strat[v] = m
            raw.append((m, a, 0, line))
        else:
            b = s.mask(st.base)
            m = 1 + max((strat[w] for w in bits(b)), default=0)
            for v in bits(a):
                strat[v] = m
            raw.append((m, a, b, 0))
    height = max(strat.values(), default=0)
    below = [0] * (height + 2)  # below[m] = A^m as a mask
    for v, m in strat.items():
        for k in range(m, height + 1):
            below[k] |= 1 << v
    strata = [s.names(below[m]) for m in range(height + 1)]

    # group petals into clusters
    groups: dict = {}
    for m, a, b, line in raw:
        if line:
            ext = line & below[m - 1]
            groups.setdefault((m, "L", line), {"base": ext, "petals": [], "linear": True})["petals"].append(a)
        else:
            # petals of one cluster are copies of each other over B pointwise
            k = 0
            while (m, "P", b, k) in groups and not _same_over(s, groups[(m, "P", b, k)]["petals"][0], a, b):
                k += 1
            groups.setdefault((m, "P", b, k), {"base": b, "petals": [], "linear": False})["petals"].append(a)
    keyed = []
    for (m, kind, *_), g in groups.items():
        rep = g["petals"][0]
        if g["linear"]:
            two = sum(1 << w for w in list(bits(g["base"]))[:2])
            code = pair_code(s, rep, two).hex
        else:
            code = pair_code(s, rep, g["base"]).hex
        first = min(list(bits(x)) for x in g["petals"])
        keyed.append(((m, code, sorted(bits(g["base"])), first), g))
    keyed.sort(key=lambda kg: kg[0])

    petals, clusters = [], []
    j_at: dict = {}
    for (m, code, *_), g in keyed:
        j = j_at[m] = j_at.get(m, 0) + 1
        cid = f"{m}.{j}"
        pts = sorted(g["petals"], key=lambda x: list(bits(x)))
        base = g["base"]
        cl = Cluster(cid, m, j, s.names(base), [], code, g["linear"])
        lower = below[m - 1]
        if g["linear"]:
            ext = list(bits(base))
            cl.copies = [s.names(1 << w) for w in ext[2:]]
            cl.nu = len(ext) - 2
            cl.ell = len(pts)
            if mu is not None:
                cl.mu = mu.alpha_value
            cl.well_placed = is_strong(s, lower) and all(_primitive_masks(s, p, lower) for p in pts)
        else:
            rep = pts[0]
            src = s.induced(rep | base)
            fixed = {src.index[s.points[w]]: w for w in bits(base)}
            ia = [src.index[s.points[w]] for w in bits(rep)]
            imgs = {sum(1 << t[k] for k in ia) for t in _embed_idx(src, s, fixed)}
            inside = [s.names(x) for x in sorted(imgs) if x & lower == x]
            cl.copies = max_packing(inside)
            cl.nu = len(cl.copies)
            cl.ell = len(pts)
            if mu is not None:
                gp = make_pair(s, s.names(rep), s.names(base))
                cl.mu = mu.bound(gp)
            cl.well_placed = is_strong(s, lower) and bool(_primitive_masks(s, rep, lower))
        # transitivity of the group on the petals of the cluster
        first = pts[0]
        reach = {apply_perm(p, first) for p in perms}
        cl.transitive = all(x in reach for x in pts)
        if g["linear"]:
            cl.symmetric = _acts_symmetrically(s, I, group, base, pts)
        for f, a in enumerate(pts, 1):
            pid = f"{m}.{j}.{f}"
            petals.append(Petal(pid, m, j, f, s.names(a), s.names(base), g["linear"], cl.copies))
            cl.petals.append(pid)
        clusters.append(cl)

    # J-classes: clusters of one stratum whose bases are conjugate
    j_classes = {}
    for m in range(1, height + 1):
        cls = [c for c in clusters if c.stratum == m]
        masks = [s.mask(c.base) for c in cls]
        parent = list(range(len(cls)))
        for x in range(len(cls)):
            imgs = {apply_perm(p, masks[x]) for p in perms}
            for y in range(len(cls)):
                if masks[y] in imgs:
                    ry, rx = parent[y], parent[x]
                    while parent[ry] != ry:
                        ry = parent[ry]
                    while parent[rx] != rx:
                        rx = parent[rx]
                    if rx != ry:
                        parent[max(rx, ry)] = min(rx, ry)
        classes: dict = {}
        for x in range(len(cls)):
            r = x
            while parent[r] != r:
                r = parent[r]
            classes.setdefault(r, []).append(cls[x].id)
        j_classes[m] = sorted(classes.values())

    return TreeDecomposition(
        ambient=s,
        base=tuple(order),
        group=group,
        strata=strata,
        zero_parts=(s.names(d0), [s.names(d) for d in ds]),
        petals=petals,
        clusters=clusters,
        j_classes=j_classes,
        height=height,
        linear=ld,
        stratum_of={s.points[v]: m for v, m in strat.items()},
    )


def _same_over(s: Structure, a1: int, a2: int, b: int) -> bool:
    if popcount(a1) != popcount(a2):
        return False
    src = s.induced(a1 | b)
    dst = s.induced(a2 | b)
    fixed = {src.index[s.points[w]]: dst.index[s.points[w]] for w in bits(b)}
    return bool(_embed_idx(src, dst, fixed, limit=1))


def _acts_symmetrically(s: Structure, I, group: str, ext_base: int, pts: list) -> bool:
    """Does the stabilizer of a 2-point base act as the full symmetric group?"""
    two = list(bits(ext_base))[:2]
    fix = s.mask(I) | (1 << two[0]) | (1 << two[1])
    if group == "pointwise":
        perms = automorphisms(s, fix, ())
    else:
        perms = automorphisms(s, (1 << two[0]) | (1 << two[1]), s.mask(I))
    cluster = [next(bits(a)) for a in pts]
    cset = set(cluster)
    acts = set()
    for p in perms:
        if {p[v] for v in cluster} != cset:
            return False
        acts.add(tuple(p[v] for v in cluster))
    return len(acts) == len(list(permutations(cluster)))


def determines(td: TreeDecomposition, petal: str):
    """The unique lower *-petal meeting B - A^(m-1) for a petal at stratum >= 2."""
    p = td.petal(petal)
    m = p.stratum - 1
    if m < 1:
        return None
    lower = td.ambient.mask(td.strata[m - 1])
    rest = td.ambient.mask(p.base) & ~lower
    hits = [pid for pid, pts in td.star_petals(m) if td.ambient.mask(pts) & rest]
    return hits[0] if len(hits) == 1 else None


def independence_violations(td: TreeDecomposition) -> list:
    """Relations joining two distinct *-petals of one stratum (should be none)."""
    s = td.ambient
    bad = []
    for m in range(1, td.height + 1):
        owner = {}
        for pid, pts in td.star_petals(m):
            for v in bits(s.mask(pts)):
                owner[v] = pid
        if s.flavor is Flavor.HYPERGRAPH:
            rels = s.triple_masks
        else:
            rels = s.line_masks
        for r in rels:
            ids = {owner[v] for v in bits(r) if v in owner}
            if len(ids) > 1:
                bad.append((m, sorted(ids), sorted(s.names(r))))
    return bad


def line_strata_violations(td: TreeDecomposition) -> list:
    """Full lines meeting more than three strata (linear spaces only)."""
    s = td.ambient
    bad = []
    for lm in s.line_masks:
        levels = {td.stratum_of[s.points[v]] for v in bits(lm)}
        if len(levels) > 3:
            bad.append((sorted(s.names(lm)), sorted(levels)))
    return bad


# ---------------------------------------------------------------- flowers

@dataclass
class Flower:
    pair: object
    base_arrangement: tuple
    petals: list
    certificates: list
    within_bound: bool | None = None


@dataclass
class Bouquet:
    flowers: list
    law_ok: bool = True


def flowers_and_bouquet(s: Structure, gp, group_base, mu: MuFunction | None = None) -> Bouquet:
    """Flowers of A/B over the base arrangements of the setwise stabilizer."""
    border = s.ordered(gp.B)
    src = s.induced(gp.A | gp.B)
    ia = [src.index[p] for p in sorted(gp.A, key=s.index.get)]
    perms = automorphisms(s, (), [s.mask(group_base), s.mask(gp.B)])
    arrangements = sorted({tuple(p[s.index[b]] for b in border) for p in perms})
    flowers = []
    seen = {}
    for arr in arrangements:
        fixed = {src.index[b]: x for b, x in zip(border, arr)}
        imgs = sorted({sum(1 << t[k] for k in ia) for t in _embed_idx(src, s, fixed)}, key=lambda m: list(bits(m)))
        key = frozenset(imgs)
        if key in seen:
            continue
        seen[key] = True
        pets = [s.names(m) for m in imgs]
        G = nx.Graph()
        G.add_nodes_from(range(len(pets)))
        for x in range(len(pets)):
            for y in range(x + 1, len(pets)):
                if not pets[x] & pets[y]:
                    G.add_edge(x, y)
        certs = sorted(sorted(c) for c in nx.find_cliques(G))
        fl = Flower(gp, tuple(s.points[x] for x in arr), pets, [[pets[k] for k in c] for c in certs])
        if mu is not None:
            fl.within_bound = len(pets) <= mu.bound(gp) + gp.delta_B
        flowers.append(fl)
    law = True
    for x in range(len(flowers)):
        for y in range(x + 1, len(flowers)):
            if set(flowers[x].petals) & set(flowers[y].petals):
                law = False
    assert law, "two distinct flowers share a petal"
    return Bouquet(flowers, law)
