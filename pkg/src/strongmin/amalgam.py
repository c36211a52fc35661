"""Free amalgamation and a bounded approximation of the generic model."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping

from .core import Embedding, Flavor, Structure, _embed_idx, popcount
from .closure import is_strong
from .errors import BadGlue, BudgetExhausted, LineOverflow, SeedNotAdmissible
from .pairs import MuFunction, in_Lmu, max_packing, pair_code
from .predim import delta_mask, in_K0
from .core import MAX_POINTS


@dataclass(frozen=True)
class AmalgamResult:
    result: Structure
    left_embed: Embedding
    right_embed: Embedding
    identified: tuple = ()


def _fresh(name: str, taken: set) -> str:
    cand = name
    k = 1
    while cand in taken:
        cand = f"{name}_{k}"
        k += 1
    return cand


def free_amalgam(A: Structure, B: Structure, glue: Mapping[str, str], mu: MuFunction | None = None,
                 names: Mapping[str, str] | None = None) -> AmalgamResult:
    """Amalgamate A and B freely over C, where glue maps C inside B onto A.

    Points of B outside the glue keep their names unless they clash with A
    (or `names` renames them explicitly).
    """
    if A.flavor != B.flavor:
        raise BadGlue("factors have different flavors")
    glue = dict(glue)
    for b, a in glue.items():
        if b not in B.index:
            raise BadGlue(f"{b!r} is not a point of the right factor")
        if a not in A.index:
            raise BadGlue(f"{a!r} is not a point of the left factor")
    if len(set(glue.values())) != len(glue):
        raise BadGlue("glue map is not injective")
    cB = B.induced(glue.keys())
    cA = A.induced(glue.values())
    fixed = {cB.index[b]: cA.index[a] for b, a in glue.items()}
    if cB.n != cA.n or len(cB.triples) != len(cA.triples) or not _embed_idx(cB, cA, fixed, limit=1):
        raise BadGlue("glue is not an isomorphism of induced substructures")
    if A.flavor is Flavor.LINEAR and not is_strong(A, glue.values()):
        raise BadGlue("the common part must be strong in the left factor")

    taken = set(A.points)
    rename = {}
    for p in B.points:
        if p in glue:
            rename[p] = glue[p]
        else:
            q = names[p] if names and p in names else _fresh(p, taken)
            if q in taken:
                raise BadGlue(f"name {q!r} already used")
            taken.add(q)
            rename[p] = q
    points = list(A.points) + [rename[p] for p in B.points if p not in glue]
    identified = []
    if A.flavor is Flavor.HYPERGRAPH:
        triples = set(frozenset(t) for t in A.named_triples())
        triples |= {frozenset(rename[p] for p in t) for t in B.named_triples()}
        res = Structure.build(A.flavor, points, [tuple(sorted(t, key=points.index)) for t in triples], A.base)
    else:
        ls = [frozenset(A.names(lm)) for lm in A.line_masks]
        ls += [frozenset(rename[p] for p in B.names(lm)) for lm in B.line_masks]
        cset = set(glue.values())
        # lines sharing two points (necessarily inside C) are the same line
        parent = list(range(len(ls)))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for i, j in combinations(range(len(ls)), 2):
            if len(ls[i] & ls[j] & cset) >= 2:
                parent[find(j)] = find(i)
        groups = {}
        for i, l in enumerate(ls):
            groups.setdefault(find(i), set()).update(l)
        merged = []
        nA = len(A.line_masks)
        for root, pts in groups.items():
            members = [i for i in range(len(ls)) if find(i) == root]
            merged.append(frozenset(pts))
            left = set().union(*(ls[i] for i in members if i < nA)) - cset
            right = set().union(*(ls[i] for i in members if i >= nA)) - cset
            identified.extend((x, y) for x in sorted(left) for y in sorted(right))
        if mu is not None:
            for l in merged:
                if len(l) > mu.line_length:
                    raise LineOverflow(f"merged line has {len(l)} points; mu allows {mu.line_length}")
        order = {p: i for i, p in enumerate(points)}
        res = Structure.from_lines(points, [sorted(l, key=order.get) for l in sorted(merged, key=sorted)], A.base)
    dC = delta_mask(A, A.mask(glue.values()))
    assert delta_mask(res, res.full) == delta_mask(A, A.full) + delta_mask(B, B.full) - dC, \
        "free amalgam is not delta-additive"
    left = Embedding({p: p for p in A.points})
    right = Embedding({p: rename[p] for p in B.points}, frozenset(glue))
    return AmalgamResult(res, left, right, tuple(identified))


# ---------------------------------------------------------------- builder

@dataclass(frozen=True)
class Demand:
    """Realize copies of template (ext over base) with base placed at `at`."""
    template: Structure
    base: tuple
    at: tuple
    label: str = ""

    @property
    def ext(self) -> tuple:
        return tuple(p for p in self.template.points if p not in self.base)


def alpha_demand(flavor, at) -> Demand:
    t = Structure.build(flavor, ("b1", "b2", "x"), [("b1", "b2", "x")])
    return Demand(t, ("b1", "b2"), tuple(at), "alpha")


@dataclass
class BuildResult:
    structure: Structure
    log: list = field(default_factory=list)
    realized: list = field(default_factory=list)


def _chi_at(cur: Structure, d: Demand) -> int:
    fixed = {d.template.index[b]: cur.index[x] for b, x in zip(d.base, d.at)}
    ext = [d.template.index[p] for p in d.ext]
    imgs = {sum(1 << t[i] for i in ext) for t in _embed_idx(d.template, cur, fixed)}
    return len(max_packing([cur.names(m) for m in imgs]))


def build_generic(seed: Structure, mu: MuFunction, budget: int = 20, demands=(), max_ext: int = 4) -> BuildResult:
    """Grow seed by free amalgamation until every demand has chi = mu.

    Demands are served first-in first-out.  Each step glues one fresh copy
    of the demanded pair over its placed base, then re-checks membership in
    L_mu and undoes the step if it fails.
    """
    if budget > MAX_POINTS:
        raise ValueError(f"budget is capped at {MAX_POINTS} points")
    if not in_K0(seed):
        raise SeedNotAdmissible("seed has a subset of negative predimension")
    ok = in_Lmu(seed, mu, max_ext)
    if not ok:
        raise SeedNotAdmissible(f"seed violates the mu bound: {ok.violations[0][1:3]}")
    cur = seed
    res = BuildResult(seed)
    unmet = []
    counter = 0
    queue = deque(demands)
    while queue:
        d = queue.popleft()
        for x in d.at:
            if x not in cur.index:
                raise BadGlue(f"demand base point {x!r} is not in the structure")
        b_tmpl = d.template.mask(d.base)
        a_tmpl = d.template.full & ~b_tmpl
        code = pair_code(d.template, a_tmpl, b_tmpl)
        kind = "alpha" if popcount(a_tmpl) == 1 else "general"
        target = mu.bound_for(code, kind, delta_mask(d.template, b_tmpl))
        if not is_strong(cur, d.at):
            res.log.append(f"skipped: {code.hex} over {{{','.join(d.at)}}} (base not strong)")
            unmet.append(d)
            continue
        have = _chi_at(cur, d)
        if have >= target:
            res.log.append(f"saturated: {code.hex} over {{{','.join(d.at)}}} chi={have} mu={target}")
            continue
        while have < target:
            if cur.n + popcount(a_tmpl) > budget:
                res.log.append(f"budget: {code.hex} over {{{','.join(d.at)}}} chi={have} mu={target}")
                unmet.append(d)
                break
            names = {}
            taken = set(cur.points)
            counter += 1
            for p in d.ext:
                names[p] = _fresh(f"{p}.{counter}", taken)
                taken.add(names[p])
            try:
                step = free_amalgam(cur, d.template, dict(zip(d.base, d.at)), mu, names)
                nxt = step.result
                verdict = in_Lmu(nxt, mu, max_ext)
                reason = "" if verdict else f"violates mu: chi={verdict.violations[0][1]} > {verdict.violations[0][2]}"
            except LineOverflow as e:
                verdict, reason = False, str(e)
            if not verdict:
                res.log.append(f"rejected: {code.hex} over {{{','.join(d.at)}}} ({reason})")
                unmet.append(d)
                break
            cur = nxt
            new = [names[p] for p in d.ext]
            res.log.append(f"realized: {code.hex} over {{{','.join(d.at)}}} as {{{','.join(new)}}}")
            res.realized.append((code, tuple(d.at), tuple(new)))
            have = _chi_at(cur, d)
    res.structure = cur
    assert is_strong(cur, seed.points), "seed is not strong in the result"
    if unmet:
        raise BudgetExhausted(f"{len(unmet)} demand(s) unmet", partial=cur, unmet=unmet, log=res.log)
    return res
