"""Finite structures with one ternary relation, and the exact search kernel.

A Structure is either a plain 3-hypergraph or a linear space (any two points
lie on at most one line).  Points carry names; internally everything is
positional and subsets are handled as int bitmasks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    DuplicateRelation,
    DuplicateTriplePoint,
    LinearityViolation,
    ParseError,
    UnknownPoint,
)

MAX_POINTS = 32
CANON_MAX_POINTS = 24


class Flavor(str, Enum):
    HYPERGRAPH = "hypergraph"
    LINEAR = "linear"


def _key(a, b, c):
    if a > b:
        a, b = b, a
    if b > c:
        b, c = c, b
        if a > b:
            a, b = b, a
    return (a, b, c)


def popcount(m: int) -> int:
    return bin(m).count("1")


def bits(m: int):
    i = 0
    while m:
        if m & 1:
            yield i
        m >>= 1
        i += 1


@dataclass(frozen=True)
class Structure:
    flavor: Flavor
    points: tuple
    triples: tuple
    base: tuple | None = None

    def __post_init__(self):
        flavor = Flavor(self.flavor)
        object.__setattr__(self, "flavor", flavor)
        pts = tuple(str(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(set(pts)) != len(pts):
            raise ParseError("duplicate point names")
        if len(pts) > MAX_POINTS:
            raise ParseError(f"structure has {len(pts)} points; the cap is {MAX_POINTS}")
        n = len(pts)
        seen = set()
        for t in self.triples:
            t = tuple(t)
            if len(t) != 3:
                raise ParseError(f"relation must have 3 points: {t}")
            if len(set(t)) != 3:
                raise DuplicateTriplePoint(f"triple with repeated point: {[pts[i] for i in t]}")
            if not all(0 <= i < n for i in t):
                raise UnknownPoint(f"triple index out of range: {t}")
            k = _key(*t)
            if k in seen:
                raise DuplicateRelation(f"duplicate relation {[pts[i] for i in k]}")
            seen.add(k)
        object.__setattr__(self, "triples", tuple(sorted(seen)))
        if self.base is not None:
            base = tuple(str(b) for b in self.base)
            if len(set(base)) != len(base):
                raise ParseError("base has repeated entries")
            for b in base:
                if b not in pts:
                    raise UnknownPoint(f"base point {b!r} is not declared")
            object.__setattr__(self, "base", base)
        if flavor is Flavor.LINEAR:
            _ = self.line_masks  # validates the unique-line axiom

    # construction helpers

    @classmethod
    def build(cls, flavor, points, triples=(), base=None) -> "Structure":
        """Build from triples given by point names."""
        pts = tuple(points)
        idx = {p: i for i, p in enumerate(pts)}
        out = []
        for t in triples:
            t = tuple(t)
            for p in t:
                if p not in idx:
                    raise UnknownPoint(f"relation references undeclared point {p!r}")
            if len(set(t)) != len(t):
                raise DuplicateTriplePoint(f"triple with repeated point: {list(t)}")
            out.append(tuple(idx[p] for p in t))
        return cls(Flavor(flavor), pts, tuple(out), None if base is None else tuple(base))

    @classmethod
    def from_lines(cls, points, lines, base=None) -> "Structure":
        """Linear space given by its lines; every 3-subset of a line is a triple."""
        triples = []
        for ln in lines:
            triples.extend(combinations(tuple(ln), 3))
        return cls.build(Flavor.LINEAR, points, triples, base)

    # lookups

    @property
    def n(self) -> int:
        return len(self.points)

    @cached_property
    def index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def triple_set(self) -> frozenset:
        return frozenset(self.triples)

    @cached_property
    def triple_masks(self) -> tuple:
        return tuple((1 << a) | (1 << b) | (1 << c) for a, b, c in self.triples)

    @cached_property
    def at(self) -> tuple:
        """at[v] lists the pairs (u, w) with {u, v, w} a triple."""
        acc = [[] for _ in range(self.n)]
        for a, b, c in self.triples:
            acc[a].append((b, c))
            acc[b].append((a, c))
            acc[c].append((a, b))
        return tuple(tuple(x) for x in acc)

    @cached_property
    def full(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def line_masks(self) -> tuple:
        """Lines of a linear space as bitmasks (validates linearity)."""
        thirds: dict = {}
        for a, b, c in self.triples:
            for p, q, r in ((a, b, c), (a, c, b), (b, c, a)):
                thirds.setdefault((p, q), set()).add(r)
        lines = set()
        for (p, q), rest in thirds.items():
            ln = {p, q} | rest
            for t in combinations(sorted(ln), 3):
                if t not in self.triple_set:
                    names = sorted(self.points[i] for i in ln)
                    raise LinearityViolation(
                        f"points {self.points[p]},{self.points[q]} lie on two distinct lines "
                        f"(missing triple {[self.points[i] for i in t]} inside {names})"
                    )
            lines.add(sum(1 << i for i in ln))
        return tuple(sorted(lines))

    @cached_property
    def lines_at(self) -> tuple:
        acc = [[] for _ in range(self.n)]
        for lm in self.line_masks:
            for v in bits(lm):
                acc[v].append(lm)
        return tuple(tuple(x) for x in acc)

    def mask(self, names: Iterable[str] | int | None) -> int:
        if names is None:
            return 0
        if isinstance(names, int):
            return names
        if isinstance(names, str):
            names = [names]
        m = 0
        for p in names:
            try:
                m |= 1 << self.index[p]
            except KeyError:
                raise UnknownPoint(f"unknown point {p!r}") from None
        return m

    def names(self, m: int) -> frozenset:
        return frozenset(self.points[i] for i in bits(m))

    def ordered(self, names) -> list:
        """Names sorted by point order."""
        return [self.points[i] for i in bits(self.mask(names))]

    def named_triples(self) -> list:
        return [tuple(self.points[i] for i in t) for t in self.triples]

    def induced(self, names) -> "Structure":
        m = self.mask(names)
        keep = list(bits(m))
        pos = {v: i for i, v in enumerate(keep)}
        tr = [tuple(pos[x] for x in t) for t, tm in zip(self.triples, self.triple_masks) if tm & m == tm]
        base = None
        if self.base is not None:
            base = tuple(b for b in self.base if self.index[b] in pos)
        return Structure(self.flavor, tuple(self.points[i] for i in keep), tuple(tr), base)

    def relabel(self, mapping: Mapping[str, str]) -> "Structure":
        pts = tuple(mapping.get(p, p) for p in self.points)
        base = None if self.base is None else tuple(mapping.get(b, b) for b in self.base)
        return Structure(self.flavor, pts, self.triples, base)

    def with_base(self, base) -> "Structure":
        return Structure(self.flavor, self.points, self.triples, None if base is None else tuple(base))

    def __repr__(self):
        return f"Structure({self.flavor.value}, {self.n} points, {len(self.triples)} triples)"


# ---------------------------------------------------------------- file format

def parse(text: str, source: str | None = None) -> Structure:
    flavor = points = base = None
    rels = []
    seen_rel = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(f"expected 'key: value', got {line!r}", lineno, source)
        key, _, val = line.partition(":")
        key = key.strip().lower()
        toks = val.split()
        if key == "flavor":
            if flavor is not None:
                raise ParseError("flavor given twice", lineno, source)
            if len(toks) != 1 or toks[0] not in ("hypergraph", "linear"):
                raise ParseError("flavor must be 'hypergraph' or 'linear'", lineno, source)
            flavor = Flavor(toks[0])
        elif key == "points":
            if points is not None:
                raise ParseError("points given twice", lineno, source)
            points = toks
            if len(set(points)) != len(points):
                raise ParseError("duplicate point name", lineno, source)
        elif key == "rel":
            if len(toks) != 3:
                raise ParseError("rel needs exactly 3 points", lineno, source)
            if len(set(toks)) != 3:
                raise DuplicateTriplePoint(f"triple with repeated point: {' '.join(toks)}", lineno, source)
            k = frozenset(toks)
            if k in seen_rel:
                raise DuplicateRelation(
                    f"duplicate rel {' '.join(toks)} (first at line {seen_rel[k]})", lineno, source)
            seen_rel[k] = lineno
            rels.append((lineno, toks))
        elif key == "base":
            if base is not None:
                raise ParseError("base given twice", lineno, source)
            base = toks
        else:
            raise ParseError(f"unknown key {key!r}", lineno, source)
    if flavor is None:
        raise ParseError("missing 'flavor:' line", None, source)
    if points is None:
        points = []
    known = set(points)
    for lineno, toks in rels:
        for p in toks:
            if p not in known:
                raise UnknownPoint(f"relation references undeclared point {p!r}", lineno, source)
    if base is not None:
        for p in base:
            if p not in known:
                raise UnknownPoint(f"base references undeclared point {p!r}", None, source)
    try:
        return Structure.build(flavor, points, [t for _, t in rels], base)
    except ParseError as e:
        if e.source is None and source is not None:
            raise type(e)(str(e), None, source) from None
        raise


def serialize(s: Structure) -> str:
    out = [f"flavor: {s.flavor.value}", "points: " + " ".join(s.points)]
    if s.base is not None:
        out.append("base: " + " ".join(s.base))
    for t in s.named_triples():
        out.append("rel: " + " ".join(t))
    return "\n".join(out) + "\n"


def load(path) -> Structure:
    path = Path(path)
    return parse(path.read_text(encoding="utf-8"), str(path))


# ---------------------------------------------------------------- embeddings

@dataclass(frozen=True)
class Embedding:
    mapping: dict = field(hash=False)
    fixed: frozenset = frozenset()

    @property
    def image(self) -> frozenset:
        return frozenset(self.mapping.values())

    def __call__(self, p):
        return self.mapping[p]


def _search_order(src: Structure, first: list) -> list:
    order = list(first)
    placed = set(order)
    while len(order) < src.n:
        best = None
        for v in range(src.n):
            if v in placed:
                continue
            links = sum(1 for u, w in src.at[v] if u in placed and w in placed)
            touch = sum(1 for u, w in src.at[v] if u in placed or w in placed)
            key = (-links, -touch, -len(src.at[v]), v)
            if best is None or key < best[0]:
                best = (key, v)
        order.append(best[1])
        placed.add(best[1])
    return order


def _embed_idx(src: Structure, dst: Structure, fixed: dict, cand=None, limit=None) -> list:
    """All induced embeddings src -> dst (as tuples indexed by src position).

    fixed maps src index -> dst index; cand, if given, is a list of allowed
    dst-index sets per src vertex.
    """
    n = src.n
    if n > dst.n:
        return []
    order = _search_order(src, sorted(fixed))
    pos = {v: i for i, v in enumerate(order)}
    back = []  # per step: src pairs (u, w) already placed forming a triple with v
    for i, v in enumerate(order):
        back.append([(u, w) for u, w in src.at[v] if pos[u] < i and pos[w] < i])
    dtrip = dst.triple_set
    dat = dst.at
    img = [-1] * n
    used = [False] * dst.n
    out = []

    def rec(i):
        if limit is not None and len(out) >= limit:
            return
        if i == n:
            out.append(tuple(img))
            return
        v = order[i]
        req = back[i]
        if v in fixed:
            choices = (fixed[v],)
        elif cand is not None:
            choices = sorted(cand[v])
        else:
            choices = range(dst.n)
        for x in choices:
            if used[x]:
                continue
            ok = True
            for u, w in req:
                if _key(x, img[u], img[w]) not in dtrip:
                    ok = False
                    break
            if not ok:
                continue
            cnt = 0
            for y, z in dat[x]:
                if used[y] and used[z]:
                    cnt += 1
            if cnt != len(req):
                continue
            img[v] = x
            used[x] = True
            rec(i + 1)
            used[x] = False
            img[v] = -1

    rec(0)
    out.sort()
    return out


def embeddings(src: Structure, dst: Structure, fixed=None) -> list:
    """Induced-substructure embeddings of src into dst extending `fixed`.

    `fixed` is a mapping src-name -> dst-name, or an iterable of names that
    must map to the same name in dst.
    """
    fixed = _fixed_map(src, dst, fixed)
    fixed_names = frozenset(src.points[i] for i in fixed)
    res = []
    for t in _embed_idx(src, dst, fixed):
        res.append(Embedding({src.points[i]: dst.points[t[i]] for i in range(src.n)}, fixed_names))
    return res


def _fixed_map(src, dst, fixed) -> dict:
    if not fixed:
        return {}
    if not isinstance(fixed, Mapping):
        fixed = {p: p for p in fixed}
    out = {}
    for a, b in fixed.items():
        if a not in src.index:
            raise UnknownPoint(f"unknown source point {a!r}")
        if b not in dst.index:
            raise UnknownPoint(f"unknown target point {b!r}")
        out[src.index[a]] = dst.index[b]
    if len(set(out.values())) != len(out):
        raise ValueError("fixed map is not injective")
    return out


def isomorphic(a: Structure, b: Structure) -> bool:
    return a.flavor == b.flavor and a.n == b.n and len(a.triples) == len(b.triples) \
        and bool(_embed_idx(a, b, {}, limit=1))


# ---------------------------------------------------------------- refinement

def _rank(vals) -> list:
    r = {v: i for i, v in enumerate(sorted(set(vals)))}
    return [r[v] for v in vals]


def _refine(s: Structure, colors: list) -> list:
    colors = _rank(colors)
    k = max(colors, default=-1) + 1
    at = s.at
    while True:
        sigs = [
            (colors[v], tuple(sorted((min(colors[u], colors[w]), max(colors[u], colors[w])) for u, w in at[v])))
            for v in range(s.n)
        ]
        new = _rank(sigs)
        k2 = max(new, default=-1) + 1
        if k2 == k:
            return new
        colors, k = new, k2


def _individualize(colors: list, v: int) -> list:
    new = [2 * c + 1 for c in colors]
    new[v] = 2 * colors[v]
    return _rank(new)


# ---------------------------------------------------------------- automorphisms

def automorphisms(s: Structure, pointwise=(), setwise=()) -> list:
    """Automorphisms fixing `pointwise` elementwise and `setwise` as a set.

    `setwise` may also be a list of sets, each to be fixed setwise.  Each
    permutation is a tuple p with p[i] the image of point i.
    """
    pm = s.mask(pointwise)
    if isinstance(setwise, (list, tuple)) and setwise and not isinstance(setwise[0], str):
        sms = [s.mask(x) for x in setwise]
    else:
        sms = [s.mask(setwise)]
    colors = [
        (tuple((sm >> v) & 1 for sm in sms), v if (pm >> v) & 1 else -1)
        for v in range(s.n)
    ]
    colors = _refine(s, colors)
    cells: dict = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, set()).add(v)
    cand = [cells[colors[v]] for v in range(s.n)]
    return _embed_idx(s, s, {}, cand)


def orbits(n: int, perms) -> list:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms:
        for i, j in enumerate(p):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def apply_perm(p, m: int) -> int:
    out = 0
    for i in bits(m):
        out |= 1 << p[i]
    return out


# ---------------------------------------------------------------- canonical codes

@dataclass(frozen=True, order=True)
class CanonCode:
    data: bytes

    @property
    def hex(self) -> str:
        return self.data.hex()

    @classmethod
    def from_hex(cls, h: str) -> "CanonCode":
        return cls(bytes.fromhex(h))

    def __str__(self):
        return self.hex

    def decode(self):
        """Rebuild (structure, marked subsets) with points named p0, p1, ..."""
        d = self.data
        flavor = Flavor.HYPERGRAPH if d[0] == 0 else Flavor.LINEAR
        n, m = d[1], d[2]
        cols = d[3:3 + n]
        rest = d[3 + n:]
        names = tuple(f"p{i}" for i in range(n))
        tr = [tuple(rest[i:i + 3]) for i in range(0, len(rest), 3)]
        s = Structure(flavor, names, tuple(tr))
        marked = [frozenset(names[v] for v in range(n) if (cols[v] >> j) & 1) for j in range(m)]
        return s, marked


def _encode(s: Structure, lab: list, colbits: list, m: int) -> bytes:
    n = s.n
    inv = [0] * n
    for v, p in enumerate(lab):
        inv[p] = v
    head = [0 if s.flavor is Flavor.HYPERGRAPH else 1, n, m]
    head.extend(colbits[inv[p]] for p in range(n))
    tr = sorted(_key(lab[a], lab[b], lab[c]) for a, b, c in s.triples)
    for t in tr:
        head.extend(t)
    return bytes(head)


def canon(s: Structure, marked=()) -> CanonCode:
    """Isomorphism-invariant code of s with an ordered list of marked subsets.

    Individualization-refinement search over the equitable partition, pruned
    by automorphisms discovered at equal leaves.
    """
    if s.n > CANON_MAX_POINTS:
        raise ValueError(f"canon input has {s.n} points; the cap is {CANON_MAX_POINTS}")
    marked = list(marked)
    if len(marked) > 8:
        raise ValueError("at most 8 marked subsets")
    masks = [s.mask(x) for x in marked]
    colbits = [sum(1 << j for j, mk in enumerate(masks) if (mk >> v) & 1) for v in range(s.n)]
    m = len(masks)
    seen: dict = {}
    gens: list = []
    best = [None]

    def leaf(colors):
        code = _encode(s, colors, colbits, m)
        prev = seen.get(code)
        if prev is None:
            seen[code] = colors
        else:
            # colors and prev both send vertices to positions; compose
            inv = [0] * s.n
            for v, p in enumerate(prev):
                inv[p] = v
            gens.append(tuple(inv[colors[v]] for v in range(s.n)))
        if best[0] is None or code < best[0]:
            best[0] = code

    def search(colors, prefix):
        colors = _refine(s, colors)
        k = max(colors, default=-1) + 1
        if k == s.n:
            leaf(colors)
            return
        count = [0] * k
        for c in colors:
            count[c] += 1
        target = next(c for c in range(k) if count[c] > 1)
        cell = [v for v in range(s.n) if colors[v] == target]
        explored = []
        for v in cell:
            if explored:
                stab = [g for g in gens if all(g[x] == x for x in prefix)]
                if stab:
                    orb = orbits(s.n, stab)
                    which = {x: i for i, o in enumerate(orb) for x in o}
                    if any(which[v] == which[w] for w in explored):
                        continue
            explored.append(v)
            search(_individualize(colors, v), prefix + [v])

    search(colbits, [])
    return CanonCode(best[0])
