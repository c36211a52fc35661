"""0-primitive extensions, good pairs, copy counts and mu-functions."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import NamedTuple

import networkx as nx

from .core import CanonCode, Flavor, Structure, _embed_idx, bits, canon, popcount
from .errors import (
    Ambiguous,
    EmptyExtension,
    NotAlphaPoint,
    NotPrimitive,
    ParseError,
    UnresolvedCode,
)
from .predim import delta_mask, minimizers

MAX_EXT = 6


class Verdict(NamedTuple):
    ok: bool
    witness: frozenset | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def _sub_deltas(s: Structure, a: int, b: int) -> dict:
    """delta(A'/B) for every A' contained in a (keyed by mask)."""
    db = delta_mask(s, b)
    av = list(bits(a))
    out = {}
    for k in range(1 << len(av)):
        m = 0
        for i, v in enumerate(av):
            if (k >> i) & 1:
                m |= 1 << v
        out[m] = delta_mask(s, b | m) - db
    return out


def _primitive_masks(s: Structure, a: int, d: int) -> Verdict:
    t_mask = a | d
    t = s.induced(t_mask)
    # positions inside t
    pos = {v: i for i, v in enumerate(bits(t_mask))}
    ta = sum(1 << pos[v] for v in bits(a))
    td = sum(1 << pos[v] for v in bits(d))
    dd = delta_mask(t, td)
    val, lo, _ = minimizers(t, td)
    back = {i: v for v, i in pos.items()}

    def outer(m):
        return s.names(sum(1 << back[i] for i in bits(m)))

    if val != dd:
        return Verdict(False, outer(lo & ~td), "base is not strong in base+extension")
    if delta_mask(t, td | ta) != dd:
        return Verdict(False, None, "relative predimension is not 0")
    for v in bits(ta):
        _, lo, _ = minimizers(t, td | (1 << v))
        if lo != td | ta:
            return Verdict(False, outer(lo & ~td), "proper strong intermediate extension")
    return Verdict(True)


def is_primitive(s: Structure, A, D) -> Verdict:
    """Is A a 0-primitive extension of D (inside the substructure on D u A)?

    Once D is strong and delta(A/D) = 0, any proper A0 with D <= D u A0 <= D u A
    shows up as icl(D u {p}) for a point p of A0, so one closure per point
    of A decides primitivity.
    """
    a, d = s.mask(A), s.mask(D)
    if not a:
        raise EmptyExtension("extension must be nonempty")
    if a & d:
        raise ValueError("extension and base must be disjoint")
    return _primitive_masks(s, a, d)


def _line_of(s: Structure, u: int, v: int):
    for lm in s.lines_at[u]:
        if (lm >> v) & 1:
            return lm
    return 0


def extended_base(s: Structure, a, D) -> frozenset:
    if s.flavor is not Flavor.LINEAR:
        raise NotAlphaPoint("extended bases exist only in linear spaces")
    if not isinstance(a, str):
        (a,) = tuple(a)
    v = s.index[a]
    d = s.mask(D) & ~(1 << v)
    hits = [lm for lm in s.lines_at[v] if popcount(lm & d) >= 2]
    if not hits:
        raise NotAlphaPoint(f"no line through {a} meets the base in 2 points")
    if len(hits) > 1:
        raise Ambiguous(f"{a} lies on two lines based in D; the structure is corrupt")
    return s.names(hits[0] & d)


def _base_mask(s: Structure, a: int, d: int) -> int:
    if s.flavor is Flavor.HYPERGRAPH:
        u = a | d
        out = 0
        for tm in s.triple_masks:
            if tm & u == tm and tm & a:
                out |= tm & d
        return out
    if popcount(a) == 1:
        v = next(bits(a))
        hits = [lm for lm in s.lines_at[v] if popcount(lm & d) >= 2]
        if len(hits) != 1:
            raise NotAlphaPoint("point is not an alpha-extension of the base")
        ext = hits[0] & d
        two = list(bits(ext))[:2]
        return (1 << two[0]) | (1 << two[1])
    out = 0
    for lm in s.line_masks:
        if popcount(lm & a) >= 2:
            out |= lm & d
    return out


def find_base(s: Structure, A, D) -> frozenset:
    a, d = s.mask(A), s.mask(D)
    if not _primitive_masks(s, a, d):
        raise NotPrimitive("extension is not 0-primitive over the given set")
    return s.names(_base_mask(s, a, d))


# ---------------------------------------------------------------- good pairs

@dataclass(frozen=True)
class GoodPair:
    ambient: Structure = field(compare=False, repr=False)
    A: frozenset
    B: frozenset
    kind: str  # "alpha" or "general"
    code: CanonCode
    extended_base: frozenset | None = None
    certificate: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def delta_B(self) -> int:
        return delta_mask(self.ambient, self.ambient.mask(self.B))

    @property
    def structure(self) -> Structure:
        return self.ambient.induced(self.A | self.B)


def pair_code(s: Structure, a: int, b: int) -> CanonCode:
    return canon(s.induced(a | b), [s.names(b), s.names(a)])


def make_pair(s: Structure, A, B) -> GoodPair:
    """Validate (A, B) as a good pair of s and package it."""
    a, b = s.mask(A), s.mask(B)
    cert = _good_certificate(s, a, b)
    if cert is None:
        raise NotPrimitive("not a good pair")
    return _package(s, a, b, cert)


def _package(s, a, b, cert) -> GoodPair:
    kind = "alpha" if popcount(a) == 1 else "general"
    ext = None
    if kind == "alpha" and s.flavor is Flavor.LINEAR:
        v = next(bits(a))
        ext = s.names(_line_of(s, v, next(bits(b))) & b)
    return GoodPair(s, s.names(a), s.names(b), kind, pair_code(s, a, b), ext, cert)


def _related(s: Structure, a: int, b: int) -> bool:
    u = a | b
    rel = 0
    for tm in s.triple_masks:
        if tm & u == tm and tm & a:
            rel |= tm
    return rel & b == b


def _good_certificate(s: Structure, a: int, b: int):
    if not a or a & b:
        return None
    sub = _sub_deltas(s, a, b)
    if sub[a] != 0 or min(sub.values()) < 0:
        return None
    if any(v == 0 for m, v in sub.items() if m and m != a):
        return None
    if not _related(s, a, b):
        return None
    return {"delta_rel": 0, "min_sub_delta": min(sub.values()), "subsets_checked": len(sub)}


def _connected_sets(s: Structure, max_size: int):
    adj = [0] * s.n
    for a, b, c in s.triples:
        adj[a] |= (1 << b) | (1 << c)
        adj[b] |= (1 << a) | (1 << c)
        adj[c] |= (1 << a) | (1 << b)
    level = {1 << v for v in range(s.n)}
    out = list(level)
    for _ in range(max_size - 1):
        nxt = set()
        for m in level:
            nb = 0
            for v in bits(m):
                nb |= adj[v]
            nb &= ~m
            for v in bits(nb):
                nxt.add(m | (1 << v))
        level = nxt
        out.extend(level)
    return sorted(out, key=lambda m: (popcount(m), m))


def _gain(s: Structure, a: int, b: int) -> int:
    return popcount(a) - (delta_mask(s, a | b) - delta_mask(s, b))


def _candidate_bases(s: Structure, a: int):
    k = popcount(a)
    found = set()
    if s.flavor is Flavor.HYPERGRAPH:
        touching = [tm for tm in s.triple_masks if tm & a]
        for T in combinations(touching, k):
            u = 0
            for tm in T:
                u |= tm
            if u & a != a:
                continue
            b = u & ~a
            if b not in found and _gain(s, a, b) == k:
                found.add(b)
        return sorted(found)
    lines = [(lm, popcount(lm & a), lm & ~a) for lm in s.line_masks if lm & a]

    def rec(i, b, gain_bound):
        if i == len(lines):
            if b and b not in found and _gain(s, a, b) == k:
                found.add(b)
            return
        rec(i + 1, b, gain_bound)
        lm, x, outside = lines[i]
        if gain_bound >= k:
            return
        need = max(0, 3 - x)
        free = list(bits(outside))
        for r in range(max(need, 1), len(free) + 1):
            for T in combinations(free, r):
                tb = sum(1 << v for v in T)
                rec(i + 1, b | tb, gain_bound + 1)

    rec(0, 0, 0)
    if k == 1 and not found:
        return []
    return sorted(found)


def iter_good_pair_instances(s: Structure, max_ext: int = 4):
    if max_ext > MAX_EXT:
        raise ValueError(f"max_ext is capped at {MAX_EXT}")
    for a in _connected_sets(s, max_ext):
        for b in _candidate_bases(s, a):
            cert = _good_certificate(s, a, b)
            if cert is not None:
                yield a, b, cert


def good_pair_instances(s: Structure, max_ext: int = 4):
    """Every good pair (A, B) of s with |A| <= max_ext, as mask pairs."""
    return list(iter_good_pair_instances(s, max_ext))


def enumerate_good_pairs(s: Structure, max_ext: int = 4) -> list:
    seen = {}
    for a, b, cert in good_pair_instances(s, max_ext):
        gp = _package(s, a, b, cert)
        if gp.code not in seen:
            seen[gp.code] = gp
    return sorted(seen.values(), key=lambda g: (len(g.A), len(g.B), g.code))


# ---------------------------------------------------------------- copies

def copies(s: Structure, gp: GoodPair) -> list:
    """Distinct images of A over B (B fixed pointwise) in s, as name sets."""
    src = gp.structure
    fixed = {src.index[p]: s.index[p] for p in gp.B}
    ia = [src.index[p] for p in gp.A]
    imgs = set()
    for t in _embed_idx(src, s, fixed):
        imgs.add(sum(1 << t[i] for i in ia))
    return [s.names(m) for m in sorted(imgs)]


def max_packing(sets) -> list:
    """A maximum family of pairwise disjoint sets (exact)."""
    sets = [frozenset(x) for x in sets]
    if len(sets) <= 1:
        return list(sets)
    G = nx.Graph()
    G.add_nodes_from(range(len(sets)))
    for i, j in combinations(range(len(sets)), 2):
        if not sets[i] & sets[j]:
            G.add_edge(i, j)
    clique, _ = nx.max_weight_clique(G, weight=None)
    return [sets[i] for i in sorted(clique)]


def chi(s: Structure, gp: GoodPair) -> int:
    return len(max_packing(copies(s, gp)))


# ---------------------------------------------------------------- mu

@dataclass(frozen=True)
class MuFunction:
    alpha_value: int
    explicit: tuple = ()  # sorted (CanonCode, int) pairs
    default: int | None = 0  # bound = delta(B) + default; None means no default

    def __post_init__(self):
        if self.alpha_value < 1:
            raise ValueError("mu(alpha) must be at least 1")
        if isinstance(self.explicit, dict):
            object.__setattr__(self, "explicit", tuple(sorted(self.explicit.items())))
        if self.default is not None and self.default < 0:
            raise ValueError("default rule must be delta or delta+k with k >= 0")
        for code, v in self.explicit:
            st, (b, a) = code.decode()
            if len(a) >= 2 and v < delta_mask(st, st.mask(b)):
                raise ValueError(f"explicit bound {v} below delta of the base for {code.hex[:16]}...")

    @property
    def table(self) -> dict:
        return dict(self.explicit)

    @property
    def line_length(self) -> int:
        return self.alpha_value + 2

    def bound_for(self, code: CanonCode, kind: str, delta_B: int) -> int:
        if kind == "alpha":
            return self.alpha_value
        tbl = self.table
        if code in tbl:
            return tbl[code]
        if self.default is None:
            raise UnresolvedCode(f"no bound for pair code {code.hex}")
        return delta_B + self.default

    def bound(self, gp: GoodPair) -> int:
        return self.bound_for(gp.code, gp.kind, gp.delta_B)

    def with_explicit(self, extra: dict) -> "MuFunction":
        tbl = self.table
        tbl.update(extra)
        return MuFunction(self.alpha_value, tbl, self.default)

    def serialize(self) -> str:
        out = [f"alpha: {self.alpha_value}"]
        if self.default is not None:
            out.append("default: delta" if self.default == 0 else f"default: delta+{self.default}")
        for code, v in self.explicit:
            out.append(f"pair: {code.hex} {v}")
        return "\n".join(out) + "\n"


def parse_mu(text: str, source=None) -> MuFunction:
    alpha = None
    default = None
    explicit = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition(":")
        if not sep:
            raise ParseError(f"expected 'key: value', got {line!r}", lineno, source)
        key, val = key.strip(), val.strip()
        if key == "alpha":
            if not val.isdigit():
                raise ParseError("alpha needs a nonnegative integer", lineno, source)
            alpha = int(val)
        elif key == "default":
            m = re.fullmatch(r"delta(?:\s*\+\s*(\d+))?", val)
            if not m:
                raise ParseError("default must be 'delta' or 'delta+<k>'", lineno, source)
            default = int(m.group(1) or 0)
        elif key == "pair":
            toks = val.split()
            if len(toks) != 2 or not toks[1].isdigit():
                raise ParseError("pair needs '<hex code> <int>'", lineno, source)
            try:
                code = CanonCode.from_hex(toks[0])
            except ValueError:
                raise ParseError("bad hex code", lineno, source) from None
            explicit[code] = int(toks[1])
        else:
            raise ParseError(f"unknown key {key!r}", lineno, source)
    if alpha is None:
        raise ParseError("missing 'alpha:' line", None, source)
    try:
        return MuFunction(alpha, explicit, default)
    except ValueError as e:
        raise ParseError(str(e), None, source) from None


def load_mu(path) -> MuFunction:
    path = Path(path)
    return parse_mu(path.read_text(encoding="utf-8"), str(path))


class LmuResult(NamedTuple):
    ok: bool
    violations: list  # of (code, chi, mu, A, B)

    def __bool__(self):
        return self.ok


def in_Lmu(s: Structure, mu: MuFunction, max_ext: int = 4) -> LmuResult:
    """chi <= mu for every good pair with |A| <= max_ext."""
    violations = []
    done = set()
    for a, b, _ in good_pair_instances(s, max_ext):
        if (a, b) in done:
            continue
        kind = "alpha" if popcount(a) == 1 else "general"
        gp = GoodPair(s, s.names(a), s.names(b), kind, pair_code(s, a, b))
        imgs = copies(s, gp)
        # every image over the same base is the same pair type with the same chi
        done.update((s.mask(x), b) for x in imgs)
        c = len(max_packing(imgs))
        bound = mu.bound(gp)
        if c > bound:
            violations.append((gp.code, c, bound, gp.A, gp.B))
    return LmuResult(not violations, violations)


def triples_in(s: Structure, mu: MuFunction, max_ext: int = 4) -> bool:
    """mu_triples over the pairs realized in s, stopping at the first failure."""
    for a, b, _ in iter_good_pair_instances(s, max_ext):
        if popcount(a) > 1 and delta_mask(s, b) == 2 and mu.bound_for(pair_code(s, a, b), "general", 2) < 3:
            return False
    return True


def mu_triples(mu: MuFunction, catalog) -> bool:
    for gp in catalog:
        if len(gp.A) > 1 and gp.delta_B == 2 and mu.bound(gp) < 3:
            return False
    return True
