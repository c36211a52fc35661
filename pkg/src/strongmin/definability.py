"""Orbits under the stabilizers of a base, dcl*/sdcl* traces and safety.

The ambient is taken to be normal for the group in question, so an
automorphism of it is the restriction of an automorphism of the generic
model and fixed points inside it are exactly the definable ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from math import factorial

from .closure import acl_trace_mask
from .core import Flavor, Structure, apply_perm, automorphisms, bits, orbits, popcount
from .errors import LineTooShort, NoCertificate, StrongMinError
from .predim import dim_mask

YES, NO, UNDETERMINED = "yes", "no", "undetermined"


class Normality(str, Enum):
    CERTIFIED = "certified"
    ASSUMED = "assumed"


def _normality(value) -> Normality:
    if value is None:
        raise NoCertificate("the ambient needs a normality certificate or an explicit 'assumed' flag")
    return Normality(value)


@dataclass(frozen=True)
class ElementVerdict:
    orbit: frozenset
    in_dcl: bool
    in_dclstar: str
    in_sdcl: bool
    in_sdclstar: str
    safe: bool


@dataclass
class OrbitReport:
    group: str
    base: tuple
    orbits: list
    per_element: dict
    normality_status: Normality
    acl0: frozenset = frozenset()
    zero_stratum: frozenset = frozenset()
    orbit_dims: dict = field(default_factory=dict)  # orbit -> dim

    def orbit_of(self, x) -> frozenset:
        return self.per_element[x].orbit

    @property
    def dcl_trace(self) -> frozenset:
        return frozenset(x for x, v in self.per_element.items() if v.in_dcl)

    @property
    def sdcl_trace(self) -> frozenset:
        return frozenset(x for x, v in self.per_element.items() if v.in_sdcl)

    @property
    def all_safe(self) -> bool:
        return all(v.safe for v in self.per_element.values())

    @property
    def dim_m_ok(self) -> bool:
        """Orbits not inside the zero stratum have dimension at least 2."""
        return all(d >= 2 for o, d in self.orbit_dims.items() if not o <= self.zero_stratum)


def _fixed(perms, n: int) -> int:
    m = (1 << n) - 1
    for p in perms:
        for v in range(n):
            if p[v] != v:
                m &= ~(1 << v)
    return m


def _star_verdict(s: Structure, v: int, i: int, fixed_here: bool, setwise: bool, cache: dict) -> str:
    """dcl* (or sdcl*) verdict for point v over base mask i.

    Exclusion over a proper J uses movement by the J-stabilizer of the
    ambient, or dim(J + v) > dim(J).  Subsets of an excluded J are
    excluded too, so only the maximal proper subsets are examined.
    """
    if not fixed_here:
        return NO
    members = list(bits(i))
    if not members:
        return YES
    verdict = YES
    for drop in members:
        j = i & ~(1 << drop)
        if (j >> v) & 1:
            return NO
        if dim_mask(s, j | (1 << v)) > dim_mask(s, j):
            continue
        if (j, setwise) not in cache:
            perms = automorphisms(s, (), j) if setwise else automorphisms(s, j, ())
            cache[(j, setwise)] = _fixed(perms, s.n)
        if not (cache[(j, setwise)] >> v) & 1:
            continue
        verdict = UNDETERMINED
    return verdict


def orbit_report(s: Structure, I, group: str = "pointwise", normality=None) -> OrbitReport:
    """Orbits of the chosen stabilizer of I with per-point verdicts."""
    status = _normality(normality)
    i = s.mask(I)
    pw = automorphisms(s, i, ())
    sw = automorphisms(s, (), i)
    perms = pw if group == "pointwise" else sw
    if group not in ("pointwise", "setwise"):
        raise ValueError("group must be 'pointwise' or 'setwise'")
    fix_pw = _fixed(pw, s.n)
    fix_sw = _fixed(sw, s.n)
    acl0 = acl_trace_mask(s, 0)
    zero = acl0
    for v in bits(i):
        zero |= acl_trace_mask(s, 1 << v)

    per, dims, orbs, cache = {}, {}, [], {}
    for orb in orbits(s.n, perms):
        om = sum(1 << v for v in orb)
        d = dim_mask(s, om)
        names = s.names(om)
        orbs.append(names)
        dims[names] = d
        safe = d >= 2 or om & acl0 == om
        for v in orb:
            per[s.points[v]] = ElementVerdict(
                orbit=names,
                in_dcl=bool((fix_pw >> v) & 1),
                in_dclstar=_star_verdict(s, v, i, bool((fix_pw >> v) & 1), False, cache),
                in_sdcl=bool((fix_sw >> v) & 1),
                in_sdclstar=_star_verdict(s, v, i, bool((fix_sw >> v) & 1), True, cache),
                safe=safe,
            )
    orbs.sort(key=lambda o: min(s.index[x] for x in o))
    base = tuple(s.ordered(I))
    return OrbitReport(group, base, orbs, per, status, s.names(acl0), s.names(zero), dims)


@dataclass
class DclStarResult:
    dclstar: frozenset
    sdclstar: frozenset
    undetermined_dclstar: frozenset
    undetermined_sdclstar: frozenset
    pointwise: OrbitReport
    setwise: OrbitReport
    checks: list  # (label, ok) for the structural assertions that apply


def classify_dclstar(s: Structure, I, normality, mu=None) -> DclStarResult:
    """dcl*(I) and sdcl*(I) traces, plus the emptiness checks that apply.

    `normality` is a status string used for both groups or a dict keyed
    by group.  Emptiness of the sdcl* trace is checked when the setwise
    group is certified, |I| >= 2 and mu(alpha) >= 2; emptiness of the dcl* trace when in
    addition mu is given, the ambient is a hypergraph and mu triples.
    """
    if not isinstance(normality, dict):
        normality = {"pointwise": normality, "setwise": normality}
    pw = orbit_report(s, I, "pointwise", normality.get("pointwise"))
    sw = orbit_report(s, I, "setwise", normality.get("setwise"))
    pick = lambda rep, attr, val: frozenset(x for x, v in rep.per_element.items() if getattr(v, attr) == val)
    res = DclStarResult(
        dclstar=pick(pw, "in_dclstar", YES),
        sdclstar=pick(sw, "in_sdclstar", YES),
        undetermined_dclstar=pick(pw, "in_dclstar", UNDETERMINED),
        undetermined_sdclstar=pick(sw, "in_sdclstar", UNDETERMINED),
        pointwise=pw,
        setwise=sw,
        checks=[],
    )
    big = popcount(s.mask(I)) >= 2
    # trace-level containment: sdcl* lies inside dcl(I)
    res.checks.append(("sdcl* trace inside dcl trace", res.sdclstar <= pw.dcl_trace))
    # a 3-point line gives a symmetric definable product, so this needs mu(alpha) >= 2
    lawful = mu is not None and mu.alpha_value >= 2
    if big and lawful and sw.normality_status is Normality.CERTIFIED:
        res.checks.append(("sdcl* trace empty", not res.sdclstar and not res.undetermined_sdclstar))
    if big and mu is not None and s.flavor is Flavor.HYPERGRAPH and pw.normality_status is Normality.CERTIFIED:
        from .pairs import triples_in
        if triples_in(s, mu, 4):
            res.checks.append(("dcl* trace empty (mu triples)", not res.dclstar and not res.undetermined_dclstar))
    return res


# ---------------------------------------------------------------- coding

def finite_codes(s: Structure, I, max_size: int = 4) -> list:
    """Sets S with at most max_size points such that, for g in Aut(s),
    g fixes I setwise exactly when g fixes S pointwise."""
    i = s.mask(I)
    perms = automorphisms(s)
    stab_I = [apply_perm(p, i) == i for p in perms]
    out = []
    for k in range(1, max_size + 1):
        for S in combinations(range(s.n), k):
            if all(all(p[v] == v for v in S) == st for p, st in zip(perms, stab_I)):
                out.append(s.names(sum(1 << v for v in S)))
    return out


# ---------------------------------------------------------------- quasigroups

@dataclass(frozen=True)
class QuasigroupResult:
    verdict: str
    line: tuple
    base: tuple
    free: tuple
    orbit_size: int
    symmetric: bool
    group_order: int


def quasigroup_experiment(s: Structure, line, I) -> QuasigroupResult:
    """Can a product of the two points of I be picked invariantly on their line?

    The pointwise stabilizer of I acts on the free points of the line; if
    it moves every one of them no invariant choice exists.
    """
    if s.flavor is not Flavor.LINEAR:
        raise StrongMinError("the quasigroup experiment needs a linear space")
    lm = s.mask(line)
    i = s.mask(I)
    if popcount(i) != 2 or i & lm != i:
        raise StrongMinError("I must be two points of the line")
    if lm not in s.line_masks:
        raise StrongMinError("the given points are not a full line")
    if dim_mask(s, i) != 2:
        raise StrongMinError("the two base points are not independent")
    free = lm & ~i
    if popcount(free) == 1:
        c = s.points[next(bits(free))]
        raise LineTooShort(f"line has 3 points; {c} is the definable product", product=c)
    perms = automorphisms(s, i, ())
    fv = list(bits(free))
    acts = {tuple(p[v] for v in fv) for p in perms}
    assert all(set(a) == set(fv) for a in acts), "stabilizer does not preserve the line"
    orb = orbits(s.n, perms)
    size = max(len(o) for o in orb if o[0] in fv or any(v in fv for v in o))
    moved = all(any(p[v] != v for p in perms) for v in fv)
    symmetric = len(acts) == factorial(len(fv))
    verdict = "no-definable-product" if moved else "definable-product"
    return QuasigroupResult(verdict, tuple(s.ordered(s.names(lm))), tuple(s.ordered(s.names(i))),
                            tuple(s.points[v] for v in fv), size, symmetric, len(perms))


# ---------------------------------------------------------------- fixtures

@dataclass
class FixtureReport:
    name: str
    rows: list  # (label, source, ok, error)

    @property
    def ok(self) -> bool:
        return all(r[2] for r in self.rows)


def verify_fixture(name: str) -> FixtureReport:
    from . import fixtures

    fx = fixtures.get(name)
    rows = []
    for ch in fx.checks:
        try:
            ok, err = bool(ch.run()), ""
        except Exception as e:  # a crashing check is a failed check
            ok, err = False, f"{type(e).__name__}: {e}"
        rows.append((ch.label, ch.source, ok, err))
    if fx.base is not None and fx.normality:
        res = classify_dclstar(fx.structure, fx.base, fx.normality, fx.mu)
        for label, ok in res.checks:
            rows.append((label, "structural check", ok, ""))
    return FixtureReport(name, rows)
