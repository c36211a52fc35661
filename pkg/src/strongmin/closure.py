"""Strong subsets, intrinsic closure and algebraic-closure traces.

The ambient structure is treated as strong in the generic model, so
dim computed inside it is the true dimension.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import Structure, bits
from .predim import delta_mask, dim_mask, minimizers


@dataclass(frozen=True)
class ClosureResult:
    input: frozenset
    closure: frozenset
    chain: tuple  # of (frozenset, delta)


def is_strong(s: Structure, A) -> bool:
    m = s.mask(A)
    return dim_mask(s, m) == delta_mask(s, m)


def icl_mask(s: Structure, m: int) -> int:
    return minimizers(s, m)[1]


def icl(s: Structure, A) -> ClosureResult:
    """Smallest strong superset of A.

    This is the least superset minimising delta: by submodularity the
    minimisers form a lattice, its bottom is strong, and every strong
    superset Y of A contains it (Y and the bottom element meet in a
    minimiser).
    """
    m = s.mask(A)
    _, lo, _ = minimizers(s, m)
    # audit trail: greedily absorb the point that lowers delta most
    chain = [(s.names(m), delta_mask(s, m))]
    cur = m
    while cur != lo:
        best = min(bits(lo & ~cur), key=lambda v: (delta_mask(s, cur | (1 << v)), v))
        cur |= 1 << best
        chain.append((s.names(cur), delta_mask(s, cur)))
    return ClosureResult(s.names(m), s.names(lo), tuple(chain))


def is_dclosed(s: Structure, X) -> bool:
    m = s.mask(X)
    d = dim_mask(s, m)
    return all(dim_mask(s, m | (1 << v)) > d for v in range(s.n) if not (m >> v) & 1)


def acl_trace_mask(s: Structure, m: int) -> int:
    d = dim_mask(s, m)
    out = m
    for v in range(s.n):
        if not (m >> v) & 1 and dim_mask(s, m | (1 << v)) == d:
            out |= 1 << v
    return out


def acl_trace(s: Structure, X) -> frozenset:
    """Points a with dim(X u {a}) = dim(X)."""
    return s.names(acl_trace_mask(s, s.mask(X)))
