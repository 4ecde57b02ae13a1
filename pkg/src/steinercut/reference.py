"""Ground-truth machinery: flows, Steiner mincuts, exhaustive cut enumeration.

Everything here is deliberately independent of the indexed structures it is
used to validate: flows are plain augmenting-path computations and cut
families come from scanning all bipartitions (guarded at n <= 20).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .errors import (
    NotABunchError,
    NotEnoughTerminalsError,
    OverlappingTerminalsError,
    SameVertexError,
    TooLargeError,
)
from .graph import Cut, MultiGraph, mask_of, set_of

ENUMERATION_GUARD = 20

__all__ = [
    "CutFamily",
    "max_flow_mincut",
    "steiner_mincut",
    "min_steiner_cut_separating",
    "enumerate_cuts",
    "connectivity_classes",
    "tight_cut",
    "canonical_mask",
]


def canonical_mask(g: MultiGraph, mask: int) -> int:
    """The side of the bipartition not containing vertex 0."""
    return mask ^ g.full_mask() if mask & 1 else mask


@dataclass(frozen=True)
class CutFamily:
    """All Steiner cuts of capacity lambda_s and lambda_s+1, canonicalized."""

    lambda_s: int
    mincuts: tuple[Cut, ...]
    plus1cuts: tuple[Cut, ...]

    def mincut_masks(self) -> list[int]:
        return [c.mask() for c in self.mincuts]

    def plus1_masks(self) -> list[int]:
        return [c.mask() for c in self.plus1cuts]


def max_flow_mincut(
    g: MultiGraph, sources: int | set, sinks: int | set
) -> tuple[int, Cut, Cut]:
    """Unit-capacity max flow; returns value and both extreme mincut sides."""
    smask = sources if isinstance(sources, int) else mask_of(sources)
    tmask = sinks if isinstance(sinks, int) else mask_of(sinks)
    if smask == 0 or tmask == 0:
        raise OverlappingTerminalsError("sources and sinks must be nonempty")
    if smask & tmask:
        raise OverlappingTerminalsError("sources and sinks overlap")
    eu, ev = g.edge_arrays()
    value, min_side, max_side, _ = kernels.max_flow(
        g.vertex_count, eu, ev, smask, tmask
    )
    return value, Cut(set_of(min_side), value), Cut(set_of(max_side), value)


def steiner_mincut(g: MultiGraph) -> tuple[int, Cut]:
    """Minimum capacity over all Steiner cuts, with a witness.

    Every Steiner cut separates a fixed terminal from some other terminal,
    so |S|-1 flows suffice.
    """
    if len(g.steiner) < 2:
        raise NotEnoughTerminalsError("need at least two terminals")
    g.require_connected()
    terms = sorted(g.steiner)
    s0 = terms[0]
    best = None
    witness = None
    for t in terms[1:]:
        value, cut, _ = max_flow_mincut(g, {s0}, {t})
        if best is None or value < best:
            best, witness = value, cut
    return best, witness


def min_steiner_cut_separating(g: MultiGraph, u: int, v: int) -> int:
    """Least capacity of a Steiner cut separating u and v.

    Minimum of max-flow({u,a},{v,b}) over ordered terminal pairs (a,b);
    pairs that would force a vertex onto both sides are skipped.
    """
    if u == v:
        raise SameVertexError("u and v must differ")
    best = None
    terms = sorted(g.steiner)
    for a in terms:
        if a == v:
            continue
        for b in terms:
            if b == a or b == u:
                continue
            value, _, _ = max_flow_mincut(g, {u, a}, {v, b})
            if best is None or value < best:
                best = value
    if best is None:
        raise NotEnoughTerminalsError("no feasible terminal pair")
    return best


def enumerate_cuts(g: MultiGraph, cap_limit: int) -> CutFamily:
    """Exhaustively scan all Steiner bipartitions with capacity <= cap_limit.

    Sides are canonical (vertex 0 excluded). The lambda_s field is exact
    even when cap_limit falls below it.
    """
    if g.vertex_count > ENUMERATION_GUARD:
        raise TooLargeError(
            f"n={g.vertex_count} exceeds enumeration guard {ENUMERATION_GUARD}"
        )
    eu, ev = g.edge_arrays()
    lam, raw = kernels.enumerate_steiner_cuts(
        g.vertex_count, eu, ev, g.steiner_mask(), cap_limit
    )
    mincuts = []
    plus1 = []
    for mask, cap in raw:
        cut = Cut(set_of(mask), cap)
        if cap == lam:
            mincuts.append(cut)
        elif cap == lam + 1:
            plus1.append(cut)
    return CutFamily(lam, tuple(mincuts), tuple(plus1))


def connectivity_classes(g: MultiGraph) -> list[frozenset[int]]:
    """Partition of V: u,v together iff no Steiner mincut separates them.

    Flow-based; used as one of two independent routes (the other being the
    enumerated mincut family) in the verification suite.
    """
    lam, _ = steiner_mincut(g)
    blocks: list[tuple[int, list[int]]] = []  # (representative, members)
    for v in range(g.vertex_count):
        placed = False
        for rep, members in blocks:
            if min_steiner_cut_separating(g, rep, v) > lam:
                members.append(v)
                placed = True
                break
        if not placed:
            blocks.append((v, [v]))
    return [frozenset(members) for _, members in blocks]


def tight_cut(g: MultiGraph, terminals_inside: int | set) -> Cut:
    """Inclusion-minimal Steiner-mincut side containing the given terminals.

    The terminal subset must be separated from the rest of S at exactly
    mincut capacity, i.e. define a bunch.
    """
    amask = (
        terminals_inside
        if isinstance(terminals_inside, int)
        else mask_of(terminals_inside)
    )
    smask = g.steiner_mask()
    if amask == 0 or amask & ~smask or amask == smask:
        raise NotABunchError("need a proper nonempty terminal subset")
    lam, _ = steiner_mincut(g)
    value, min_side, _ = max_flow_mincut(g, amask, smask & ~amask)
    if value != lam:
        raise NotABunchError(
            f"terminal split has capacity {value}, mincut is {lam}"
        )
    return min_side
