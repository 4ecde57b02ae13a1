"""Undirected multigraph with a terminal set, cut arithmetic and surgery.

Vertices are dense integers ``0..n-1``. Vertex subsets are passed around as
bitmasks (int) internally; the public :class:`Cut` carries a frozenset. Edge
ids are stable: surgery and contraction keep the ids of surviving edges and
assign fresh ids to added ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    EmptySideError,
    FullSideError,
    NotConnectedError,
    OverlappingGroupsError,
    SelfLoopError,
    UnknownEdgeIdError,
)

__all__ = [
    "MultiGraph",
    "Cut",
    "CutInfo",
    "capacity",
    "classify_cut",
    "surgery",
    "contract",
    "mask_of",
    "set_of",
    "read_graph",
    "write_graph",
]


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def set_of(mask: int) -> frozenset[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return frozenset(out)


@dataclass(frozen=True)
class Cut:
    """One side of a vertex bipartition plus its crossing-edge count."""

    side: frozenset[int]
    capacity: int

    def mask(self) -> int:
        return mask_of(self.side)


@dataclass(frozen=True)
class MultiGraph:
    """Immutable undirected multigraph with terminals.

    ``edges[i] == (eid, u, v)``; parallel edges are distinct entries. The
    ``steiner`` set holds terminal vertex ids.
    """

    vertex_count: int
    edges: tuple[tuple[int, int, int], ...]
    steiner: frozenset[int]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False, default=())

    @staticmethod
    def build(
        n: int,
        edge_list: Sequence[tuple[int, int]] | Sequence[tuple[int, int, int]],
        steiner: Iterable[int],
    ) -> "MultiGraph":
        """Create a graph; ``edge_list`` entries are (u, v) or (eid, u, v)."""
        edges = []
        for i, e in enumerate(edge_list):
            if len(e) == 2:
                eid, (u, v) = i, e
            else:
                eid, u, v = e
            if u == v:
                raise SelfLoopError(f"edge {eid} is a self loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {eid}=({u},{v}) out of range for n={n}")
            edges.append((eid, u, v))
        s = frozenset(steiner)
        if any(not 0 <= t < n for t in s):
            raise ValueError("terminal out of range")
        adj: list[list[int]] = [[] for _ in range(n)]
        for eid, u, v in edges:
            adj[u].append(eid)
            adj[v].append(eid)
        return MultiGraph(n, tuple(edges), s, tuple(tuple(a) for a in adj))

    # -- derived views -------------------------------------------------

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def steiner_mask(self) -> int:
        return mask_of(self.steiner)

    def full_mask(self) -> int:
        return (1 << self.vertex_count) - 1

    def edge_by_id(self) -> dict[int, tuple[int, int]]:
        return {eid: (u, v) for eid, u, v in self.edges}

    def endpoints(self, eid: int) -> tuple[int, int]:
        for e, u, v in self.edges:
            if e == eid:
                return u, v
        raise UnknownEdgeIdError(f"no edge with id {eid}")

    def edge_arrays(self) -> tuple[list[int], list[int]]:
        return [u for _, u, _ in self.edges], [v for _, _, v in self.edges]

    def is_connected(self) -> bool:
        n = self.vertex_count
        if n == 0:
            return True
        seen = 1
        stack = [0]
        adj: list[list[int]] = [[] for _ in range(n)]
        for _, u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen >> y & 1:
                    seen |= 1 << y
                    stack.append(y)
        return seen == self.full_mask()

    def require_connected(self) -> None:
        if not self.is_connected():
            raise NotConnectedError("operation requires a connected graph")

    def next_edge_id(self) -> int:
        return max((eid for eid, _, _ in self.edges), default=-1) + 1


def _check_side(g: MultiGraph, mask: int) -> None:
    if mask == 0:
        raise EmptySideError("cut side is empty")
    if mask == g.full_mask():
        raise FullSideError("cut side is the whole vertex set")
    if mask & ~g.full_mask():
        raise ValueError("side mask contains unknown vertices")


def _as_mask(g: MultiGraph, side: int | Iterable[int]) -> int:
    return side if isinstance(side, int) else mask_of(side)


def capacity(g: MultiGraph, side: int | Iterable[int]) -> int:
    """Number of edges with exactly one endpoint in ``side``."""
    mask = _as_mask(g, side)
    _check_side(g, mask)
    return sum(1 for _, u, v in g.edges if (mask >> u ^ mask >> v) & 1)


@dataclass(frozen=True)
class CutInfo:
    """Classification of a cut side: terminal content plus separation tests."""

    mask: int
    steiner: bool

    def separates(self, u: int, v: int) -> bool:
        return bool((self.mask >> u ^ self.mask >> v) & 1)

    def subdivides(self, vertices: Iterable[int]) -> bool:
        xm = mask_of(vertices)
        return bool(self.mask & xm) and bool(~self.mask & xm)


def classify_cut(g: MultiGraph, side: int | Iterable[int]) -> CutInfo:
    mask = _as_mask(g, side)
    _check_side(g, mask)
    sm = g.steiner_mask()
    return CutInfo(mask, bool(mask & sm) and bool(~mask & sm))


def surgery(
    g: MultiGraph,
    remove: Iterable[int] = (),
    add: Sequence[tuple[int, int]] = (),
) -> MultiGraph:
    """Remove edges by id and/or add fresh edges; connectivity not enforced."""
    removed = set(remove)
    known = {eid for eid, _, _ in g.edges}
    unknown = removed - known
    if unknown:
        raise UnknownEdgeIdError(f"unknown edge ids: {sorted(unknown)}")
    edges = [(eid, u, v) for eid, u, v in g.edges if eid not in removed]
    nid = g.next_edge_id()
    for u, v in add:
        if u == v:
            raise SelfLoopError(f"cannot add self loop at {u}")
        edges.append((nid, u, v))
        nid += 1
    return MultiGraph.build(g.vertex_count, edges, g.steiner)


def contract(
    g: MultiGraph, groups: Sequence[Iterable[int]]
) -> tuple[MultiGraph, list[int]]:
    """Merge each vertex group into one vertex.

    Returns the contracted graph and the total old->new vertex mapping.
    Parallel edges between distinct groups survive (keeping their ids);
    edges that become self loops are dropped. Terminal status is inherited:
    a merged vertex is a terminal iff any member was.
    """
    group_masks = [mask_of(grp) for grp in groups]
    seen = 0
    for m in group_masks:
        if m & seen:
            raise OverlappingGroupsError("contraction groups overlap")
        seen |= m
    group_of = [-1] * g.vertex_count
    for gi, m in enumerate(group_masks):
        for v in range(g.vertex_count):
            if m >> v & 1:
                group_of[v] = gi

    mapping = [-1] * g.vertex_count
    next_id = 0
    group_new: dict[int, int] = {}
    for v in range(g.vertex_count):
        gi = group_of[v]
        if gi < 0:
            mapping[v] = next_id
            next_id += 1
        elif gi in group_new:
            mapping[v] = group_new[gi]
        else:
            group_new[gi] = mapping[v] = next_id
            next_id += 1

    edges = []
    for eid, u, v in g.edges:
        nu, nv = mapping[u], mapping[v]
        if nu != nv:
            edges.append((eid, nu, nv))
    steiner = {mapping[t] for t in g.steiner}
    return MultiGraph.build(next_id, edges, steiner), mapping


# -- text format -------------------------------------------------------
# Line 1: "n m k"; line 2: the k terminal ids; then m lines "u v".
# Duplicate "u v" lines encode parallel edges. '#' starts a comment.


def read_graph(text: str) -> MultiGraph:
    rows: list[list[int]] = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append([int(tok) for tok in line.split()])
    if not rows:
        raise ValueError("empty graph file")
    n, m, k = rows[0]
    if len(rows) != 2 + m:
        raise ValueError(f"expected {m} edge lines, found {len(rows) - 2}")
    terminals = rows[1]
    if len(terminals) != k:
        raise ValueError(f"expected {k} terminals, found {len(terminals)}")
    edges = [(r[0], r[1]) for r in rows[2:]]
    return MultiGraph.build(n, edges, terminals)


def write_graph(g: MultiGraph) -> str:
    lines = [f"{g.vertex_count} {g.edge_count} {len(g.steiner)}"]
    lines.append(" ".join(str(t) for t in sorted(g.steiner)))
    for _, u, v in g.edges:
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"
