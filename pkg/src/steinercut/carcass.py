"""Connectivity carcass: flesh quotient, cactus skeleton, projections.

The skeleton is built from the enumerated family of Steiner-mincut terminal
partitions: partitions that properly overlap are grouped into cycles, the
laminar remainder becomes the tree, and the result is verified against the
realized partition family (exact set equality) before anything else uses
it. Construction is desk-scale and fails loudly on structural mismatch.

Vocabulary: a *bunch* is the set of mincuts realizing one terminal
partition; the *tight cut* of a bunch is the inclusion-minimal side; a unit
(connectivity class) is *stretched* when some bunch leaves it strictly
between the two tight cuts, otherwise it is a *terminal unit* and projects
to a single skeleton node. Stretched units project to proper paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import kernels, reference
from .errors import (
    ConstructionError,
    IntraUnitEdgeError,
    InvalidMinimalCutError,
    NotAProperPathError,
    SameVertexError,
    TooLargeError,
    UnknownEdgeIdError,
)
from .graph import Cut, MultiGraph, contract, mask_of, set_of
from .pq import build_pq_dag

__all__ = [
    "Carcass",
    "Skeleton",
    "ProperPath",
    "PathIntersection",
    "build_carcass",
]


@dataclass(frozen=True)
class SkelEdge:
    eid: int
    a: int
    b: int
    kind: str  # "tree" | "cycle"
    cycle: int  # cycle index, -1 for tree edges
    partition: int  # tree edges: terminal mask of the child side


@dataclass(frozen=True)
class ProperPath:
    """Proper path given by its endpoint nodes plus its edge set."""

    a: int
    b: int
    edges: frozenset[int]

    def is_node(self) -> bool:
        return not self.edges


@dataclass(frozen=True)
class PathIntersection:
    kind: str  # disjoint | shared_edge | shared_cycle_pair | single_node
    edge: int = -1
    edge2: int = -1
    node: int = -1


class Skeleton:
    """Cactus over terminal partitions with O(1) side/position queries."""

    def __init__(self, node_atoms, tree_edges, cycles, sector_masks):
        self.node_atoms: list[int] = node_atoms
        self.cycles: list[list[int]] = cycles
        self.sector_masks: list[list[int]] = sector_masks
        self.edges: list[SkelEdge] = []
        for a, b, pmask in tree_edges:
            self.edges.append(SkelEdge(len(self.edges), a, b, "tree", -1, pmask))
        self.cycle_edge_ids: list[list[int]] = []
        for ci, nodes in enumerate(cycles):
            ids = []
            k = len(nodes)
            for i in range(k):
                e = SkelEdge(
                    len(self.edges), nodes[i], nodes[(i + 1) % k], "cycle", ci, 0
                )
                self.edges.append(e)
                ids.append(e.eid)
            self.cycle_edge_ids.append(ids)
        self.node_count = len(node_atoms)
        self.probes = 0
        self._index()

    def _index(self) -> None:
        n = self.node_count
        self.cycle_of_node = [-1] * n
        self.pos_in_cycle = [-1] * n
        for ci, nodes in enumerate(self.cycles):
            for p, nd in enumerate(nodes):
                self.cycle_of_node[nd] = ci
                self.pos_in_cycle[nd] = p

        # supernodes: each cycle collapses to one; plain nodes stand alone
        self.sup_of = [-1] * n
        sup_members: list[list[int]] = []
        cyc_sup: dict[int, int] = {}
        for v in range(n):
            ci = self.cycle_of_node[v]
            if ci < 0:
                self.sup_of[v] = len(sup_members)
                sup_members.append([v])
            elif ci in cyc_sup:
                self.sup_of[v] = cyc_sup[ci]
                sup_members[cyc_sup[ci]].append(v)
            else:
                cyc_sup[ci] = self.sup_of[v] = len(sup_members)
                sup_members.append([v])
        self.sup_members = sup_members
        self.sup_cycle = [-1] * len(sup_members)
        for ci, s in cyc_sup.items():
            self.sup_cycle[s] = ci

        ns = len(sup_members)
        adj: list[list[tuple[int, int]]] = [[] for _ in range(ns)]
        for e in self.edges:
            if e.kind == "tree":
                sa, sb = self.sup_of[e.a], self.sup_of[e.b]
                if sa == sb:
                    raise ConstructionError("tree edge inside a cycle block")
                adj[sa].append((sb, e.eid))
                adj[sb].append((sa, e.eid))

        root = self.sup_of[0]
        self.sup_parent = [-1] * ns
        self.sup_parent_edge = [-1] * ns
        self.sup_depth = [0] * ns
        self.tin = [0] * ns
        self.tout = [0] * ns
        self.anc_chain: list[tuple[int, ...]] = [()] * ns
        self.attach_inner = [-1] * ns  # parent-edge endpoint inside this sup
        self.attach_outer = [-1] * ns  # parent-edge endpoint in the parent
        timer = 0
        visited = 0
        stack: list[tuple[int, int, int, bool]] = [(root, -1, -1, False)]
        while stack:
            s, par, pedge, done = stack.pop()
            if done:
                self.tout[s] = timer - 1
                continue
            visited += 1
            self.sup_parent[s] = par
            self.sup_parent_edge[s] = pedge
            self.tin[s] = timer
            timer += 1
            if par >= 0:
                self.sup_depth[s] = self.sup_depth[par] + 1
                self.anc_chain[s] = self.anc_chain[par] + (s,)
                e = self.edges[pedge]
                if self.sup_of[e.a] == s:
                    self.attach_inner[s], self.attach_outer[s] = e.a, e.b
                else:
                    self.attach_inner[s], self.attach_outer[s] = e.b, e.a
            else:
                self.anc_chain[s] = (s,)
            stack.append((s, par, pedge, True))
            for t, eid in adj[s]:
                if t != par:
                    stack.append((t, s, eid, False))
        if visited != ns:
            raise ConstructionError("skeleton is not connected")

        # anchor[(sup, cycle_sup)]: cycle position its subtree hangs from
        self.cyc_anchor: dict[tuple[int, int], int] = {}
        for s in range(ns):
            chain = self.anc_chain[s]
            for i, a in enumerate(chain[:-1]):
                if self.sup_cycle[a] >= 0:
                    child = chain[i + 1]
                    self.cyc_anchor[(s, a)] = self.pos_in_cycle[
                        self.attach_outer[child]
                    ]

    # -- O(1) primitives ------------------------------------------------

    def is_sup_ancestor(self, a: int, s: int) -> bool:
        self.probes += 1
        return self.tin[a] <= self.tin[s] <= self.tout[a]

    def sup_lca(self, a: int, b: int) -> int:
        self.probes += 2
        ca, cb = self.anc_chain[a], self.anc_chain[b]
        i = min(len(ca), len(cb)) - 1
        # deepest common entry; chains agree on a prefix
        while ca[i] != cb[i] if i < len(cb) else True:
            i -= 1
        return ca[i]

    def chain_at_depth(self, s: int, d: int) -> int:
        self.probes += 1
        return self.anc_chain[s][d]

    def cycle_position_toward(self, cyc_sup: int, s: int) -> int:
        """Cycle position from which the direction of supernode s hangs."""
        self.probes += 1
        if self.is_sup_ancestor(cyc_sup, s):
            return self.cyc_anchor[(s, cyc_sup)]
        return self.pos_in_cycle[self.attach_inner[cyc_sup]]

    def node_in_tree_side(self, eid: int, node: int) -> bool:
        """Is ``node`` on the child side of tree edge ``eid``?"""
        self.probes += 1
        e = self.edges[eid]
        sa, sb = self.sup_of[e.a], self.sup_of[e.b]
        child = sa if self.sup_parent[sa] == sb else sb
        return self.is_sup_ancestor(child, self.sup_of[node])

    def node_in_arc_side(self, ci: int, i: int, j: int, node: int) -> bool:
        """Arc side of cycle minimal cut {edge i, edge j}: positions i+1..j.

        Edge p joins positions p and p+1 (mod k); requires i < j.
        """
        self.probes += 1
        s = self.sup_of[node]
        cs = self.sup_of[self.cycles[ci][0]]
        if s == cs:
            pos = self.pos_in_cycle[node]
        else:
            pos = self.cycle_position_toward(cs, s)
        return i + 1 <= pos <= j

    # -- minimal cuts ----------------------------------------------------

    def minimal_cuts(self):
        """Iterate (key, partition_mask) over every minimal cut."""
        for e in self.edges:
            if e.kind == "tree":
                yield ("tree", e.eid), e.partition
        for ci, nodes in enumerate(self.cycles):
            k = len(nodes)
            for i in range(k):
                for j in range(i + 1, k):
                    yield ("cyc", ci, i, j), self.arc_partition(ci, i, j)

    def arc_partition(self, ci: int, i: int, j: int) -> int:
        mask = 0
        for p in range(i + 1, j + 1):
            mask |= self.sector_masks[ci][p]
        return mask

    def cut_partition(self, key) -> int:
        if key[0] == "tree":
            return self.edges[key[1]].partition
        return self.arc_partition(key[1], key[2], key[3])

    def node_in_cut_side(self, key, node: int) -> bool:
        if key[0] == "tree":
            return self.node_in_tree_side(key[1], node)
        return self.node_in_arc_side(key[1], key[2], key[3], node)

    def minimal_cut_of_edges(self, eids: tuple[int, ...]):
        """Validate an edge / edge-pair argument into a minimal-cut key."""
        if len(eids) == 1:
            e = self.edges[eids[0]]
            if e.kind != "tree":
                raise InvalidMinimalCutError("single cycle edge is not a cut")
            return ("tree", e.eid)
        if len(eids) == 2:
            e1, e2 = (self.edges[i] for i in eids)
            if (
                e1.kind != "cycle"
                or e2.kind != "cycle"
                or e1.cycle != e2.cycle
                or e1.eid == e2.eid
            ):
                raise InvalidMinimalCutError("need two edges of one cycle")
            base = self.cycle_edge_ids[e1.cycle][0]
            i, j = sorted((e1.eid - base, e2.eid - base))
            return ("cyc", e1.cycle, i, j)
        raise InvalidMinimalCutError("a minimal cut has one or two edges")


def _overlap(a: int, b: int) -> bool:
    return bool(a & b) and bool(a & ~b) and bool(b & ~a)


def _build_skeleton(partitions: list[int], smask: int) -> Skeleton:
    """Assemble and verify the cactus from canonical terminal-side masks."""
    t0 = (smask & -smask).bit_length() - 1
    terms = [t for t in range(smask.bit_length()) if smask >> t & 1]

    # overlap components
    parent = list(range(len(partitions)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(len(partitions)):
        for j in range(i + 1, len(partitions)):
            if _overlap(partitions[i], partitions[j]):
                parent[find(i)] = find(j)
    comps: dict[int, list[int]] = {}
    for i in range(len(partitions)):
        comps.setdefault(find(i), []).append(i)

    laminar: list[int] = []
    cycle_specs: list[tuple[list[int], int]] = []  # (sector order, hub side)
    for members in comps.values():
        if len(members) == 1:
            laminar.append(partitions[members[0]])
            continue
        msk = [partitions[i] for i in members]
        ssig: dict[tuple, int] = {}
        for t in terms:
            key = tuple(p >> t & 1 for p in msk)
            ssig[key] = ssig.get(key, 0) | (1 << t)
        sectors = list(ssig.values())
        k = len(sectors)
        if k < 4:
            raise ConstructionError("crossing group with fewer than 4 sectors")
        home = next(s for s in sectors if s >> t0 & 1)
        others = [s for s in sectors if s != home]
        neigh: dict[int, list[int]] = {s: [] for s in others}
        for p in msk:
            hit = [s for s in others if p & s]
            if len(hit) == 2:
                if hit[0] | hit[1] != p:
                    raise ConstructionError("two-sector member is not a union")
                neigh[hit[0]].append(hit[1])
                neigh[hit[1]].append(hit[0])
        ends = sorted(s for s in others if len(neigh[s]) == 1)
        if len(ends) != 2 or any(len(v) > 2 for v in neigh.values()):
            raise ConstructionError("cycle sectors do not form a path")
        order = [ends[0]]
        while len(order) < len(others):
            nxt = [s for s in neigh[order[-1]] if s not in order]
            if len(nxt) != 1:
                raise ConstructionError("ambiguous cycle sector order")
            order.append(nxt[0])
        expected = set()
        for i in range(len(order)):
            run = 0
            for j in range(i, min(i + k - 2, len(order))):
                run |= order[j]
                if j > i:
                    expected.add(run)
        if expected != set(msk):
            raise ConstructionError("crossing group is not a full cycle family")
        cycle_specs.append((order + [home], smask & ~home))

    lam_set = set(laminar)
    for order_home, hub_side in cycle_specs:
        for s in order_home[:-1]:
            if s not in lam_set:
                raise ConstructionError("cycle sector side not realized")
        if hub_side not in lam_set:
            raise ConstructionError("cycle hub side not realized")

    # laminar tree: one node per side plus a root; sides exclude t0
    sides = sorted(set(laminar), key=lambda m: (bin(m).count("1"), m))
    parent_of: dict[int, Optional[int]] = {}
    for i, a in enumerate(sides):
        parent_of[a] = None
        for b in sides[i + 1 :]:
            if a != b and a & ~b == 0:
                parent_of[a] = b
                break

    node_of_side = {a: i for i, a in enumerate(sides)}
    root = len(sides)
    node_atoms = [0] * (len(sides) + 1)
    covered = [0] * (len(sides) + 1)
    tree_edges: list[tuple[int, int, int]] = []
    for a in sides:
        p = parent_of[a]
        pnode = node_of_side[p] if p is not None else root
        tree_edges.append((node_of_side[a], pnode, a))
        covered[pnode] |= a
    for a in sides:
        node_atoms[node_of_side[a]] = a & ~covered[node_of_side[a]]
    node_atoms[root] = smask & ~covered[root]

    # expand each cycle hub into a ring of empty nodes
    cycles: list[list[int]] = []
    sector_tables: list[list[int]] = []
    hubs_seen: set[int] = set()
    for order_home, hub_side in cycle_specs:
        hub = node_of_side[hub_side]
        if hub in hubs_seen:
            raise ConstructionError("two cycles share a hub")
        hubs_seen.add(hub)
        if node_atoms[hub]:
            raise ConstructionError("cycle hub node is not empty")
        k = len(order_home)
        incident = [i for i, (x, y, _) in enumerate(tree_edges) if hub in (x, y)]
        if len(incident) != k:
            raise ConstructionError("cycle hub degree mismatch")
        by_side = {tree_edges[i][2]: i for i in incident}
        ring: list[int] = []
        for idx, sector in enumerate(order_home):
            side = sector if idx < k - 1 else hub_side
            if side not in by_side:
                raise ConstructionError("sector edge missing at hub")
            nid = len(node_atoms)
            node_atoms.append(0)
            ring.append(nid)
            ei = by_side[side]
            x, y, pm = tree_edges[ei]
            tree_edges[ei] = (nid if x == hub else x, nid if y == hub else y, pm)
        cycles.append(ring)
        sector_tables.append(list(order_home))

    used = sorted(
        {x for x, _, _ in tree_edges}
        | {y for _, y, _ in tree_edges}
        | {nd for ring in cycles for nd in ring}
    )
    remap = {old: new for new, old in enumerate(used)}
    node_atoms2 = [node_atoms[old] for old in used]
    tree_edges2 = [(remap[x], remap[y], pm) for x, y, pm in tree_edges]
    cycles2 = [[remap[nd] for nd in ring] for ring in cycles]

    skel = Skeleton(node_atoms2, tree_edges2, cycles2, sector_tables)

    # region sanity: one terminal class per node, none dropped
    atom_sig: dict[tuple, int] = {}
    for t in terms:
        key = tuple(p >> t & 1 for p in partitions)
        atom_sig[key] = atom_sig.get(key, 0) | (1 << t)
    atoms = set(atom_sig.values())
    placed = [m for m in node_atoms2 if m]
    if sorted(placed) != sorted(atoms):
        raise ConstructionError("skeleton node contents disagree with classes")

    # loud final check: minimal-cut partitions == realized partitions
    realized = set(partitions)
    built = set()
    for _, pmask in skel.minimal_cuts():
        cm = pmask if not pmask >> t0 & 1 else smask & ~pmask
        if cm == 0 or cm == smask:
            raise ConstructionError("degenerate minimal cut in skeleton")
        built.add(cm)
    if built != realized:
        raise ConstructionError(
            f"skeleton partitions mismatch: built {len(built)} "
            f"vs realized {len(realized)}"
        )
    for ring in cycles2:
        if len(ring) < 4:
            raise ConstructionError("cycle with fewer than 4 nodes")
    deg = [0] * skel.node_count
    for e in skel.edges:
        deg[e.a] += 1
        deg[e.b] += 1
    for v in range(skel.node_count):
        if skel.node_atoms[v] == 0 and deg[v] < 3:
            raise ConstructionError("empty skeleton node of degree < 3")
    return skel


@dataclass
class TauGroup:
    """Ordering of the stretched units sharing one projection path.

    Positions come from a topological order of the residual condensation of
    the graph contracted at one bunch of the path (lowest skeleton edge id);
    ``member_bits[u]`` records, for every unit strictly between that
    bunch's tight cuts, which group members' nearest source-side mincuts
    contain it (bit j = member ``order[j]``).
    """

    path_edges: frozenset[int]
    group_edge: int
    cut_key: tuple
    source_node: int  # skeleton node on the side the order ascends from
    positions: dict[int, int]
    order: tuple[int, ...]
    member_bits: dict[int, int]


class Carcass:
    """Built flesh + skeleton + projections + ordering, with query ops."""

    def __init__(self, g: MultiGraph):
        self.graph = g
        self.probes = 0
        self._build()

    # -- construction ---------------------------------------------------

    def _build(self) -> None:
        g = self.graph
        if g.vertex_count > reference.ENUMERATION_GUARD:
            raise TooLargeError("graph exceeds the construction guard")
        g.require_connected()
        family = reference.enumerate_cuts(g, cap_limit=g.edge_count + 1)
        self.lambda_s = family.lambda_s
        smask = g.steiner_mask()
        self.smask = smask
        self.t0 = (smask & -smask).bit_length() - 1

        self.mincut_masks = family.mincut_masks()
        self.plus1_masks = family.plus1_masks()
        part_cuts: dict[int, list[int]] = {}
        for m in self.mincut_masks:
            part_cuts.setdefault(self._canon_part(m & smask), []).append(m)
        self.partition_cuts = part_cuts

        blocks = sorted(reference.connectivity_classes(g), key=min)
        self.units = [mask_of(b) for b in blocks]
        self.unit_of = [-1] * g.vertex_count
        for ui, b in enumerate(blocks):
            for v in b:
                self.unit_of[v] = ui
        self.steiner_unit = [bool(um & smask) for um in self.units]

        self.skeleton = _build_skeleton(sorted(part_cuts), smask)
        self._t0_node = next(
            nd
            for nd in range(self.skeleton.node_count)
            if self.skeleton.node_atoms[nd] >> self.t0 & 1
        )

        self.tights: dict[int, tuple[int, int]] = {}
        for pmask in self._all_partitions():
            ta = reference.tight_cut(g, pmask).mask()
            tb = reference.tight_cut(g, smask & ~pmask).mask()
            self.tights[pmask] = (ta, tb)  # (side of pmask, complement side)

        self._classify_units()
        self._project_units()
        self._validate_edge_projections()
        self._build_tau()
        self._flesh_edges()
        self._edge_ends = {eid: (u, v) for eid, u, v in g.edges}

    def drop_build_caches(self) -> None:
        """Release construction scaffolding kept only for building indexes.

        Queries derive tight cuts and edge projections from the skeleton
        and the unit projections; the enumerated families and per-partition
        tights are not part of the query footprint.
        """
        self.tights = None  # type: ignore[assignment]
        self.partition_cuts = None  # type: ignore[assignment]
        self.mincut_masks = None  # type: ignore[assignment]
        self.plus1_masks = None  # type: ignore[assignment]

    def _canon_part(self, m: int) -> int:
        return m if not m >> self.t0 & 1 else self.smask & ~m

    def _all_partitions(self):
        seen = set()
        for _, pmask in self.skeleton.minimal_cuts():
            cm = self._canon_part(pmask)
            if cm not in seen:
                seen.add(cm)
                yield cm

    def _unit_side(self, pmask: int, um: int) -> str:
        """'a' = inside the pmask-side tight, 'b' = complement, 'mid'."""
        ta, tb = self.tights[pmask]
        if um & ta == um:
            return "a"
        if um & tb == um:
            return "b"
        if um & (ta | tb):
            raise ConstructionError("unit split by a tight cut")
        return "mid"

    def _classify_units(self) -> None:
        self.stretched = [False] * len(self.units)
        for ui, um in enumerate(self.units):
            for pmask in self.tights:
                if self._unit_side(pmask, um) == "mid":
                    self.stretched[ui] = True
                    break
            if self.stretched[ui] and self.steiner_unit[ui]:
                raise ConstructionError("steiner unit cannot be stretched")

    def _distinguished(self, cm: int, ui: int) -> bool:
        return self._unit_side(cm, self.units[ui]) == "mid"

    def _cut_side_of_unit(self, key, ui: int) -> str:
        """Unit side relative to a minimal cut, aligned with node sides.

        'a' matches node_in_cut_side == True, 'b' the other component,
        'mid' when the unit is strictly between the tight cuts.
        """
        raw = self.skeleton.cut_partition(key)
        cm = self._canon_part(raw)
        side = self._unit_side(cm, self.units[ui])
        if side == "mid":
            return "mid"
        node_true_is_cm = self._node_side_is_partition_side(key)
        on_true = (side == "a") == node_true_is_cm
        return "a" if on_true else "b"

    def _node_side_is_partition_side(self, key) -> bool:
        """Does node_in_cut_side==True correspond to the raw partition side?

        Checked through the lowest terminal: its node's side value must
        match its membership in the raw partition mask.
        """
        raw = self.skeleton.cut_partition(key)
        v = self.skeleton.node_in_cut_side(key, self._t0_node)
        return v == bool(raw >> self.t0 & 1)

    # -- units and projections -------------------------------------------

    def _project_units(self) -> None:
        skel = self.skeleton
        nu = len(self.units)
        edge_dist: dict[int, set[int]] = {ui: set() for ui in range(nu)}
        for e in skel.edges:
            if e.kind == "tree":
                cm = self._canon_part(e.partition)
                for ui in range(nu):
                    if not self.steiner_unit[ui] and self._distinguished(cm, ui):
                        edge_dist[ui].add(e.eid)
        for ci, ids in enumerate(skel.cycle_edge_ids):
            k = len(ids)
            for i in range(k):
                for ui in range(nu):
                    if self.steiner_unit[ui]:
                        continue
                    ok = True
                    for j in range(k):
                        if i == j:
                            continue
                        lo, hi = sorted((i, j))
                        cm = self._canon_part(skel.arc_partition(ci, lo, hi))
                        if not self._distinguished(cm, ui):
                            ok = False
                            break
                    if ok:
                        edge_dist[ui].add(ids[i])

        self.pi: list[ProperPath] = [None] * nu  # type: ignore[list-item]
        for ui in range(nu):
            eids = frozenset(edge_dist[ui])
            if self.stretched[ui]:
                if not eids:
                    raise ConstructionError("stretched unit with empty path")
                self.pi[ui] = self._path_from_edges(eids)
            else:
                if eids:
                    raise ConstructionError("terminal unit with path edges")
                nd = self._terminal_node(ui)
                self.pi[ui] = ProperPath(nd, nd, frozenset())

    def _terminal_node(self, ui: int) -> int:
        skel = self.skeleton
        if self.steiner_unit[ui]:
            atom = self.units[ui] & self.smask
            for nd in range(skel.node_count):
                if skel.node_atoms[nd] == atom:
                    return nd
            raise ConstructionError("steiner unit atom missing from skeleton")
        candidates = list(range(skel.node_count))
        for key, _ in self.skeleton.minimal_cuts():
            side = self._cut_side_of_unit(key, ui)
            if side == "mid":
                raise ConstructionError("terminal unit between tight cuts")
            want = side == "a"
            candidates = [
                nd
                for nd in candidates
                if skel.node_in_cut_side(key, nd) == want
            ]
            if not candidates:
                break
        if len(candidates) != 1:
            raise ConstructionError(
                f"terminal unit matches {len(candidates)} skeleton nodes"
            )
        return candidates[0]

    def _path_from_edges(self, eids: frozenset[int]) -> ProperPath:
        skel = self.skeleton
        deg: dict[int, int] = {}
        per_cycle: dict[int, int] = {}
        adj: dict[int, list[int]] = {}
        for eid in eids:
            e = skel.edges[eid]
            if e.kind == "cycle":
                per_cycle[e.cycle] = per_cycle.get(e.cycle, 0) + 1
                if per_cycle[e.cycle] > 1:
                    raise NotAProperPathError("two edges of one cycle")
            for nd in (e.a, e.b):
                deg[nd] = deg.get(nd, 0) + 1
            adj.setdefault(e.a, []).append(e.b)
            adj.setdefault(e.b, []).append(e.a)
        ends = sorted(nd for nd, d in deg.items() if d == 1)
        if len(ends) != 2 or any(d > 2 for d in deg.values()):
            raise NotAProperPathError("edge set is not a simple path")
        seen = {ends[0]}
        frontier = [ends[0]]
        while frontier:
            x = frontier.pop()
            for y in adj.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        if set(deg) != seen:
            raise NotAProperPathError("edge set is disconnected")
        return ProperPath(ends[0], ends[1], eids)

    def _validate_edge_projections(self) -> None:
        """Cross-check the derived edge projections against an independent
        construction from the enumerated mincut family (build-time only)."""
        skel = self.skeleton
        crossing: dict[int, set[tuple[int, int]]] = {}
        for pmask, cuts in self.partition_cuts.items():
            crossed = set()
            for _, u, v in self.graph.edges:
                for m in cuts:
                    if (m >> u ^ m >> v) & 1:
                        crossed.add((u, v))
                        break
            crossing[pmask] = crossed
        seen_pairs = set()
        for eid, u, v in self.graph.edges:
            if self.unit_of[u] == self.unit_of[v]:
                continue
            pair = (self.unit_of[u], self.unit_of[v])
            if pair in seen_pairs:
                continue
            seen_pairs.add(pair)
            eids = set()
            for e in skel.edges:
                if e.kind == "tree":
                    if (u, v) in crossing[self._canon_part(e.partition)]:
                        eids.add(e.eid)
                else:
                    ids = skel.cycle_edge_ids[e.cycle]
                    i = e.eid - ids[0]
                    ok = True
                    for j in range(len(ids)):
                        if j == i:
                            continue
                        lo, hi = sorted((i, j))
                        cm = self._canon_part(skel.arc_partition(e.cycle, lo, hi))
                        if (u, v) not in crossing[cm]:
                            ok = False
                            break
                    if ok:
                        eids.add(e.eid)
            if not eids:
                raise ConstructionError("inter-unit edge with empty projection")
            want = self._path_from_edges(frozenset(eids))
            got = self._span_projection(self.unit_of[u], self.unit_of[v])
            if got.edges != want.edges:
                raise ConstructionError("edge projection derivation mismatch")

    def _span_projection(self, ui: int, vi: int) -> ProperPath:
        """Proper path spanning both unit projections (an edge projection)."""
        pu, pv = self.pi[ui], self.pi[vi]
        need = {pu.a, pu.b, pv.a, pv.b}
        best = None
        for x in (pu.a, pu.b):
            for y in (pv.a, pv.b):
                got = self._proper_path(x, y)
                if got is None:
                    continue
                path, nodes = got
                if not need <= nodes:
                    continue
                if not (pu.edges <= path.edges and pv.edges <= path.edges):
                    continue
                if best is None or len(path.edges) < len(best.edges):
                    best = path
        if best is None:
            raise ConstructionError("no proper path spans the edge endpoints")
        return best

    # -- tau ordering ------------------------------------------------------

    def _build_tau(self) -> None:
        groups: dict[frozenset[int], list[int]] = {}
        for ui in range(len(self.units)):
            if self.stretched[ui]:
                groups.setdefault(self.pi[ui].edges, []).append(ui)
        self.tau: list[TauGroup] = []
        self.tau_of_unit: dict[int, int] = {}
        for path_edges, members in sorted(
            groups.items(), key=lambda kv: min(kv[0])
        ):
            eid = min(path_edges)
            e = self.skeleton.edges[eid]
            if e.kind == "tree":
                key = ("tree", eid)
            else:
                ids = self.skeleton.cycle_edge_ids[e.cycle]
                other = min(i for i in ids if i != eid)
                key = self.skeleton.minimal_cut_of_edges(tuple(sorted((eid, other))))
            cm = self._canon_part(self.skeleton.cut_partition(key))
            ta, tb = self.tights[cm]
            h, mapping = contract(self.graph, [set_of(ta), set_of(tb)])
            s_new = mapping[(ta & -ta).bit_length() - 1]
            t_new = mapping[(tb & -tb).bit_length() - 1]
            dag = build_pq_dag(h, 1 << s_new, 1 << t_new)

            middle = [
                ui
                for ui in range(len(self.units))
                if self._unit_side(cm, self.units[ui]) == "mid"
            ]
            unit_node: dict[int, int] = {}
            for ui in middle:
                nodes = {dag.node_of[mapping[v]] for v in set_of(self.units[ui])}
                if len(nodes) != 1:
                    raise ConstructionError("unit split in ordering dag")
                unit_node[ui] = nodes.pop()
            positions = {ui: dag.topo_index[unit_node[ui]] for ui in members}
            if len(set(positions.values())) != len(positions):
                raise ConstructionError("ordering positions collide")
            order = tuple(sorted(members, key=lambda ui: positions[ui]))

            # nearest source-side mincut of each member: successor closure
            # of {source scc, member scc}; record membership of every
            # strictly-between unit
            member_bits = {ui: 0 for ui in middle}
            src_scc = dag.node_of[s_new]
            for j, uj in enumerate(order):
                closure = dag.reach_from({src_scc, unit_node[uj]})
                for ui in middle:
                    if unit_node[ui] in closure:
                        member_bits[ui] |= 1 << j

            # skeleton node on the source (tight-side 'a') end of the edge
            node_true_is_cm = self._node_side_is_partition_side(key)
            src_node = None
            for nd in (e.a, e.b):
                if self.skeleton.node_in_cut_side(key, nd) == node_true_is_cm:
                    src_node = nd
            if src_node is None:
                raise ConstructionError("no source-side endpoint for group edge")
            gi = len(self.tau)
            self.tau.append(
                TauGroup(
                    path_edges, eid, key, src_node, positions, order, member_bits
                )
            )
            for ui in members:
                self.tau_of_unit[ui] = gi

    def _flesh_edges(self) -> None:
        self.unit_edges: list[tuple[int, int, int]] = []
        for eid, u, v in self.graph.edges:
            cu, cv = self.unit_of[u], self.unit_of[v]
            if cu != cv:
                self.unit_edges.append((eid, cu, cv))

    # -- public queries ----------------------------------------------------

    def phi(self, v: int) -> int:
        return self.unit_of[v]

    def unit_projection(self, ui: int) -> ProperPath:
        return self.pi[ui]

    def edge_projection(self, eid: int) -> ProperPath:
        if eid not in self._edge_ends:
            raise UnknownEdgeIdError(f"no edge {eid}")
        u, v = self._edge_ends[eid]
        if self.unit_of[u] == self.unit_of[v]:
            raise IntraUnitEdgeError("edge lies inside one class")
        return self._span_projection(self.unit_of[u], self.unit_of[v])

    def path_intersection(
        self, p1: ProperPath, p2: ProperPath
    ) -> PathIntersection:
        """Classify how two proper paths meet; constant table probes."""
        skel = self.skeleton
        s_a1, s_b1 = skel.sup_of[p1.a], skel.sup_of[p1.b]
        s_a2, s_b2 = skel.sup_of[p2.a], skel.sup_of[p2.b]
        l1 = skel.sup_lca(s_a1, s_b1)
        l2 = skel.sup_lca(s_a2, s_b2)
        cands = sorted(
            (
                skel.sup_lca(s_a1, s_a2),
                skel.sup_lca(s_a1, s_b2),
                skel.sup_lca(s_b1, s_a2),
                skel.sup_lca(s_b1, s_b2),
            ),
            key=lambda s: skel.sup_depth[s],
        )
        d1, d2 = cands[-1], cands[-2]
        base = max(skel.sup_depth[l1], skel.sup_depth[l2])
        if skel.sup_depth[d2] < base:
            return PathIntersection("disjoint")
        if d1 != d2:
            deep = d1 if skel.sup_depth[d1] >= skel.sup_depth[d2] else d2
            return PathIntersection(
                "shared_edge", edge=skel.sup_parent_edge[deep]
            )
        x = d1
        ci = skel.sup_cycle[x]
        if ci < 0:
            node = skel.sup_members[x][0]
            if self._path_touches_node(p1, node) and self._path_touches_node(
                p2, node
            ):
                return PathIntersection("single_node", node=node)
            return PathIntersection("disjoint")
        c1 = self._chord(p1, x)
        c2 = self._chord(p2, x)
        if c1 is None or c2 is None:
            return PathIntersection("disjoint")
        e1 = self._cycle_edge_between(ci, *c1) if c1[0] != c1[1] else -1
        e2 = self._cycle_edge_between(ci, *c2) if c2[0] != c2[1] else -1
        if e1 >= 0 and e2 >= 0:
            if e1 == e2:
                return PathIntersection("shared_edge", edge=e1)
            return PathIntersection("shared_cycle_pair", edge=e1, edge2=e2)
        common = set(c1) & set(c2)
        if common:
            return PathIntersection("single_node", node=min(common))
        return PathIntersection("disjoint")

    def _path_touches_node(self, p: ProperPath, node: int) -> bool:
        skel = self.skeleton
        s = skel.sup_of[node]
        sa, sb = skel.sup_of[p.a], skel.sup_of[p.b]
        l = skel.sup_lca(sa, sb)
        on = (
            skel.is_sup_ancestor(s, sa) or skel.is_sup_ancestor(s, sb)
        ) and skel.sup_depth[s] >= skel.sup_depth[l]
        if not on:
            return False
        if skel.sup_cycle[s] < 0:
            return True
        chord = self._chord(p, s)
        return chord is not None and node in chord

    def _chord(self, p: ProperPath, x: int) -> Optional[tuple[int, int]]:
        """Nodes where path p enters/leaves supernode x, or None."""
        skel = self.skeleton
        sa, sb = skel.sup_of[p.a], skel.sup_of[p.b]
        l = skel.sup_lca(sa, sb)
        on = (
            skel.is_sup_ancestor(x, sa) or skel.is_sup_ancestor(x, sb)
        ) and skel.sup_depth[x] >= skel.sup_depth[l]
        if not on:
            return None
        ends = []
        for endpoint, s_end in ((p.a, sa), (p.b, sb)):
            if s_end == x:
                ends.append(endpoint)
            elif skel.is_sup_ancestor(x, s_end):
                child = skel.chain_at_depth(s_end, skel.sup_depth[x] + 1)
                ends.append(skel.attach_outer[child])
            else:
                ends.append(skel.attach_inner[x])
        return ends[0], ends[1]

    def _cycle_edge_between(self, ci: int, n1: int, n2: int) -> int:
        skel = self.skeleton
        k = len(skel.cycles[ci])
        p1, p2 = skel.pos_in_cycle[n1], skel.pos_in_cycle[n2]
        if (p1 + 1) % k == p2:
            return skel.cycle_edge_ids[ci][p1]
        if (p2 + 1) % k == p1:
            return skel.cycle_edge_ids[ci][p2]
        raise NotAProperPathError("path uses nonadjacent cycle nodes")

    def _proper_path(
        self, a: int, b: int
    ) -> Optional[tuple[ProperPath, set[int]]]:
        """The unique proper path a..b with its node set, if one exists."""
        skel = self.skeleton
        if a == b:
            return ProperPath(a, a, frozenset()), {a}
        sa, sb = skel.sup_of[a], skel.sup_of[b]
        l = skel.sup_lca(sa, sb)
        route = []
        s = sa
        while s != l:
            route.append(s)
            s = skel.sup_parent[s]
        route.append(l)
        tail = []
        s = sb
        while s != l:
            tail.append(s)
            s = skel.sup_parent[s]
        route.extend(reversed(tail))
        nodes: set[int] = set()
        edges: set[int] = set()
        probe = ProperPath(a, b, frozenset())
        for idx, s in enumerate(route):
            if idx > 0:
                prev = route[idx - 1]
                child = prev if skel.sup_parent[prev] == s else s
                edges.add(skel.sup_parent_edge[child])
            if skel.sup_cycle[s] < 0:
                nodes.add(skel.sup_members[s][0])
                continue
            chord = self._chord(probe, s)
            if chord is None:
                return None
            n1, n2 = chord
            nodes.add(n1)
            nodes.add(n2)
            if n1 != n2:
                k = len(skel.cycles[skel.sup_cycle[s]])
                p1, p2 = skel.pos_in_cycle[n1], skel.pos_in_cycle[n2]
                if (p1 + 1) % k != p2 and (p2 + 1) % k != p1:
                    return None
                edges.add(self._cycle_edge_between(skel.sup_cycle[s], n1, n2))
        return ProperPath(a, b, frozenset(edges)), nodes

    # -- tight cut reporting ------------------------------------------------

    def report_tight_cut(self, node: int, edge_ids: tuple[int, ...]) -> Cut:
        """Vertices whose projections stay on ``node``'s side of the cut."""
        key = self.skeleton.minimal_cut_of_edges(edge_ids)
        want = self.skeleton.node_in_cut_side(key, node)
        side = self._tight_side_mask(key, want)
        if side == 0 or side == self.graph.full_mask():
            raise InvalidMinimalCutError("tight side is degenerate")
        eu, ev = self.graph.edge_arrays()
        return Cut(set_of(side), kernels.cut_capacity(eu, ev, side))

    def _bunch_representative(self, key, want: bool) -> tuple[tuple, bool]:
        """Canonical minimal cut of a bunch, with the side translated.

        A single-sector arc around an empty cycle node realizes the same
        partition as that node's pendant tree edge; the projection
        containment rule for tight cuts is only valid on the tree-edge
        representative (units strictly between the bunch's tight cuts
        project onto the tree edge, not onto the cycle).
        """
        if key[0] != "cyc":
            return key, want
        ci, i, j = key[1], key[2], key[3]
        skel = self.skeleton
        k = len(skel.cycles[ci])
        if j == i + 1:
            pos = j
        elif i == 0 and j == k - 1:
            pos = 0
        else:
            return key, want
        node = skel.cycles[ci][pos]
        pend = next(
            e.eid
            for e in skel.edges
            if e.kind == "tree" and node in (e.a, e.b)
        )
        e = skel.edges[pend]
        sub_node = e.a if e.b == node else e.b
        key2 = ("tree", pend)
        sub_raw = skel.node_in_cut_side(key, sub_node)
        sub_can = skel.node_in_cut_side(key2, sub_node)
        return key2, sub_can if want == sub_raw else not sub_can

    def _tight_side_mask(self, key, want: bool) -> int:
        key, want = self._bunch_representative(key, want)
        mask = 0
        skel = self.skeleton
        for ui, um in enumerate(self.units):
            p = self.pi[ui]
            if (
                skel.node_in_cut_side(key, p.a) == want
                and skel.node_in_cut_side(key, p.b) == want
            ):
                mask |= um
        return mask

    def unit_in_tight(self, key, want: bool, ui: int) -> bool:
        self.probes += 2
        key, want = self._bunch_representative(key, want)
        skel = self.skeleton
        p = self.pi[ui]
        return (
            skel.node_in_cut_side(key, p.a) == want
            and skel.node_in_cut_side(key, p.b) == want
        )

    # -- separating mincut ---------------------------------------------------

    def report_separating_mincut(self, u: int, v: int) -> Optional[Cut]:
        if u == v:
            raise SameVertexError("u == v")
        ui, vi = self.unit_of[u], self.unit_of[v]
        if ui == vi:
            return None
        pu, pv = self.pi[ui], self.pi[vi]
        if pu.edges and pu.edges == pv.edges:
            return self._verified(self._same_path_cut(ui, vi), u, v)
        mask = self._separating_tight(ui, vi)
        if mask is None:
            raise ConstructionError("no separating structure found")
        return self._verified(mask, u, v)

    def _separating_tight(self, ui: int, vi: int) -> Optional[int]:
        for key, _ in self.skeleton.minimal_cuts():
            su = self._projection_cut_side(key, ui)
            sv = self._projection_cut_side(key, vi)
            if "mid" not in (su, sv):
                if su != sv:
                    return self._tight_side_mask(key, su)
                continue
            if su != sv:
                mask = self._nearest_bunch_cut(key, ui, vi)
                if mask is not None:
                    return mask
        return None

    def _projection_cut_side(self, key, ui: int):
        if self.unit_in_tight(key, True, ui):
            return True
        if self.unit_in_tight(key, False, ui):
            return False
        return "mid"

    def tight_masks_for_key(self, key) -> tuple[int, int]:
        """Both tight-cut vertex masks of one bunch, by projection sweep."""
        return (
            self._tight_side_mask(key, True),
            self._tight_side_mask(key, False),
        )

    def _nearest_bunch_cut(self, key, ui: int, vi: int) -> Optional[int]:
        """Minimal mincut of one bunch separating two units, via residual."""
        ta, tb = self.tight_masks_for_key(key)
        h, mapping = contract(self.graph, [set_of(ta), set_of(tb)])
        eu, ev = h.edge_arrays()
        for side_mask, far_mask in ((ta, tb), (tb, ta)):
            s_new = mapping[(side_mask & -side_mask).bit_length() - 1]
            t_new = mapping[(far_mask & -far_mask).bit_length() - 1]
            _, _, _, caps = kernels.max_flow(
                h.vertex_count, eu, ev, 1 << s_new, 1 << t_new
            )
            for first, second in ((ui, vi), (vi, ui)):
                fv = min(set_of(self.units[first]))
                reach = self._residual_reach(h, caps, {s_new, mapping[fv]})
                other = {mapping[x] for x in set_of(self.units[second])}
                if not other & reach:
                    mask = 0
                    for x in range(self.graph.vertex_count):
                        if mapping[x] in reach:
                            mask |= 1 << x
                    return mask
        return None

    @staticmethod
    def _residual_reach(h: MultiGraph, caps, start: set[int]) -> set[int]:
        eu, ev = h.edge_arrays()
        adj: dict[int, list[tuple[int, int]]] = {}
        for i in range(len(eu)):
            adj.setdefault(eu[i], []).append((ev[i], 2 * i))
            adj.setdefault(ev[i], []).append((eu[i], 2 * i + 1))
        out = set(start)
        frontier = list(start)
        while frontier:
            x = frontier.pop()
            for y, a in adj.get(x, ()):
                if caps[a] > 0 and y not in out:
                    out.add(y)
                    frontier.append(y)
        return out

    def _same_path_cut(self, ui: int, vi: int) -> int:
        grp = self.tau[self.tau_of_unit[ui]]
        src_side = self.skeleton.node_in_cut_side(grp.cut_key, grp.source_node)
        src_tight = self._tight_side_mask(grp.cut_key, src_side)
        for member in (ui, vi):
            j = grp.order.index(member)
            other = vi if member == ui else ui
            if not grp.member_bits[other] >> j & 1:
                mask = src_tight
                for w, bits in grp.member_bits.items():
                    if bits >> j & 1:
                        mask |= self.units[w]
                return mask
        raise ConstructionError("ordering group cannot separate the pair")

    def _verified(self, mask: int, u: int, v: int) -> Cut:
        eu, ev = self.graph.edge_arrays()
        cap = kernels.cut_capacity(eu, ev, mask)
        sep = (mask >> u ^ mask >> v) & 1
        if cap != self.lambda_s or not sep:
            raise ConstructionError(
                f"reported cut failed verification (cap={cap}, sep={bool(sep)})"
            )
        return Cut(set_of(mask), cap)

    # -- stats ----------------------------------------------------------------

    def stats(self) -> dict:
        return {
            "units": len(self.units),
            "steiner_units": sum(self.steiner_unit),
            "stretched_units": sum(self.stretched),
            "skeleton_nodes": self.skeleton.node_count,
            "skeleton_cycles": len(self.skeleton.cycles),
        }


def build_carcass(g: MultiGraph) -> Carcass:
    return Carcass(g)
