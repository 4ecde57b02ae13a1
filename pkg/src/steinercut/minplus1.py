"""Index of minimum+1 Steiner cuts: answers CUT(u,v,lambda_s+1).

Per connectivity class the index keeps the nearest minimum+1 cuts of every
member inside a contracted class graph, with at most two cut marks per
vertex. Classes without a terminal are first covered (two anchored parallel
edges) so they behave like single-terminal classes; classes with several
terminals split into a terminal-merged instance plus a mincut structure of
the class graph re-terminalized at its own Steiner vertices.

All per-class cut families come from exhaustive enumeration on the (small)
class graphs; every structural bound is asserted during construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import kernels, reference
from .carcass import Carcass, build_carcass
from .errors import (
    ClassHasTerminalError,
    ConstructionError,
    KTooLargeForSmallMincutError,
    NoWitnessError,
    NotAClassError,
    SameVertexError,
    VertexNotInClassError,
)
from .graph import Cut, MultiGraph, contract, set_of, surgery

__all__ = [
    "ClassGraph",
    "NearestCutFamily",
    "SingletonStructure",
    "MinPlusOneIndex",
    "build_class_graph",
    "build_stretched_class_graph",
    "covering_graphs",
    "nearest_cuts",
    "build_index",
]


@dataclass
class BunchTerminal:
    """A contracted far side: its class-graph vertex and its origins."""

    h_vertex: int
    cut_key: tuple  # minimal cut of the host carcass it came from
    origin_mask: int  # vertices of the host graph that were contracted


@dataclass
class ClassGraph:
    """Auxiliary graph for one class: everything beyond each adjacent bunch
    contracted to a single terminal."""

    base_class: int
    graph: MultiGraph
    to_h: list[int]  # host vertex -> class-graph vertex (total)
    w_mask: int  # class members, as class-graph vertex mask
    class_terminal: int  # -1 when the class holds no terminal
    bunch_terminals: list[BunchTerminal]
    lambda_s: int
    lambda_w: int  # global mincut capacity of the class graph

    def origin_of(self, hv: int, host_n: int) -> int:
        mask = 0
        for x in range(host_n):
            if self.to_h[x] == hv:
                mask |= 1 << x
        return mask


def _global_mincut(h: MultiGraph) -> int:
    eu, ev = h.edge_arrays()
    best = None
    for v in range(1, h.vertex_count):
        value, _, _, _ = kernels.max_flow(h.vertex_count, eu, ev, 1, 1 << v)
        if best is None or value < best:
            best = value
    return best if best is not None else 0


def _adjacent_cut_keys(carc: Carcass, node: int) -> list[tuple]:
    """Minimal cuts defined by the skeleton edges at one node."""
    skel = carc.skeleton
    keys = []
    for e in skel.edges:
        if e.kind == "tree" and node in (e.a, e.b):
            keys.append(("tree", e.eid))
    ci = skel.cycle_of_node[node]
    if ci >= 0:
        k = len(skel.cycles[ci])
        p = skel.pos_in_cycle[node]
        i, j = sorted(((p - 1) % k, p))
        keys.append(("cyc", ci, i, j))
    return sorted(keys)


def _contract_far_sides(
    g: MultiGraph, carc: Carcass, node: int, keys: list[tuple], wi: int
) -> ClassGraph:
    """Sequentially contract the far side of every given minimal cut."""
    smask = g.steiner_mask()
    cur = g
    to_cur = list(range(g.vertex_count))
    bunch_terms: list[BunchTerminal] = []
    for key in keys:
        near_terms = 0
        far_terms = 0
        for t in set_of(smask):
            t_node = carc.pi[carc.unit_of[t]].a
            if carc.skeleton.node_in_cut_side(key, t_node) == (
                carc.skeleton.node_in_cut_side(key, node)
            ):
                near_terms |= 1 << to_cur[t]
            else:
                far_terms |= 1 << to_cur[t]
        eu, ev = cur.edge_arrays()
        value, min_side, _, _ = kernels.max_flow(
            cur.vertex_count, eu, ev, near_terms, far_terms
        )
        if value != carc.lambda_s:
            raise ConstructionError("adjacent bunch lost mincut capacity")
        far = cur.full_mask() & ~min_side
        origin = 0
        for x in range(g.vertex_count):
            if far >> to_cur[x] & 1:
                origin |= 1 << x
        cur, mapping = contract(cur, [set_of(far)])
        to_cur = [mapping[c] for c in to_cur]
        hv = mapping[(far & -far).bit_length() - 1]
        bunch_terms.append(BunchTerminal(hv, key, origin))
        # earlier terminals may have been swallowed; refresh their ids
        for bt in bunch_terms[:-1]:
            bt.h_vertex = to_cur[(bt.origin_mask & -bt.origin_mask).bit_length() - 1]

    w_mask = 0
    for v in set_of(carc.units[wi]):
        w_mask |= 1 << to_cur[v]
    term_ids = {bt.h_vertex for bt in bunch_terms}
    for hv in range(cur.vertex_count):
        if not w_mask >> hv & 1 and hv not in term_ids:
            raise ConstructionError("class graph kept an unrelated vertex")
    lam, _ = reference.steiner_mincut(cur)
    if lam != carc.lambda_s:
        raise ConstructionError("class graph changed the mincut capacity")
    cterm = -1
    w_terms = carc.units[wi] & smask
    if w_terms:
        ids = {to_cur[t] for t in set_of(w_terms)}
        if len(ids) != 1 and len(set_of(w_terms)) == 1:
            raise ConstructionError("class terminal merged away")
        cterm = min(ids)
    return ClassGraph(
        wi,
        cur,
        to_cur,
        w_mask,
        cterm,
        bunch_terms,
        carc.lambda_s,
        _global_mincut(cur),
    )


def build_class_graph(carc: Carcass, wi: int) -> ClassGraph:
    """Class graph via the adjacent bunches of the class's skeleton node."""
    if not 0 <= wi < len(carc.units):
        raise NotAClassError(f"no class {wi}")
    if carc.stretched[wi]:
        return build_stretched_class_graph(carc, wi)
    node = carc.pi[wi].a
    keys = _adjacent_cut_keys(carc, node)
    if not keys:
        raise NotAClassError("class node has no adjacent bunch")
    return _contract_far_sides(carc.graph, carc, node, keys, wi)


def build_stretched_class_graph(carc: Carcass, wi: int) -> ClassGraph:
    """Both tight cuts of one bunch on the unit's path become terminals."""
    grp = carc.tau[carc.tau_of_unit[wi]]
    key = grp.cut_key
    cm = carc._canon_part(carc.skeleton.cut_partition(key))
    ta, tb = carc.tights[cm]
    g = carc.graph
    cur, mapping = contract(g, [set_of(ta), set_of(tb)])
    terms = []
    for side in (ta, tb):
        hv = mapping[(side & -side).bit_length() - 1]
        terms.append(BunchTerminal(hv, key, side))
    w_mask = 0
    for v in set_of(carc.units[wi]):
        w_mask |= 1 << mapping[v]
    lam, _ = reference.steiner_mincut(cur)
    if lam != carc.lambda_s:
        raise ConstructionError("stretched class graph changed the mincut")
    return ClassGraph(
        wi, cur, mapping, w_mask, -1, terms, carc.lambda_s, _global_mincut(cur)
    )


def covering_graphs(
    cw: ClassGraph, anchor: int, s: int, t: int
) -> tuple[MultiGraph, MultiGraph]:
    """Anchored coverings: two parallel (s,anchor) resp. (anchor,t) edges."""
    if cw.class_terminal >= 0:
        raise ClassHasTerminalError("covering needs a terminal-free class")
    if anchor == s or anchor == t:
        raise ClassHasTerminalError("anchor collides with a terminal")
    g_i = surgery(cw.graph, add=[(s, anchor), (s, anchor)])
    g_u = surgery(cw.graph, add=[(anchor, t), (anchor, t)])
    return g_i, g_u


@dataclass
class NearestCutFamily:
    """Stored nearest minimum+1 cuts of one vertex in a class graph."""

    u: int
    cuts: list[int]  # class-graph vertex masks, class terminal inside
    comp_w: list[int]  # complement restricted to the class
    comp_terms: list[tuple[int, ...]]  # complement terminals of the graph
    is_l: list[bool]  # exactly one terminal in the complement
    marks: dict[int, tuple[int, ...]]  # class vertex -> covering cut indices


def nearest_cuts(
    h: MultiGraph,
    s: int,
    w_mask: int,
    u: int,
    plus1_masks: list[int],
    lambda_w: int,
) -> NearestCutFamily:
    """Filter the enumerated minimum+1 cuts to the nearest family of u."""
    if not w_mask >> u & 1:
        raise VertexNotInClassError(f"{u} not in class")
    full = h.full_mask()
    cand = []
    for m in plus1_masks:
        if not m >> s & 1:
            m ^= full
        if m >> u & 1 and ~m & w_mask:
            cand.append(m)
    cand = sorted(set(cand))
    kept = []
    for c in cand:
        comp_w = ~c & w_mask
        blocked = 0
        for c2 in cand:
            if c2 != c and c2 & ~c == 0:
                blocked |= ~c2 & w_mask
        if comp_w & ~blocked:
            kept.append(c)

    if lambda_w <= 3:
        kept = _prune_small_mincut(kept, w_mask)

    marks: dict[int, list[int]] = {}
    for i, c in enumerate(kept):
        for v in set_of(~c & w_mask):
            marks.setdefault(v, []).append(i)
    for v, ms in marks.items():
        if len(ms) > 2:
            raise ConstructionError(
                f"vertex {v} covered by {len(ms)} nearest cuts"
            )
    smask = h.steiner_mask()
    comp_terms = [tuple(set_of(~c & smask)) for c in kept]
    return NearestCutFamily(
        u,
        kept,
        [~c & w_mask for c in kept],
        comp_terms,
        [len(ts) == 1 for ts in comp_terms],
        {v: tuple(ms) for v, ms in marks.items()},
    )


def _prune_small_mincut(cuts: list[int], w_mask: int) -> list[int]:
    """Drop cuts whose class complement is covered by two retained ones.

    Iterates to a fixpoint so that no class vertex keeps three marks; a
    triple with a shared vertex always contains a droppable member.
    """
    kept = list(cuts)
    while True:
        over = None
        for v in set_of(w_mask):
            ids = [i for i, c in enumerate(kept) if ~c >> v & 1]
            if len(ids) >= 3:
                over = ids
                break
        if over is None:
            return kept
        dropped = False
        for i in over:
            others = [j for j in over if j != i]
            cover = 0
            for j in others[:2]:
                cover |= ~kept[j] & w_mask
            for j in others:
                for j2 in others:
                    if j < j2:
                        cov = (~kept[j] | ~kept[j2]) & w_mask
                        if ~kept[i] & w_mask & ~cov == 0:
                            kept.pop(i)
                            dropped = True
                            break
                if dropped:
                    break
            if dropped:
                break
        if not dropped:
            raise ConstructionError("no droppable cut in an overfull triple")


@dataclass
class SingletonStructure:
    """All nearest-cut families of one single-terminal class, plus labels."""

    h: MultiGraph
    s: int
    w_mask: int
    lambda_s: int
    lambda_w: int
    families: dict[int, NearestCutFamily]
    subdividing: list[int]  # all minimum+1 cuts subdividing the class
    labels: dict[int, int]  # cut mask -> label terminal
    sstar: tuple[int, ...]


def construct_sstar(
    h: MultiGraph,
    s: int,
    subdividing: list[int],
    families: Optional[dict[int, "NearestCutFamily"]] = None,
    w_mask: int = 0,
    query_edges=(),
) -> tuple[dict[int, int], tuple[int, ...]]:
    """Label every subdividing minimum+1 cut with one terminal.

    Two nearest cuts that a dual-failure query can pair up (both cuts keep
    both failed endpoints' far sides in their complements) must agree on
    the label exactly when a terminal survives outside their union. The
    labels are the components of that must-equal relation, instantiated
    over the class's real edge pairs; the biconditional is validated for
    every such pair and a violation fails the build. Cuts outside any
    relation keep a greedy terminal mark.
    """
    smask = h.steiner_mask()
    remaining = sorted(subdividing)
    parent = {c: c for c in remaining}

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    differ: list[tuple[int, int]] = []
    if families:
        pair_seen = set()
        edges = list(query_edges)
        for i, (x, y) in enumerate(edges):
            for x2, y2 in edges[i + 1 :]:
                for p, q in ((x, y), (y, x)):
                    fam = families.get(p)
                    if fam is None:
                        continue
                    for p2, q2 in ((x2, y2), (y2, x2)):
                        fam2 = families.get(p2)
                        if fam2 is None:
                            continue
                        c1s = [
                            fam.cuts[i1]
                            for i1 in fam.marks.get(q, ())
                            if i1 in fam.marks.get(q2, ())
                        ]
                        c2s = [
                            fam2.cuts[j]
                            for j in fam2.marks.get(q2, ())
                            if j in fam2.marks.get(q, ())
                        ]
                        for c1 in c1s:
                            for c2 in c2s:
                                if c1 == c2 or (c1, c2) in pair_seen:
                                    continue
                                pair_seen.add((c1, c2))
                                pair_seen.add((c2, c1))
                                if ~c1 & ~c2 & smask:
                                    parent[find(c1)] = find(c2)
                                else:
                                    differ.append((c1, c2))
        for c1, c2 in differ:
            if find(c1) == find(c2):
                raise ConstructionError(
                    "label constraints are inconsistent"
                )

    comps: dict[int, list[int]] = {}
    for c in remaining:
        comps.setdefault(find(c), []).append(c)
    labels: dict[int, int] = {}
    used: list[int] = []
    taken: set[int] = set()
    for root in sorted(comps):
        members = comps[root]
        cands = smask
        for c in members:
            cands &= ~c
        # prefer a terminal outside the whole component, then any
        # complement terminal, then a fresh negative id
        pick = None
        for t in set_of(cands & smask):
            if t not in taken:
                pick = t
                break
        if pick is None:
            for c in members:
                for t in set_of(~c & smask):
                    if t not in taken:
                        pick = t
                        break
                if pick is not None:
                    break
        if pick is None:
            pick = -1 - len(used)
        taken.add(pick)
        if pick >= 0:
            used.append(pick)
        for c in members:
            labels[c] = pick
    return labels, tuple(sorted(set(used)))


def build_singleton_structure(
    h: MultiGraph,
    s: int,
    w_mask: int,
    lambda_s: int,
    exclude_edge_ids=frozenset(),
) -> SingletonStructure:
    family = reference.enumerate_cuts(h, lambda_s + 1)
    if family.lambda_s != lambda_s:
        raise ConstructionError("class graph mincut drifted")
    full = h.full_mask()
    plus1 = []
    for m in family.plus1_masks():
        cm = m if m >> s & 1 else m ^ full
        plus1.append(cm)
    plus1 = sorted(set(plus1))
    subdividing = [m for m in plus1 if ~m & w_mask]
    lambda_w = _global_mincut(h)
    families = {
        u: nearest_cuts(h, s, w_mask, u, plus1, lambda_w)
        for u in set_of(w_mask)
    }
    query_edges = [
        (u, v)
        for eid, u, v in h.edges
        if w_mask >> u & 1 and w_mask >> v & 1 and eid not in exclude_edge_ids
    ]
    labels, sstar = construct_sstar(
        h, s, subdividing, families, w_mask, query_edges
    )
    return SingletonStructure(
        h, s, w_mask, lambda_s, lambda_w, families, subdividing, labels, sstar
    )


def query_belong(
    st: SingletonStructure, u: int, vs: tuple[int, ...], probe=None
) -> bool:
    """Is there a stored nearest cut of u with every v in its complement?"""
    if len(vs) > 1 and st.lambda_w <= 3:
        raise KTooLargeForSmallMincutError(
            "multi-vertex membership needs class mincut >= 4"
        )
    fam = st.families.get(u)
    if fam is None:
        raise VertexNotInClassError(f"{u} has no family")
    common: Optional[set[int]] = None
    for v in vs:
        if not st.w_mask >> v & 1:
            raise VertexNotInClassError(f"{v} not in class")
        ids = set(fam.marks.get(v, ()))
        if probe is not None:
            probe()
        common = ids if common is None else common & ids
        if not common:
            return False
    return bool(common)


# -- per-class instances -----------------------------------------------


@dataclass
class SingletonInstance:
    """Singleton structure plus everything needed to lift cuts back."""

    structure: SingletonStructure
    cw: ClassGraph
    host_carcass: Carcass
    host_origin: Optional[list[int]] = None  # host vertex -> G vertex mask
    pre_map: Optional[list[int]] = None  # outer class graph -> host vertex

    def lift_complement(self, cut_mask: int) -> int:
        """Complement of a class-graph cut, as a host-graph vertex mask.

        Class members map straight back; each bunch terminal in the
        complement marks the far component of its minimal cut, and every
        host vertex whose projection touches a marked component is out.
        """
        st = self.structure
        comp = ~cut_mask & st.h.full_mask()
        carc = self.host_carcass
        host = carc.graph
        out = 0
        for x in range(host.vertex_count):
            if comp >> self.cw.to_h[x] & 1 and st.w_mask >> self.cw.to_h[x] & 1:
                out |= 1 << x
        marked = []
        for bt in self.cw.bunch_terminals:
            if comp >> bt.h_vertex & 1:
                near = carc.skeleton.node_in_cut_side(
                    bt.cut_key, carc.pi[self.cw.base_class].a
                )
                marked.append((bt.cut_key, near))
        if marked:
            for x in range(host.vertex_count):
                p = carc.pi[carc.unit_of[x]]
                for key, near in marked:
                    if (
                        carc.skeleton.node_in_cut_side(key, p.a) != near
                        or carc.skeleton.node_in_cut_side(key, p.b) != near
                    ):
                        out |= 1 << x
                        break
        return out

    def host_cut_side(self, cut_mask: int) -> int:
        return self.host_carcass.graph.full_mask() & ~self.lift_complement(
            cut_mask
        )


@dataclass
class CoverInstance:
    """Singleton instance living inside one covering graph.

    The covering graph shares vertex ids with the outer class graph, whose
    ``base_origin`` expands vertices back to graph vertex masks.
    """

    inst: SingletonInstance
    base_origin: list[int]


@dataclass
class ClassStructure:
    kind: str  # singleton | covered | multi
    w_mask_g: int
    singleton: Optional[SingletonInstance] = None
    covers: tuple[CoverInstance, ...] = ()
    g1: Optional[SingletonInstance] = None
    r2: Optional["SplitTerminalStructure"] = None
    cw: Optional[ClassGraph] = None


@dataclass
class SplitTerminalStructure:
    """Mincut structure of the class graph re-terminalized at its own
    Steiner vertices (carcass at capacity lambda_s+1)."""

    h2: MultiGraph
    carcass: Carcass
    cw: ClassGraph
    origin: list[int]  # h2 vertex -> G vertex mask


class MinPlusOneIndex:
    def __init__(self, carcass: Carcass):
        self.carcass = carcass
        self.graph = carcass.graph
        self.lambda_s = carcass.lambda_s
        self.probes = 0
        self.classes: dict[int, ClassStructure] = {}
        for wi, um in enumerate(carcass.units):
            if bin(um).count("1") < 2:
                continue
            self.classes[wi] = self._build_class(wi)

    # -- construction -----------------------------------------------------

    def _origin_list(self, cw: ClassGraph) -> list[int]:
        n = self.graph.vertex_count
        origins = [0] * cw.graph.vertex_count
        for x in range(n):
            origins[cw.to_h[x]] |= 1 << x
        return origins

    def _build_class(self, wi: int) -> ClassStructure:
        carc = self.carcass
        um = carc.units[wi]
        k_s = bin(um & carc.smask).count("1")
        if k_s == 1:
            cw = build_class_graph(carc, wi)
            st = build_singleton_structure(
                cw.graph, cw.class_terminal, cw.w_mask, self.lambda_s
            )
            inst = SingletonInstance(st, cw, carc)
            return ClassStructure("singleton", um, singleton=inst, cw=cw)
        if k_s == 0:
            cw = build_class_graph(carc, wi)
            covers = self._build_covers(wi, cw)
            return ClassStructure("covered", um, covers=covers, cw=cw)
        cw = build_class_graph(carc, wi)
        g1_inst = self._build_merged_terminal_instance(wi, cw)
        r2 = self._build_split_terminal_structure(wi, cw)
        return ClassStructure("multi", um, g1=g1_inst, r2=r2, cw=cw)

    def _build_covers(self, wi: int, cw: ClassGraph) -> tuple[CoverInstance, ...]:
        """One anchored covering per adjacent-bunch terminal.

        A minimum+1 cut subdividing the class keeps the anchor on one side
        together with some terminal of the class graph, so it survives in
        that terminal's covering; two coverings are only complete when the
        class graph has exactly two terminals.
        """
        carc = self.carcass
        anchor = cw.to_h[min(set_of(carc.units[wi]))]
        if len(cw.bunch_terminals) < 2:
            raise ConstructionError("terminal-free class with one bunch")
        nid = cw.graph.next_edge_id()
        added_ids = frozenset((nid, nid + 1))
        base_origin = self._origin_list(cw)
        covers = []
        for bt in cw.bunch_terminals:
            merged_term = bt.h_vertex
            cover = surgery(
                cw.graph, add=[(merged_term, anchor), (merged_term, anchor)]
            )
            sub = build_carcass(cover)
            if sub.lambda_s != self.lambda_s:
                raise ConstructionError("covering changed the mincut capacity")
            merged_class = sub.unit_of[merged_term]
            got = sub.units[merged_class]
            # the anchored class absorbs the anchor's old class and may
            # swallow further middle units; it must stay single-terminal
            want = cw.w_mask | (1 << merged_term)
            if want & ~got or bin(got & cover.steiner_mask()).count("1") != 1:
                raise ConstructionError("covering did not merge the class")
            cw2 = build_class_graph(sub, merged_class)
            st = build_singleton_structure(
                cw2.graph,
                cw2.class_terminal,
                cw2.w_mask,
                self.lambda_s,
                exclude_edge_ids=added_ids,
            )
            inst = SingletonInstance(st, cw2, sub)
            covers.append(CoverInstance(inst, base_origin))
        return tuple(covers)

    def _build_merged_terminal_instance(
        self, wi: int, cw: ClassGraph
    ) -> SingletonInstance:
        carc = self.carcass
        terms = [
            cw.to_h[t] for t in set_of(carc.units[wi] & carc.smask)
        ]
        h1, mapping = contract(cw.graph, [set(terms)])
        sub = build_carcass(h1)
        if sub.lambda_s != self.lambda_s:
            raise ConstructionError("terminal merge changed the mincut")
        s_new = mapping[terms[0]]
        merged_class = sub.unit_of[s_new]
        want = 0
        for hv in set_of(cw.w_mask):
            want |= 1 << mapping[hv]
        got = sub.units[merged_class]
        if want & ~got or bin(got & h1.steiner_mask()).count("1") != 1:
            raise ConstructionError("terminal merge did not keep the class")
        cw2 = build_class_graph(sub, merged_class)
        st = build_singleton_structure(
            cw2.graph, cw2.class_terminal, cw2.w_mask, self.lambda_s
        )
        inst = SingletonInstance(st, cw2, sub)
        origin = self._origin_list(cw)
        h1_origin = [0] * h1.vertex_count
        for hv in range(cw.graph.vertex_count):
            h1_origin[mapping[hv]] |= origin[hv]
        inst.host_origin = h1_origin
        inst.pre_map = mapping
        return inst

    def _build_split_terminal_structure(
        self, wi: int, cw: ClassGraph
    ) -> Optional[SplitTerminalStructure]:
        """Mincut structure for cuts splitting the class's own terminals.

        When no minimum+1 cut separates them (the re-terminalized graph's
        mincut exceeds lambda_s+1) there is nothing to store and queries on
        this route always answer no.
        """
        carc = self.carcass
        terms = {cw.to_h[t] for t in set_of(carc.units[wi] & carc.smask)}
        h2 = MultiGraph.build(
            cw.graph.vertex_count,
            [(eid, u, v) for eid, u, v in cw.graph.edges],
            terms,
        )
        lam2, _ = reference.steiner_mincut(h2)
        if lam2 > self.lambda_s + 1:
            return None
        if lam2 < self.lambda_s + 1:
            raise ConstructionError(
                "split-terminal class graph below capacity minimum+1"
            )
        sub = build_carcass(h2)
        return SplitTerminalStructure(h2, sub, cw, self._origin_list(cw))

    # -- queries ----------------------------------------------------------

    def _probe(self) -> None:
        self.probes += 1

    def class_of(self, v: int) -> int:
        return self.carcass.unit_of[v]

    def separated_at_plus1(self, wi: int, u: int, v: int) -> bool:
        """Do two same-class vertices split at capacity lambda_s+1?"""
        cs = self.classes.get(wi)
        if cs is None:
            raise VertexNotInClassError("class too small to query")
        if cs.kind == "singleton":
            st = cs.singleton.structure
            hu, hv = cs.cw.to_h[u], cs.cw.to_h[v]
            return query_belong(st, hu, (hv,), self._probe) or query_belong(
                st, hv, (hu,), self._probe
            )
        if cs.kind == "covered":
            for cov in cs.covers:
                st = cov.inst.structure
                hu = cov.inst.cw.to_h[cs.cw.to_h[u]]
                hv = cov.inst.cw.to_h[cs.cw.to_h[v]]
                if query_belong(st, hu, (hv,), self._probe) or query_belong(
                    st, hv, (hu,), self._probe
                ):
                    return True
            return False
        # multi: terminal-keeping cuts via g1, terminal-splitting via r2
        g1 = cs.g1
        hu = g1.cw.to_h[g1.pre_map[cs.cw.to_h[u]]]
        hv = g1.cw.to_h[g1.pre_map[cs.cw.to_h[v]]]
        if query_belong(g1.structure, hu, (hv,), self._probe) or query_belong(
            g1.structure, hv, (hu,), self._probe
        ):
            return True
        r2 = cs.r2
        self._probe()
        if r2 is None:
            return False
        return r2.carcass.unit_of[cs.cw.to_h[u]] != r2.carcass.unit_of[
            cs.cw.to_h[v]
        ]

    def query_cut(self, u: int, v: int) -> str:
        """Three-way classification of the least Steiner cut separating u,v."""
        if u == v:
            raise SameVertexError("u == v")
        self._probe()
        wu, wv = self.carcass.unit_of[u], self.carcass.unit_of[v]
        if wu != wv:
            return "at_lambda"
        return (
            "at_lambda_plus_1"
            if self.separated_at_plus1(wu, u, v)
            else "above"
        )

    def report_witness(self, u: int, v: int, decision: str) -> Cut:
        if decision == "above":
            raise NoWitnessError("no cut at or below lambda_s+1")
        if decision == "at_lambda":
            cut = self.carcass.report_separating_mincut(u, v)
            if cut is None:
                raise NoWitnessError("vertices share a class")
            return cut
        wi = self.carcass.unit_of[u]
        mask = self._plus1_witness_mask(wi, u, v)
        return self._verified_plus1(mask, u, v)

    def _plus1_witness_mask(self, wi: int, u: int, v: int) -> int:
        cs = self.classes[wi]
        if cs.kind == "singleton":
            inst = cs.singleton
            hu, hv = cs.cw.to_h[u], cs.cw.to_h[v]
            cmask = self._family_cut(inst.structure, hu, hv)
            return self.graph.full_mask() & ~inst.lift_complement(cmask)
        if cs.kind == "covered":
            for cov in cs.covers:
                inst = cov.inst
                hu = inst.cw.to_h[cs.cw.to_h[u]]
                hv = inst.cw.to_h[cs.cw.to_h[v]]
                cmask = self._family_cut(inst.structure, hu, hv, soft=True)
                if cmask is None:
                    continue
                cover_side = inst.host_cut_side(cmask)
                return self._expand_origin(cover_side, cov.base_origin)
            raise NoWitnessError("no covering instance separates the pair")
        g1 = cs.g1
        hu = g1.cw.to_h[g1.pre_map[cs.cw.to_h[u]]]
        hv = g1.cw.to_h[g1.pre_map[cs.cw.to_h[v]]]
        cmask = self._family_cut(g1.structure, hu, hv, soft=True)
        if cmask is not None:
            host_side = g1.host_cut_side(cmask)
            return self._expand_origin(host_side, g1.host_origin)
        r2 = cs.r2
        if r2 is None:
            raise NoWitnessError("pair not separated at lambda_s+1")
        cut = r2.carcass.report_separating_mincut(
            cs.cw.to_h[u], cs.cw.to_h[v]
        )
        if cut is None:
            raise NoWitnessError("pair not separated at lambda_s+1")
        return self._expand_origin(cut.mask(), r2.origin)

    def _family_cut(
        self, st: SingletonStructure, hu: int, hv: int, soft: bool = False
    ):
        for a, b in ((hu, hv), (hv, hu)):
            fam = st.families.get(a)
            if fam is None:
                continue
            ids = fam.marks.get(b, ())
            if ids:
                return fam.cuts[ids[0]]
        if soft:
            return None
        raise NoWitnessError("no stored cut separates the pair")

    @staticmethod
    def _expand_origin(mask: int, origin: list[int]) -> int:
        out = 0
        for hv in range(len(origin)):
            if mask >> hv & 1:
                out |= origin[hv]
        return out

    def _verified_plus1(self, mask: int, u: int, v: int) -> Cut:
        eu, ev = self.graph.edge_arrays()
        cap = kernels.cut_capacity(eu, ev, mask)
        sm = self.graph.steiner_mask()
        ok = (
            cap == self.lambda_s + 1
            and (mask >> u ^ mask >> v) & 1
            and mask & sm
            and ~mask & sm
        )
        if not ok:
            raise ConstructionError(
                f"minimum+1 witness failed verification (cap={cap})"
            )
        return Cut(set_of(mask), cap)


def build_index(carcass: Carcass) -> MinPlusOneIndex:
    return MinPlusOneIndex(carcass)
