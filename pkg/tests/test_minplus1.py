import itertools

import pytest

from steinercut import reference
from steinercut.carcass import build_carcass
from steinercut.errors import (
    ClassHasTerminalError,
    KTooLargeForSmallMincutError,
    NoWitnessError,
    NotAClassError,
    SameVertexError,
)
from steinercut.graph import MultiGraph, capacity, mask_of, set_of
from steinercut.minplus1 import (
    build_class_graph,
    build_index,
    covering_graphs,
    query_belong,
)

from corpus import canonical_graphs, k4, path3, star_of_triangles
from steinercut.gen import gen_random


def test_class_graph_path_singleton():
    c = build_carcass(path3())
    wi = c.unit_of[0]
    cw = build_class_graph(c, wi)
    # contract {1,2} into a terminal: one surviving edge, mincut preserved
    assert cw.graph.vertex_count == 2
    assert cw.graph.edge_count == 1
    assert reference.steiner_mincut(cw.graph)[0] == 1


def test_class_graph_invalid_class():
    c = build_carcass(path3())
    with pytest.raises(NotAClassError):
        build_class_graph(c, 99)


def test_class_graph_invariants_random():
    # class-graph mincut equals lambda_s; subdivision transfer holds
    for trial in range(25):
        n = 4 + trial % 6
        g = gen_random(n, n + 1 + trial % 6, 2 + trial % 3, seed=1300 + trial)
        c = build_carcass(g)
        lam = c.lambda_s
        fam_g = reference.enumerate_cuts(g, lam + 1)
        for wi, um in enumerate(c.units):
            if bin(um).count("1") < 2 or not um & c.smask:
                continue
            cw = build_class_graph(c, wi)
            assert reference.steiner_mincut(cw.graph)[0] == lam
            fam_h = reference.enumerate_cuts(cw.graph, lam + 1)
            # a minimum+1 cut subdivides the class in g iff one does in h
            def splits(masks, members, to=None):
                pats = set()
                for m in masks:
                    part = frozenset(
                        v for v in members if (m >> (to[v] if to else v)) & 1
                    )
                    if part and part != frozenset(members):
                        pats.add(min(part, frozenset(members) - part, key=sorted))
                return pats

            members = sorted(set_of(um))
            pats_g = splits(fam_g.plus1_masks(), members)
            pats_h = splits(fam_h.plus1_masks(), members, to=cw.to_h)
            assert pats_g == pats_h, (trial, wi)


def test_covering_graphs():
    # a stretched class with no terminal: middle of a long doubled path
    g = MultiGraph.build(
        4, [(0, 1), (0, 1), (1, 2), (1, 2), (2, 3), (2, 3)], [0, 3]
    )
    c = build_carcass(g)
    wi = c.unit_of[1]
    assert not c.steiner_unit[wi]
    cw = build_class_graph(c, wi)
    anchor = cw.to_h[1]
    s = cw.bunch_terminals[0].h_vertex
    t = cw.bunch_terminals[1].h_vertex
    g_i, g_u = covering_graphs(cw, anchor, s, t)
    assert g_i.edge_count == cw.graph.edge_count + 2
    assert reference.steiner_mincut(g_i)[0] == c.lambda_s
    assert reference.steiner_mincut(g_u)[0] == c.lambda_s
    # minimum+1 cuts split between the two coverings
    lam = c.lambda_s
    all_w = {
        m & cw.w_mask
        for m in reference.enumerate_cuts(cw.graph, lam + 1).plus1_masks()
    }
    union_w = {
        m & cw.w_mask
        for cover in (g_i, g_u)
        for m in reference.enumerate_cuts(cover, lam + 1).plus1_masks()
    }
    assert all_w <= union_w

    with pytest.raises(ClassHasTerminalError):
        cw2 = build_class_graph(c, c.unit_of[0])
        covering_graphs(cw2, 0, 1, 2)


def test_nearest_cuts_and_marks():
    g = star_of_triangles()
    c = build_carcass(g)
    idx = build_index(c)
    for cs in idx.classes.values():
        insts = (
            [cs.singleton]
            if cs.kind == "singleton"
            else [cov.inst for cov in cs.covers]
            if cs.kind == "covered"
            else [cs.g1]
        )
        for inst in insts:
            for fam in inst.structure.families.values():
                for marks in fam.marks.values():
                    assert len(marks) <= 2


def test_query_belong_basics():
    g = gen_random(7, 12, 2, seed=77)
    c = build_carcass(g)
    idx = build_index(c)
    for wi, cs in idx.classes.items():
        if cs.kind != "singleton":
            continue
        st = cs.singleton.structure
        members = sorted(set_of(st.w_mask))
        u = members[0]
        assert not query_belong(st, u, (u,))
        if st.lambda_w <= 3 and len(members) > 2:
            with pytest.raises(KTooLargeForSmallMincutError):
                query_belong(st, u, tuple(members[1:3]))


def test_query_belong_matches_enumeration():
    for trial in range(20):
        n = 4 + trial % 5
        g = gen_random(n, n + 2 + trial % 6, 2, seed=1500 + trial)
        c = build_carcass(g)
        idx = build_index(c)
        lam = c.lambda_s
        for cs in idx.classes.values():
            if cs.kind != "singleton":
                continue
            st = cs.singleton.structure
            fam_h = reference.enumerate_cuts(st.h, lam + 1)
            full = st.h.full_mask()
            plus1 = {
                m if m >> st.s & 1 else m ^ full
                for m in fam_h.plus1_masks()
            }
            for u in set_of(st.w_mask):
                for v in set_of(st.w_mask):
                    if u == v:
                        continue
                    got = query_belong(st, u, (v,))
                    want = any(
                        m >> u & 1 and not m >> v & 1 for m in plus1
                    )
                    assert got == want, (trial, u, v)


def test_query_cut_examples():
    idx = build_index(build_carcass(k4()))
    assert idx.query_cut(0, 1) == "at_lambda"
    with pytest.raises(SameVertexError):
        idx.query_cut(2, 2)
    with pytest.raises(NoWitnessError):
        idx.report_witness(0, 1, "above")


def test_query_cut_classification_exhaustive():
    for trial in range(35):
        n = 3 + trial % 8
        g = gen_random(n, n + trial % 8, 2 + trial % (n - 1), seed=1700 + trial)
        c = build_carcass(g)
        idx = build_index(c)
        lam = c.lambda_s
        for u in range(n):
            for v in range(u + 1, n):
                got = idx.query_cut(u, v)
                ref = reference.min_steiner_cut_separating(g, u, v)
                want = (
                    "at_lambda"
                    if ref == lam
                    else "at_lambda_plus_1" if ref == lam + 1 else "above"
                )
                assert got == want, (trial, u, v, ref)
                if got == "above":
                    continue
                cut = idx.report_witness(u, v, got)
                assert capacity(g, cut.side) == cut.capacity
                assert (u in cut.side) != (v in cut.side)
                assert cut.capacity == ref


def test_pairwise_complement_terminal_bound():
    # no two stored cuts of one family share two complement terminals
    for trial in range(15):
        g = gen_random(6 + trial % 4, 10 + trial % 6, 3 + trial % 3,
                       seed=1900 + trial)
        idx = build_index(build_carcass(g))
        for cs in idx.classes.values():
            insts = (
                [cs.singleton]
                if cs.kind == "singleton"
                else [cov.inst for cov in cs.covers]
                if cs.kind == "covered"
                else [cs.g1]
            )
            for inst in insts:
                st = inst.structure
                smask = st.h.steiner_mask()
                for fam in st.families.values():
                    for c1, c2 in itertools.combinations(fam.cuts, 2):
                        joint = ~c1 & ~c2 & smask
                        assert bin(joint).count("1") <= 1


def test_incidence_girth():
    # cut/terminal incidence of any family has no 4-cycle: equivalent to
    # the pairwise bound, asserted directly on the bipartite structure
    g = gen_random(8, 14, 4, seed=321)
    idx = build_index(build_carcass(g))
    for cs in idx.classes.values():
        insts = (
            [cs.singleton]
            if cs.kind == "singleton"
            else [cov.inst for cov in cs.covers]
            if cs.kind == "covered"
            else [cs.g1]
        )
        for inst in insts:
            st = inst.structure
            smask = st.h.steiner_mask()
            for fam in st.families.values():
                incident = [set(set_of(~c & smask)) for c in fam.cuts]
                for a, b in itertools.combinations(incident, 2):
                    assert len(a & b) <= 1


def test_no_plus1_cut_subdivides_two_classes():
    for name, g in canonical_graphs().items():
        lam, _ = reference.steiner_mincut(g)
        fam = reference.enumerate_cuts(g, lam + 1)
        class_masks = [
            mask_of(b) for b in reference.connectivity_classes(g)
        ]
        for m in fam.plus1_masks():
            split = sum(1 for wm in class_masks if m & wm not in (0, wm))
            assert split <= 1, name
