"""Acceptance suite: one test per criterion, one pass/fail line each.

The corpus follows the harness design: a seeded sample standing in for all
small graphs (n <= 6, m <= 9), 500 seeded random multigraphs up to n = 12,
path / cycle / clique families, and 25 bipartite hard instances up to 8x8.
Oracles are built once per graph in a single pass shared by all criteria.
"""

import itertools

import pytest

from steinercut import reference
from steinercut.graph import capacity, mask_of
from steinercut.sensitivity import build_dual_oracle
from steinercut.verify import (
    _check_gen3star,
    _check_structural_bounds,
    measure,
    ref_capacity_after_failure,
    ref_capacity_after_insert,
)

from corpus import (
    canonical_graphs,
    clique,
    cycle_graph,
    hard_instances,
    path_graph,
    random_corpus,
    small_random,
)


def _terminal_separating(g, side):
    smask = g.steiner_mask()
    m = mask_of(side)
    return bool(m & smask) and bool(~m & smask)


def _post_failure_capacity(g, removed, side):
    m = mask_of(side)
    return sum(
        1
        for eid, u, v in g.edges
        if eid not in removed and (m >> u ^ m >> v) & 1
    )


def _post_insert_capacity(g, pairs, side):
    m = mask_of(side)
    base = capacity(g, side)
    return base + sum(1 for u, v in pairs if (m >> u ^ m >> v) & 1)


@pytest.fixture(scope="module")
def corpus_results():
    graphs = []
    graphs += list(canonical_graphs().values())
    graphs += small_random(count=60)
    graphs += random_corpus(count=500, max_n=12)

    res = {
        "fail": [],
        "insert": [],
        "cut": [],
        "gen3star": [],
        "skeleton": [],
        "structural": [],
        "graphs": 0,
        "fail_pairs": 0,
        "insert_pairs": 0,
        "cut_pairs": 0,
    }
    for gi, g in enumerate(graphs):
        n = g.vertex_count
        try:
            oracle = build_dual_oracle(g)
        except Exception as exc:  # noqa: BLE001
            for key in ("fail", "insert", "cut", "skeleton", "structural"):
                res[key].append((gi, f"build: {type(exc).__name__}: {exc}"))
            continue
        res["graphs"] += 1
        lam = oracle.lambda_s

        # criterion 5: skeleton partitions == realized partitions
        try:
            fam = reference.enumerate_cuts(g, lam + 1)
            smask = g.steiner_mask()
            t0 = (smask & -smask).bit_length() - 1
            realized = set()
            for m in fam.mincut_masks():
                p = m & smask
                realized.add(p if not p >> t0 & 1 else smask & ~p)
            built = {
                oracle.carcass._canon_part(p)
                for _, p in oracle.carcass.skeleton.minimal_cuts()
            }
            if built != realized:
                res["skeleton"].append((gi, "partition sets differ"))
        except Exception as exc:  # noqa: BLE001
            res["skeleton"].append((gi, repr(exc)))

        # criterion 1: dual failure equivalence + verified witnesses
        eids = [eid for eid, _, _ in g.edges]
        for e1, e2 in itertools.combinations(eids, 2):
            res["fail_pairs"] += 1
            try:
                got = oracle.query_fail_capacity(e1, e2)
                want = ref_capacity_after_failure(g, (e1, e2))
                if got != want:
                    res["fail"].append((gi, e1, e2, got, want))
                    continue
                cut = oracle.query_fail_cut(e1, e2)
                if (
                    cut.capacity != want
                    or _post_failure_capacity(g, {e1, e2}, cut.side) != want
                    or not _terminal_separating(g, cut.side)
                ):
                    res["fail"].append((gi, e1, e2, "witness"))
            except Exception as exc:  # noqa: BLE001
                res["fail"].append((gi, e1, e2, repr(exc)))

        # criterion 2: dual insertion equivalence (full grid to n = 8)
        pairs = list(itertools.combinations(range(n), 2))
        if n > 8:
            pairs = pairs[:: max(1, len(pairs) // 10)]
        for p1, p2 in itertools.combinations_with_replacement(pairs, 2):
            res["insert_pairs"] += 1
            try:
                got = oracle.query_insert_capacity(p1, p2)
                want = ref_capacity_after_insert(g, [p1, p2])
                if got != want:
                    res["insert"].append((gi, p1, p2, got, want))
                    continue
                cut = oracle.query_insert_cut(p1, p2)
                if (
                    cut.capacity != want
                    or _post_insert_capacity(g, [p1, p2], cut.side) != want
                    or not _terminal_separating(g, cut.side)
                ):
                    res["insert"].append((gi, p1, p2, "witness"))
            except Exception as exc:  # noqa: BLE001
                res["insert"].append((gi, p1, p2, repr(exc)))

        # criterion 3: three-way classification + witnesses
        for u in range(n):
            for v in range(u + 1, n):
                res["cut_pairs"] += 1
                try:
                    got = oracle.index.query_cut(u, v)
                    ref = reference.min_steiner_cut_separating(g, u, v)
                    want = (
                        "at_lambda"
                        if ref == lam
                        else "at_lambda_plus_1" if ref == lam + 1 else "above"
                    )
                    if got != want:
                        res["cut"].append((gi, u, v, got, want))
                        continue
                    if got != "above":
                        cut = oracle.index.report_witness(u, v, got)
                        if (
                            capacity(g, cut.side) != ref
                            or (u in cut.side) == (v in cut.side)
                        ):
                            res["cut"].append((gi, u, v, "witness"))
                except Exception as exc:  # noqa: BLE001
                    res["cut"].append((gi, u, v, repr(exc)))

        # criterion 4: triple intersection bounds (n <= 10)
        if n <= 10:
            try:
                _check_gen3star(g, reference.enumerate_cuts(g, lam + 1))
            except AssertionError as exc:
                res["gen3star"].append((gi, str(exc)))

        # criterion 8: structural lemma suites
        try:
            _check_structural_bounds(oracle)
        except AssertionError as exc:
            res["structural"].append((gi, str(exc)))

    return res


def test_criterion_1_dual_failure_equivalence(corpus_results):
    r = corpus_results
    ok = not r["fail"]
    print(
        f"\ncriterion 1 dual-failure equivalence: "
        f"{'PASS' if ok else 'FAIL'} "
        f"({r['fail_pairs']} edge pairs over {r['graphs']} graphs, "
        f"{len(r['fail'])} mismatches)"
    )
    assert ok, r["fail"][:5]


def test_criterion_2_dual_insertion_equivalence(corpus_results):
    r = corpus_results
    ok = not r["insert"]
    print(
        f"\ncriterion 2 dual-insertion equivalence: "
        f"{'PASS' if ok else 'FAIL'} "
        f"({r['insert_pairs']} insertion pairs, {len(r['insert'])} mismatches)"
    )
    assert ok, r["insert"][:5]


def test_criterion_3_cut_query_equivalence(corpus_results):
    r = corpus_results
    ok = not r["cut"]
    print(
        f"\ncriterion 3 minimum+1 classification: "
        f"{'PASS' if ok else 'FAIL'} "
        f"({r['cut_pairs']} vertex pairs, {len(r['cut'])} mismatches)"
    )
    assert ok, r["cut"][:5]


def test_criterion_4_triple_intersection_bounds(corpus_results):
    r = corpus_results
    ok = not r["gen3star"]
    print(
        f"\ncriterion 4 triple-intersection bounds: "
        f"{'PASS' if ok else 'FAIL'} ({len(r['gen3star'])} violations)"
    )
    assert ok, r["gen3star"][:5]


def test_criterion_5_skeleton_soundness(corpus_results):
    r = corpus_results
    ok = not r["skeleton"]
    print(
        f"\ncriterion 5 skeleton partition equality: "
        f"{'PASS' if ok else 'FAIL'} ({len(r['skeleton'])} mismatches)"
    )
    assert ok, r["skeleton"][:5]


def test_criterion_6_space_and_probe_regressions():
    families = {
        "path": {n: path_graph(n) for n in range(8, 17)},
        "cycle": {n: cycle_graph(n) for n in range(8, 13)},
        "clique": {n: clique(n) for n in range(8, 10)},
    }
    failures = []
    probe_peaks = {}
    for fname, sizes in families.items():
        ratios_full = {}
        ratios_cap = {}
        peaks = {}
        for n, g in sizes.items():
            oracle = build_dual_oracle(g)
            m = measure(oracle)
            k = len(g.steiner)
            full_bound = g.vertex_count * (g.vertex_count - k + 1)
            cap_bound = (g.vertex_count - k) ** 2 + g.vertex_count
            ratios_full[n] = m["full_entries"] / full_bound
            ratios_cap[n] = m["capacity_only_entries"] / cap_bound
            peak = 0
            eids = [eid for eid, _, _ in g.edges][:6]
            for e1, e2 in itertools.combinations(eids, 2):
                oracle.probes = 0
                oracle.query_fail_capacity(e1, e2)
                peak = max(peak, oracle.probes)
            vps = list(itertools.combinations(range(g.vertex_count), 2))[:6]
            for p1, p2 in itertools.combinations(vps, 2):
                oracle.probes = 0
                oracle.query_insert_capacity(p1, p2)
                peak = max(peak, oracle.probes)
                oracle.index.probes = 0
                oracle.index.query_cut(*p1)
                peak = max(peak, oracle.index.probes)
            peaks[n] = peak
        c_full = ratios_full[8]
        c_cap = ratios_cap[8]
        for n in sizes:
            if ratios_full[n] > c_full + 1e-9:
                failures.append((fname, n, "full", ratios_full[n], c_full))
            if ratios_cap[n] > c_cap + 1e-9:
                failures.append((fname, n, "cap", ratios_cap[n], c_cap))
        if max(peaks.values()) > peaks[8] + 8 or max(peaks.values()) > 64:
            failures.append((fname, "probes", peaks))
        probe_peaks[fname] = peaks
    ok = not failures
    print(
        f"\ncriterion 6 space/probe regressions: "
        f"{'PASS' if ok else 'FAIL'} (probe peaks {probe_peaks})"
    )
    assert ok, failures


def test_criterion_7_adjacency_recovery():
    from steinercut.gen import recover_adjacency

    bad = []
    insts = hard_instances(count=25, max_side=8)
    for i, inst in enumerate(insts):
        oracle = build_dual_oracle(inst.undirected)
        if recover_adjacency(oracle, inst) != inst.adjacency:
            bad.append(i)
    ok = not bad
    print(
        f"\ncriterion 7 adjacency recovery: "
        f"{'PASS' if ok else 'FAIL'} (25 instances, {len(bad)} wrong)"
    )
    assert ok, bad


def test_criterion_8_structural_lemmas(corpus_results):
    r = corpus_results
    ok = not r["structural"]
    print(
        f"\ncriterion 8 structural lemma suites: "
        f"{'PASS' if ok else 'FAIL'} ({len(r['structural'])} violations)"
    )
    assert ok, r["structural"][:5]
