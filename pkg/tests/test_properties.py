import random

from steinercut import reference
from steinercut.graph import capacity
from steinercut.verify import _check_gen3star

from corpus import canonical_graphs
from steinercut.gen import gen_random


def crossing_count(g, a_mask, b_mask):
    n = 0
    for _, u, v in g.edges:
        if (a_mask >> u & 1 and not a_mask >> v & 1 and b_mask >> v & 1
                and not b_mask >> u & 1):
            n += 1
        if (a_mask >> v & 1 and not a_mask >> u & 1 and b_mask >> u & 1
                and not b_mask >> v & 1):
            n += 1
    return n


def test_gamma_count_random_crossing_pairs():
    """Edges between the two difference corners are determined by the four
    cut capacities: gamma = (p + q - i - j) / 2 above the mincut."""
    rng = random.Random(23)
    checked = 0
    for trial in range(60):
        n = rng.randint(4, 9)
        g = gen_random(n, n + rng.randint(0, 8), rng.randint(2, n), seed=trial)
        lam, _ = reference.steiner_mincut(g)
        smask = g.steiner_mask()
        full = g.full_mask()
        for _ in range(40):
            a = rng.randrange(1, full)
            b = rng.randrange(1, full)
            corners = (a & b, a & ~b & full, b & ~a & full, full & ~(a | b))
            if not all(corners):
                continue
            if not (a & b & smask and full & ~(a | b) & smask):
                continue
            p = capacity(g, a) - lam
            q = capacity(g, b) - lam
            i = capacity(g, a & b) - lam
            j = capacity(g, a | b) - lam
            gamma = (p + q - i - j) / 2
            diff = a & ~b & full
            diff2 = b & ~a & full
            direct = sum(
                1
                for _, u, v in g.edges
                if (diff >> u & 1 and diff2 >> v & 1)
                or (diff >> v & 1 and diff2 >> u & 1)
            )
            assert direct == gamma, (trial, bin(a), bin(b))
            checked += 1
    assert checked > 100


def test_gen_3_star_canonical():
    for name, g in canonical_graphs().items():
        lam, _ = reference.steiner_mincut(g)
        fam = reference.enumerate_cuts(g, lam + 1)
        _check_gen3star(g, fam)


def test_gen_3_star_random_n10():
    for trial in range(25):
        n = 6 + trial % 5
        g = gen_random(n, n + 2 + trial % 7, 2 + trial % (n - 1),
                       seed=3100 + trial)
        lam, _ = reference.steiner_mincut(g)
        fam = reference.enumerate_cuts(g, lam + 1)
        _check_gen3star(g, fam)


def test_classes_flow_vs_enumeration():
    for trial in range(25):
        n = 3 + trial % 7
        g = gen_random(n, n + trial % 7, 2 + trial % (n - 1), seed=3300 + trial)
        lam, _ = reference.steiner_mincut(g)
        fam = reference.enumerate_cuts(g, lam)
        sep = set()
        for m in fam.mincut_masks():
            for u in range(n):
                for v in range(u + 1, n):
                    if (m >> u ^ m >> v) & 1:
                        sep.add((u, v))
        by_flow = {
            frozenset(b) for b in reference.connectivity_classes(g)
        }
        for block in by_flow:
            for u in block:
                for v in block:
                    if u < v:
                        assert (u, v) not in sep
        blocks2 = []
        left = set(range(n))
        while left:
            u = min(left)
            blk = {
                v for v in left
                if v == u or tuple(sorted((u, v))) not in sep
            }
            blocks2.append(frozenset(blk))
            left -= blk
        assert set(blocks2) == by_flow
