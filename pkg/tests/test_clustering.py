import random
from fractions import Fraction
from statistics import median

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collabnet.clustering import cluster, dense_ids, normalize, quality_score
from collabnet.collabgraph import CollabGraph
from collabnet.fixtures import planted_partition, random_graph
from oracles import direct_quality, nmi


def make_graph(edges, nodes=None):
    names = sorted({n for *e, _ in edges for n in e} | set(nodes or ()))
    return CollabGraph(dict.fromkeys(names, 1), {tuple(sorted(e)): w for *e, w in edges})


TWO_TRIANGLES = make_graph(
    [("A", "B", 1), ("B", "C", 1), ("A", "C", 1), ("D", "E", 1), ("E", "F", 1), ("D", "F", 1)]
)


# normalization


def test_triangle_normalization():
    g = make_graph([("A", "B", 1), ("B", "C", 1), ("A", "C", 1)])
    assert set(normalize(g).edges.values()) == {Fraction(3, 2)}


def test_zero_weight_pair_stays_zero():
    g = make_graph([("A", "B", 2), ("B", "C", 0)])
    assert normalize(g).edges[("B", "C")] == 0


def test_normalization_scale_invariant():
    g = random_graph(random.Random(2), 8)
    scaled = CollabGraph(g.nodes, {p: 10 * w for p, w in g.edges.items()})
    assert normalize(scaled) == normalize(g)


def test_normalize_empty():
    with pytest.raises(ValueError):
        normalize(CollabGraph({"A": 1}, {}))


# quality


def test_one_cluster_is_zero():
    for seed in range(10):
        g = random_graph(random.Random(seed), 7)
        if g.edges:
            assert quality_score(g, dict.fromkeys(g.nodes, 0), 1) == 0


def test_two_triangles_quality():
    assignment = {"A": 0, "B": 0, "C": 0, "D": 1, "E": 1, "F": 1}
    assert quality_score(TWO_TRIANGLES, assignment, 1) == Fraction(1, 2)


def test_quality_matches_double_loop():
    for seed in range(30):
        rng = random.Random(seed)
        g = random_graph(rng, rng.randint(2, 9))
        if not g.edges:
            continue
        assignment = {n: rng.randint(0, 3) for n in g.nodes}
        gamma = Fraction(rng.randint(1, 8), rng.randint(1, 4))
        assert quality_score(g, assignment, gamma) == direct_quality(g, assignment, gamma)


def test_quality_on_normalized_graph_matches_double_loop():
    g = normalize(random_graph(random.Random(1), 7))
    assignment = {n: i % 2 for i, n in enumerate(sorted(g.nodes))}
    assert quality_score(g, assignment, 1) == direct_quality(g, assignment, 1)


def test_quality_label_invariance():
    g = random_graph(random.Random(5), 8)
    a = {n: i % 3 for i, n in enumerate(sorted(g.nodes))}
    b = {n: "xyz"[c] for n, c in a.items()}
    assert quality_score(g, a) == quality_score(g, b)


def test_quality_requires_full_cover():
    with pytest.raises(ValueError):
        quality_score(TWO_TRIANGLES, {"A": 0}, 1)


# clustering


def test_two_triangles_split():
    c = cluster(TWO_TRIANGLES, 1, seed=0)
    assert c.members() == [["A", "B", "C"], ["D", "E", "F"]]
    assert c.quality == Fraction(1, 2)


def test_single_node():
    c = cluster(CollabGraph({"EG": 5}, {}), 1, 0)
    assert c.assignment == {"EG": 0}


def test_dense_ids():
    assert dense_ids({"B": "x", "A": "y", "C": "x"}) == {"A": 0, "B": 1, "C": 1}


def test_every_move_strictly_improves():
    for seed in range(10):
        g, _ = planted_partition(random.Random(seed), blocks=3, block_size=8)
        gains = []
        c = cluster(g, 1, seed, on_move=gains.append)
        assert gains and all(x > 0 for x in gains)
        singletons = quality_score(g, {n: n for n in g.nodes}, 1)
        assert c.quality == singletons + sum(gains)
        assert c.quality >= singletons


def test_quality_is_recomputable():
    g = random_graph(random.Random(8), 12)
    c = cluster(g, Fraction(3, 2), 4)
    assert c.quality == quality_score(g, c.assignment, Fraction(3, 2))
    assert sorted(set(c.assignment.values())) == list(range(c.n_clusters))


def test_deterministic():
    g = random_graph(random.Random(10), 15)
    assert cluster(g, 1, 3) == cluster(g, 1, 3)


def test_relabeling_equivariance():
    g, _ = planted_partition(random.Random(3), blocks=3, block_size=6)
    names = sorted(g.nodes)
    relabel = dict(zip(names, ["Z" + n[1] if n[0] == "A" else "Y" + n[1] for n in names]))
    h = CollabGraph({relabel[n]: v for n, v in g.nodes.items()},
                    {tuple(sorted((relabel[a], relabel[b]))): w for (a, b), w in g.edges.items()})
    cg, ch = cluster(g, 1, 0), cluster(h, 1, 0)
    assert cg.quality == ch.quality
    groups_g = sorted(sorted(relabel[n] for n in m) for m in cg.members())
    assert groups_g == sorted(ch.members())


def test_huge_resolution_gives_singletons():
    g = random_graph(random.Random(2), 10)
    c = cluster(g, 10**6, 0)
    assert c.n_clusters == len(g.nodes)


def test_planted_partition_recovered():
    scores = []
    for seed in range(20):
        g, truth = planted_partition(random.Random(seed))
        scores.append(nmi(truth, cluster(g, 1, seed).assignment))
    assert median(scores) >= 0.95


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4))
def test_never_worse_than_singletons(seed, gamma):
    g = random_graph(random.Random(seed), 8)
    c = cluster(g, gamma, seed)
    assert c.quality >= quality_score(g, {n: n for n in g.nodes}, gamma)


def test_restrict_redensifies():
    c = cluster(TWO_TRIANGLES, 1, 0).restrict({"D", "E"})
    assert c.assignment == {"D": 0, "E": 0}
