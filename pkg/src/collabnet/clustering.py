"""Association-strength normalization and modularity clustering.

Quality with resolution ``gamma`` is::

    Q = 1/(2m) * sum over ordered pairs (i, j) in the same cluster of
        (w_ij - gamma * s_i * s_j / (2m))

with ``w_ii = 0``, ``s_i`` the node strength and ``m`` the total weight.
Everything is computed with integers or fractions so results are exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Union

from .collabgraph import CollabGraph, Pair


@dataclass(frozen=True)
class NormalizedGraph:
    nodes: dict[str, int]
    edges: dict[Pair, Fraction]


@dataclass(frozen=True)
class Clustering:
    assignment: dict[str, int]
    resolution: Fraction
    quality: Fraction

    @property
    def n_clusters(self) -> int:
        return len(set(self.assignment.values()))

    def members(self) -> list[list[str]]:
        groups: list[list[str]] = [[] for _ in range(self.n_clusters)]
        for code in sorted(self.assignment):
            groups[self.assignment[code]].append(code)
        return groups

    def restrict(self, keep) -> "Clustering":
        """Assignment limited to ``keep`` with ids re-densified; quality is carried over."""
        keep = set(keep)
        return Clustering(
            dense_ids({n: c for n, c in self.assignment.items() if n in keep}),
            self.resolution,
            self.quality,
        )


AnyGraph = Union[CollabGraph, NormalizedGraph]


def normalize(graph: CollabGraph) -> NormalizedGraph:
    """Association strength ``a_ij = 2m * w_ij / (s_i * s_j)``."""
    m = sum(graph.edges.values())
    if m <= 0:
        raise ValueError("cannot normalize a graph with no edge weight")
    s = graph.strength()
    return NormalizedGraph(
        nodes=dict(graph.nodes),
        edges={
            (a, b): (Fraction(2 * m * w, s[a] * s[b]) if w else Fraction(0))
            for (a, b), w in graph.edges.items()
        },
    )


def _strengths(graph: AnyGraph) -> dict:
    s = dict.fromkeys(graph.nodes, 0)
    for (a, b), w in graph.edges.items():
        s[a] += w
        s[b] += w
    return s


def dense_ids(assignment: Mapping[str, object]) -> dict[str, int]:
    """Relabel clusters 0..k-1 in order of each cluster's smallest member."""
    first: dict[object, str] = {}
    for node in sorted(assignment):
        first.setdefault(assignment[node], node)
    order = {label: i for i, label in enumerate(sorted(first, key=first.__getitem__))}
    return {n: order[assignment[n]] for n in sorted(assignment)}


def quality_score(graph: AnyGraph, assignment: Mapping[str, object], resolution=1) -> Fraction:
    missing = set(graph.nodes) - set(assignment)
    if missing:
        raise ValueError(f"assignment does not cover {sorted(missing)}")
    gamma = Fraction(resolution)
    two_m = 2 * sum(graph.edges.values())
    if two_m == 0:
        return Fraction(0)
    s = _strengths(graph)
    internal: dict[object, Fraction] = {}
    total: dict[object, Fraction] = {}
    for (a, b), w in graph.edges.items():
        if assignment[a] == assignment[b]:
            c = assignment[a]
            internal[c] = internal.get(c, 0) + 2 * w
    for n in graph.nodes:
        c = assignment[n]
        total[c] = total.get(c, 0) + s[n]
    q = sum(
        (Fraction(internal.get(c, 0)) - gamma * Fraction(total[c]) ** 2 / two_m for c in total),
        Fraction(0),
    )
    return q / two_m


class _Level:
    """Working graph for one aggregation level. Self-loops are dropped: they
    never change a move gain, and strengths keep the original totals."""

    def __init__(self, labels, strength, adj):
        self.labels = labels  # smallest original code in each super-node
        self.strength = strength
        self.adj = adj  # list of {neighbor index: weight}


def _local_moving(level: _Level, gamma: Fraction, two_m, rng: random.Random, on_move) -> list[int]:
    n = len(level.labels)
    comm = list(range(n))
    tot = list(level.strength)
    # scaled gain: 2m * den * k_iC - num * s_i * S_C, an integer when weights are
    num, den = gamma.numerator, gamma.denominator
    comm_label = list(level.labels)  # label used for tie-breaking between clusters
    members = [{i} for i in range(n)]
    order = list(range(n))
    rng.shuffle(order)
    improved = True
    while improved:
        improved = False
        for i in order:
            ci = comm[i]
            si = level.strength[i]
            links: dict[int, object] = {}
            for j, w in level.adj[i].items():
                links[comm[j]] = links.get(comm[j], 0) + w
            stay_tot = tot[ci] - si

            def score(c, k, t):
                return two_m * den * k - num * si * t

            stay = score(ci, links.get(ci, 0), stay_tot)
            best_c, best = ci, stay
            best_label = min(members[ci] - {i}, key=level.labels.__getitem__, default=None)
            best_label = level.labels[best_label] if best_label is not None else level.labels[i]
            candidates = [(c, k) for c, k in links.items() if c != ci]
            for c, k in candidates:
                g = score(c, k, tot[c])
                lab = comm_label[c]
                if g > best or (g == best and lab < best_label):
                    best_c, best, best_label = c, g, lab
            # an empty cluster scores 0
            if stay_tot > 0 and 0 > best:
                empty = next(c for c in range(n) if not members[c])
                best_c, best = empty, 0
            if best_c != ci and best > stay:
                members[ci].discard(i)
                members[best_c].add(i)
                comm[i] = best_c
                tot[ci] -= si
                tot[best_c] += si
                for c in (ci, best_c):
                    comm_label[c] = min((level.labels[j] for j in members[c]), default="")
                improved = True
                if on_move is not None:
                    on_move(Fraction(2 * (best - stay), two_m * two_m * den))
    return comm


def cluster(
    graph: AnyGraph,
    resolution=1,
    seed: int = 0,
    on_move: Callable[[Fraction], None] | None = None,
) -> Clustering:
    """Local moving from singletons, then aggregation, until stable.

    Nodes are visited in a seeded shuffle; equal gains go to the cluster
    with the lowest country code. ``on_move`` receives the exact quality
    gain of every accepted move.
    """
    gamma = Fraction(resolution)
    if gamma <= 0:
        raise ValueError("resolution must be positive")
    codes = sorted(graph.nodes)
    if not codes:
        raise ValueError("cannot cluster an empty graph")
    index = {c: i for i, c in enumerate(codes)}
    s = _strengths(graph)
    adj: list[dict[int, object]] = [{} for _ in codes]
    for (a, b), w in graph.edges.items():
        if w:
            adj[index[a]][index[b]] = w
            adj[index[b]][index[a]] = w
    level = _Level(list(codes), [s[c] for c in codes], adj)
    two_m = 2 * sum(graph.edges.values())
    node_to_super = list(range(len(codes)))
    rng = random.Random(seed)

    while two_m > 0:
        comm = _local_moving(level, gamma, two_m, rng, on_move)
        used = sorted(set(comm), key=lambda c: min(level.labels[i] for i, x in enumerate(comm) if x == c))
        if len(used) == len(comm):
            break
        renum = {c: k for k, c in enumerate(used)}
        node_to_super = [renum[comm[x]] for x in node_to_super]
        labels = [""] * len(used)
        strength = [0] * len(used)
        new_adj: list[dict[int, object]] = [{} for _ in used]
        for i, c in enumerate(comm):
            k = renum[c]
            labels[k] = min(labels[k], level.labels[i]) if labels[k] else level.labels[i]
            strength[k] += level.strength[i]
            for j, w in level.adj[i].items():
                kj = renum[comm[j]]
                if kj != k:
                    new_adj[k][kj] = new_adj[k].get(kj, 0) + w
        level = _Level(labels, strength, new_adj)

    assignment = dense_ids({c: node_to_super[i] for i, c in enumerate(codes)})
    return Clustering(assignment, gamma, quality_score(graph, assignment, gamma))
