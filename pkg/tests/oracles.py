"""Independent brute-force oracles shared by the unit and acceptance tests."""

import math
from collections import Counter
from fractions import Fraction
from itertools import combinations, permutations

from collabnet.layout import seriation_objective


def pair_intersection_graph(records):
    """Node and pair counts from per-country record-index sets and their intersections."""
    holders = {}
    for i, r in enumerate(records):
        for c in r.countries:
            holders.setdefault(c, set()).add(i)
    node_yearly = {c: dict(sorted(Counter(records[i].year for i in ids).items())) for c, ids in holders.items()}
    yearly = {}
    for a, b in combinations(sorted(holders), 2):
        both = holders[a] & holders[b]
        if both:
            yearly[(a, b)] = dict(sorted(Counter(records[i].year for i in both).items()))
    return node_yearly, yearly


def brute_force_betweenness(graph):
    """Enumerate every shortest path between every pair explicitly."""
    adj = {n: set() for n in graph.nodes}
    for (a, b), w in graph.edges.items():
        if w > 0:
            adj[a].add(b)
            adj[b].add(a)

    def all_paths(s, t):
        # iterative deepening over simple paths; the first non-empty depth is shortest
        for depth in range(1, len(adj)):
            found = []
            stack = [[s]]
            while stack:
                path = stack.pop()
                if len(path) - 1 == depth:
                    if path[-1] == t:
                        found.append(path)
                    continue
                for nb in adj[path[-1]]:
                    if nb not in path:
                        stack.append(path + [nb])
            if found:
                return found
        return []

    score = dict.fromkeys(graph.nodes, Fraction(0))
    for s, t in combinations(sorted(graph.nodes), 2):
        paths = all_paths(s, t)
        for p in paths:
            for v in p[1:-1]:
                score[v] += Fraction(1, len(paths))
    return score


def direct_quality(graph, assignment, gamma):
    """Double loop over ordered node pairs."""
    nodes = sorted(graph.nodes)
    w = {}
    for (a, b), x in graph.edges.items():
        w[(a, b)] = w[(b, a)] = Fraction(x)
    s = {n: sum(w.get((n, m), 0) for m in nodes) for n in nodes}
    two_m = sum(s.values())
    total = Fraction(0)
    for i in nodes:
        for j in nodes:
            if assignment[i] == assignment[j]:
                total += w.get((i, j), 0) - Fraction(gamma) * s[i] * s[j] / two_m
    return total / two_m


def nmi(a, b):
    """Normalized mutual information (arithmetic-mean normalization)."""
    keys = sorted(a)
    n = len(keys)
    ca, cb, joint = Counter(), Counter(), Counter()
    for k in keys:
        ca[a[k]] += 1
        cb[b[k]] += 1
        joint[(a[k], b[k])] += 1

    def h(c):
        return -sum(v / n * math.log(v / n) for v in c.values())

    mi = sum(v / n * math.log(v * n / (ca[x] * cb[y])) for (x, y), v in joint.items())
    ha, hb = h(ca), h(cb)
    return 1.0 if ha + hb == 0 else 2 * mi / (ha + hb)


def ring_optimum(graph):
    """Exhaustive minimum over rings with the first node fixed."""
    first, *rest = sorted(graph.nodes)
    return min(seriation_objective((first, *p), graph) for p in permutations(rest))
