"""Circular seriation (the collaboration wheel) and the 2-D similarity map."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .clustering import AnyGraph, Clustering, NormalizedGraph


@dataclass(frozen=True)
class CircularOrder:
    order: tuple[str, ...]
    objective: Fraction


@dataclass(frozen=True)
class MapCoordinates:
    coords: dict[str, tuple[float, float]]
    stress: float
    trace: tuple[float, ...] = field(default=(), compare=False)
    iterations: int = field(default=0, compare=False)


def ring_distance(i: int, j: int, n: int) -> int:
    d = abs(i - j) % n
    return min(d, n - d)


def seriation_objective(order: CircularOrder | Sequence[str], graph: AnyGraph) -> Fraction:
    """Sum of ``w_ij * ring_distance(i, j)`` over the graph's edges."""
    seq = tuple(order.order if isinstance(order, CircularOrder) else order)
    if len(seq) != len(set(seq)) or set(seq) != set(graph.nodes):
        raise ValueError("order must be a permutation of the graph's nodes")
    pos = {code: i for i, code in enumerate(seq)}
    n = len(seq)
    return sum(
        (Fraction(w) * ring_distance(pos[a], pos[b], n) for (a, b), w in graph.edges.items()),
        Fraction(0),
    )


def _components(codes: list[str], adj: dict[str, dict[str, object]]) -> list[list[str]]:
    seen: set[str] = set()
    comps = []
    for c in codes:
        if c in seen:
            continue
        stack, comp = [c], []
        seen.add(c)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        comps.append(sorted(comp))
    comps.sort(key=lambda comp: (-len(comp), comp[0]))
    return comps


def _adjacency(graph: AnyGraph) -> dict[str, dict[str, object]]:
    adj: dict[str, dict[str, object]] = {n: {} for n in graph.nodes}
    for (a, b), w in graph.edges.items():
        if w:
            adj[a][b] = w
            adj[b][a] = w
    return adj


def _fiedler_order(comp: list[str], adj) -> list[str]:
    """Order one connected component by its Fiedler vector."""
    if len(comp) <= 2:
        return comp
    idx = {c: i for i, c in enumerate(comp)}
    lap = np.zeros((len(comp), len(comp)))
    for a in comp:
        for b, w in adj[a].items():
            lap[idx[a], idx[b]] -= float(w)
            lap[idx[a], idx[a]] += float(w)
    _, vecs = np.linalg.eigh(lap)
    v = vecs[:, 1]
    # eigenvector sign is arbitrary: make the largest-magnitude entry positive
    pivot = max(range(len(comp)), key=lambda i: (round(abs(v[i]), 12), -i))
    if v[pivot] < 0:
        v = -v
    return [comp[i] for i in sorted(range(len(comp)), key=lambda i: (round(v[i], 12), comp[i]))]


def spectral_order(graph: AnyGraph, clustering: Clustering | None = None) -> list[str]:
    """Fiedler ordering per connected component, components largest first.

    With a clustering, clusters are laid out as contiguous blocks in order
    of their first member's spectral position.
    """
    adj = _adjacency(graph)
    seq = [c for comp in _components(sorted(graph.nodes), adj) for c in _fiedler_order(comp, adj)]
    if clustering is None:
        return seq
    rank = {c: i for i, c in enumerate(seq)}
    blocks: dict[int, list[str]] = {}
    for c in seq:
        blocks.setdefault(clustering.assignment[c], []).append(c)
    return [c for block in sorted(blocks.values(), key=lambda b: rank[b[0]]) for c in block]


def _contiguous(labels: np.ndarray) -> bool:
    """True if every label occupies one arc of the ring."""
    n = len(labels)
    if n == 0:
        return True
    breaks = int(np.count_nonzero(labels != np.roll(labels, 1)))
    return breaks == 0 or breaks == len(set(labels.tolist()))


def _two_opt(perm: list[int], weights: np.ndarray, rng: random.Random, groups: np.ndarray | None):
    n = len(perm)
    idx = np.arange(n)
    ring = np.abs(idx[:, None] - idx[None, :])
    ring = np.minimum(ring, n - ring)

    def cost(p):
        p = np.asarray(p)
        return (weights[np.ix_(p, p)] * ring).sum()

    current = cost(perm)
    improved = True
    while improved:
        improved = False
        starts = list(range(n))
        rng.shuffle(starts)
        for i in starts:
            for j in range(n):
                if j == i:
                    continue
                a, b = min(i, j), max(i, j)
                # segment reversal, then a plain two-position swap
                for cand in (
                    perm[:a] + perm[a : b + 1][::-1] + perm[b + 1 :],
                    perm[:a] + [perm[b]] + perm[a + 1 : b] + [perm[a]] + perm[b + 1 :],
                ):
                    if groups is not None and not _contiguous(groups[cand]):
                        continue
                    c = cost(cand)
                    if c < current:
                        perm, current = cand, c
                        improved = True
    return perm


def circular_order(graph: AnyGraph, clustering: Clustering | None = None, seed: int = 0) -> CircularOrder:
    """Ring order that keeps heavily linked nodes close together.

    Starts from the spectral order and applies reversal and swap moves,
    accepting only strict decreases of the objective, until a full pass
    changes nothing. Cluster blocks stay contiguous when a clustering is
    given.
    """
    if not graph.nodes:
        raise ValueError("cannot order an empty graph")
    start = spectral_order(graph, clustering)
    n = len(start)
    index = {c: i for i, c in enumerate(start)}
    exact = all(isinstance(w, int) for w in graph.edges.values())
    weights = np.zeros((n, n), dtype=np.int64 if exact else float)
    for (a, b), w in graph.edges.items():
        weights[index[a], index[b]] = weights[index[b], index[a]] = w if exact else float(w)
    groups = None
    if clustering is not None:
        groups = np.array([clustering.assignment[c] for c in start])
    perm = _two_opt(list(range(n)), weights, random.Random(seed), groups) if n > 3 else list(range(n))
    order = tuple(start[i] for i in perm)
    return CircularOrder(order, seriation_objective(order, graph))


def _mean_distance(x: np.ndarray) -> float:
    n = len(x)
    diff = x[:, None, :] - x[None, :, :]
    d = np.sqrt((diff**2).sum(-1))
    return d.sum() / (n * (n - 1))


def _stress(x: np.ndarray, a: np.ndarray) -> float:
    diff = x[:, None, :] - x[None, :, :]
    return float((a * (diff**2).sum(-1)).sum() / 2)


def canonicalize(codes: Sequence[str], x: np.ndarray) -> np.ndarray:
    """Centre, rescale to unit mean pairwise distance, rotate the principal
    axis onto x and fix reflections by the first node's sign."""
    x = x - x.mean(axis=0)
    x = x / _mean_distance(x)
    _, _, vt = np.linalg.svd(x, full_matrices=False)
    x = x @ vt.T
    first = min(range(len(codes)), key=codes.__getitem__)
    for axis in range(2):
        col = x[:, axis]
        ref = col[first] if abs(col[first]) > 1e-12 else next((v for v in col if abs(v) > 1e-12), 0.0)
        if ref < 0:
            x[:, axis] = -col
    x[np.abs(x) < 1e-15] = 0.0
    return x


def map_layout(ngraph: NormalizedGraph, seed: int = 0, tol: float = 1e-6, max_iter: int = 1000) -> MapCoordinates:
    """Minimize ``sum a_ij * |x_i - x_j|^2`` at unit mean pairwise distance.

    Works on the equivalent unconstrained objective
    ``sum a_ij d_ij^2 - sum d_ij`` by iterative majorization, rescaling
    each iterate to its optimal size, so the recorded stress (taken at unit
    mean distance) never increases. Disconnected graphs get a weak uniform
    attraction (1e-3 of the mean positive strength) so components stay
    finite; the reported stress includes it.
    """
    codes = sorted(ngraph.nodes)
    n = len(codes)
    if n < 2:
        raise ValueError("map_layout needs at least two nodes")
    idx = {c: i for i, c in enumerate(codes)}
    a = np.zeros((n, n))
    for (u, v), w in ngraph.edges.items():
        a[idx[u], idx[v]] = a[idx[v], idx[u]] = float(w)
    if _n_components(a) > 1:
        positive = a[a > 0]
        eps = 1e-3 * (positive.mean() if positive.size else 1.0)
        a = a + eps * (1 - np.eye(n))
    lap = np.diag(a.sum(axis=1)) - a
    lap_pinv = np.linalg.pinv(lap)
    pairs = n * (n - 1) / 2

    def rescale(x):
        diff = x[:, None, :] - x[None, :, :]
        d = np.sqrt((diff**2).sum(-1))
        att = (a * d**2).sum() / 2
        rep = d.sum() / 2
        return x * (rep / (2 * att))

    def norm_stress(x):
        return _stress(x, a) / (_mean_distance(x) ** 2)

    rng = np.random.default_rng(seed)
    x = rescale(rng.standard_normal((n, 2)))
    trace = [norm_stress(x)]
    it = 0
    for it in range(1, max_iter + 1):
        diff = x[:, None, :] - x[None, :, :]
        d = np.sqrt((diff**2).sum(-1))
        with np.errstate(divide="ignore"):
            inv = np.where(d > 0, 1.0 / d, 0.0)
        b = -inv
        np.fill_diagonal(b, inv.sum(axis=1))
        x_new = rescale(lap_pinv @ (b @ x))
        s_new = norm_stress(x_new)
        if s_new > trace[-1]:
            # float noise at convergence; keep the previous iterate
            break
        x = x_new
        trace.append(s_new)
        if trace[-2] - s_new < tol * trace[-2]:
            break
    x = canonicalize(codes, x)
    coords = {c: (float(x[i, 0]), float(x[i, 1])) for i, c in enumerate(codes)}
    return MapCoordinates(coords, _stress(x, a), tuple(trace), it)


def _n_components(a: np.ndarray) -> int:
    n = len(a)
    seen = np.zeros(n, dtype=bool)
    count = 0
    for s in range(n):
        if seen[s]:
            continue
        count += 1
        stack = [s]
        seen[s] = True
        while stack:
            v = stack.pop()
            for u in np.nonzero(a[v] > 0)[0]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
    return count


def map_stress(coords: MapCoordinates, ngraph: NormalizedGraph) -> float:
    """Recompute ``sum a_ij * |x_i - x_j|^2`` from the coordinates."""
    total = 0.0
    for (u, v), w in ngraph.edges.items():
        (x1, y1), (x2, y2) = coords.coords[u], coords.coords[v]
        total += float(w) * ((x1 - x2) ** 2 + (y1 - y2) ** 2)
    return total
