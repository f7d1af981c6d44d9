"""Country co-authorship graphs under whole counting.

A paper counts once in each of its countries' totals and adds one link
between every pair of its countries, however many authors each country has.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Literal

from .ingest import CountryTable, PublicationRecord

log = logging.getLogger(__name__)

Pair = tuple[str, str]


def pair(a: str, b: str) -> Pair:
    if a == b:
        raise ValueError(f"self-pair {a}")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class CollabGraph:
    """Undirected weighted country graph.

    ``nodes`` maps code to output count, ``edges`` maps a sorted code pair to
    the joint-paper count. ``yearly`` and ``node_yearly`` hold the same counts
    split by year. Treat instances as read-only.
    """

    nodes: dict[str, int]
    edges: dict[Pair, int]
    yearly: dict[Pair, dict[int, int]] = field(default_factory=dict)
    node_yearly: dict[str, dict[int, int]] = field(default_factory=dict)
    year_range: tuple[int, int] | None = None

    def strength(self) -> dict[str, int]:
        s = dict.fromkeys(self.nodes, 0)
        for (a, b), w in self.edges.items():
            s[a] += w
            s[b] += w
        return s

    def neighbors(self) -> dict[str, dict[str, int]]:
        adj: dict[str, dict[str, int]] = {n: {} for n in self.nodes}
        for (a, b), w in self.edges.items():
            if w > 0:
                adj[a][b] = w
                adj[b][a] = w
        return adj

    def weight(self, a: str, b: str) -> int:
        return self.edges.get(pair(a, b), 0)

    def output_in(self, code: str, year: int) -> int:
        return self.node_yearly.get(code, {}).get(year, 0)

    def joint_in(self, a: str, b: str, year: int) -> int:
        return self.yearly.get(pair(a, b), {}).get(year, 0)

    def subgraph(self, keep: Iterable[str]) -> CollabGraph:
        keep = set(keep)
        return CollabGraph(
            nodes={n: c for n, c in self.nodes.items() if n in keep},
            edges={p: w for p, w in self.edges.items() if p[0] in keep and p[1] in keep},
            yearly={p: dict(s) for p, s in self.yearly.items() if p[0] in keep and p[1] in keep},
            node_yearly={n: dict(s) for n, s in self.node_yearly.items() if n in keep},
            year_range=self.year_range,
        )


@dataclass(frozen=True)
class ThresholdPolicy:
    mode: Literal["total-over-window", "per-year-minimum"] = "total-over-window"
    window_years: int = 5
    min_total: int = 25
    min_per_year: int = 5

    def __post_init__(self):
        if self.mode not in ("total-over-window", "per-year-minimum"):
            raise ValueError(f"unknown threshold mode {self.mode!r}")
        if self.window_years < 1:
            raise ValueError("window_years must be >= 1")
        if self.min_total < 0 or self.min_per_year < 0:
            raise ValueError("thresholds must be non-negative")


@dataclass(frozen=True)
class DomesticSplit:
    total: int
    domestic: int
    international: int


def resolve_unknown(
    records: Iterable[PublicationRecord],
    table: CountryTable,
    policy: Literal["reject", "keep"] = "reject",
) -> tuple[list[PublicationRecord], list[tuple[str, tuple[str, ...]]], CountryTable]:
    """Check record countries against ``table``.

    Returns (records kept, [(record id, unknown codes)], table). Under
    ``reject`` the offending records are dropped; under ``keep`` they stay
    and the returned table gains synthetic entries for the unknown codes.
    """
    if policy not in ("reject", "keep"):
        raise ValueError(f"unknown-country policy must be reject or keep, got {policy!r}")
    kept, flagged, unknown = [], [], set()
    for rec in records:
        missing = tuple(sorted(c for c in rec.countries if c not in table))
        if missing:
            flagged.append((rec.id, missing))
            unknown.update(missing)
            if policy == "reject":
                continue
        kept.append(rec)
    if policy == "keep" and unknown:
        table = table.with_synthetic(unknown)
    return kept, flagged, table


def build_graph(
    records: Iterable[PublicationRecord],
    scope: Iterable[str] | Literal["all"] = "all",
    *,
    table: CountryTable | None = None,
    unknown_policy: Literal["reject", "keep"] = "reject",
    year_range: tuple[int, int] | None = None,
) -> CollabGraph:
    """Count nodes, pairs and their yearly series from ``records``.

    ``scope`` limits which nodes and pairs are kept; each record still
    defines its pairs over its full country set. ``year_range`` defaults to
    the span of record years.
    """
    records = list(records)
    if table is not None:
        records, flagged, _ = resolve_unknown(records, table, unknown_policy)
        for rid, codes in flagged:
            log.warning("record %s has unknown countries %s (%s)", rid, ",".join(codes), unknown_policy)
    in_scope = None if scope == "all" else frozenset(scope)

    node_yearly: dict[str, Counter] = defaultdict(Counter)
    yearly: dict[Pair, Counter] = defaultdict(Counter)
    for rec in records:
        cs = sorted(rec.countries)
        if in_scope is not None:
            cs = [c for c in cs if c in in_scope]
        for c in cs:
            node_yearly[c][rec.year] += 1
        for a, b in combinations(cs, 2):
            yearly[(a, b)][rec.year] += 1

    if year_range is None and records:
        years = [r.year for r in records]
        year_range = (min(years), max(years))
    return _freeze(node_yearly, yearly, year_range)


def _freeze(node_yearly, yearly, year_range) -> CollabGraph:
    ny = {n: dict(sorted(s.items())) for n, s in sorted(node_yearly.items())}
    ey = {p: dict(sorted(s.items())) for p, s in sorted(yearly.items())}
    return CollabGraph(
        nodes={n: sum(s.values()) for n, s in ny.items()},
        edges={p: sum(s.values()) for p, s in ey.items()},
        yearly=ey,
        node_yearly=ny,
        year_range=year_range,
    )


def merge_graphs(*graphs: CollabGraph) -> CollabGraph:
    """Sum partial graphs built over disjoint record partitions."""
    node_yearly: dict[str, Counter] = defaultdict(Counter)
    yearly: dict[Pair, Counter] = defaultdict(Counter)
    spans = []
    for g in graphs:
        for n, s in g.node_yearly.items():
            node_yearly[n].update(s)
        for p, s in g.yearly.items():
            yearly[p].update(s)
        if g.year_range is not None:
            spans.append(g.year_range)
    year_range = (min(s[0] for s in spans), max(s[1] for s in spans)) if spans else None
    return _freeze(node_yearly, yearly, year_range)


def joint_count(
    records: Iterable[PublicationRecord],
    countries: Iterable[str],
    year: int | Literal["all"] = "all",
) -> int:
    """Number of records whose country set contains all of ``countries``."""
    wanted = frozenset(countries)
    if len(wanted) < 2:
        raise ValueError("joint_count needs at least two countries")
    return sum(
        1 for r in records if wanted <= r.countries and (year == "all" or r.year == year)
    )


def domestic_split(records: Iterable[PublicationRecord], region: Iterable[str]) -> DomesticSplit:
    region = frozenset(region)
    if not region:
        raise ValueError("region must be non-empty")
    total = domestic = 0
    for r in records:
        if r.countries & region:
            total += 1
            if r.countries <= region:
                domestic += 1
    return DomesticSplit(total, domestic, total - domestic)


def _passes(series: dict[int, int], window: range, policy: ThresholdPolicy) -> bool:
    counts = [series.get(y, 0) for y in window]
    if sum(counts) == 0:
        return False
    if policy.mode == "total-over-window":
        return sum(counts) >= policy.min_total
    return min(counts) >= policy.min_per_year


def apply_threshold(graph: CollabGraph, policy: ThresholdPolicy, end_year: int) -> CollabGraph:
    """Keep edges that pass ``policy`` over the window ending at ``end_year``.

    Edges with no papers in the window never pass. Surviving edges and
    nodes keep their full counts; nodes left without edges are dropped.
    """
    start = end_year - policy.window_years + 1
    if graph.year_range is None or start < graph.year_range[0] or end_year > graph.year_range[1]:
        raise ValueError(
            f"window {start}:{end_year} is outside the graph's years {graph.year_range}"
        )
    window = range(start, end_year + 1)
    kept = {p for p, s in graph.yearly.items() if _passes(s, window, policy)}
    kept_nodes = {n for p in kept for n in p}
    return CollabGraph(
        nodes={n: c for n, c in graph.nodes.items() if n in kept_nodes},
        edges={p: w for p, w in graph.edges.items() if p in kept},
        yearly={p: dict(s) for p, s in graph.yearly.items() if p in kept},
        node_yearly={n: dict(s) for n, s in graph.node_yearly.items() if n in kept_nodes},
        year_range=graph.year_range,
    )
