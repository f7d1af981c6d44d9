"""Scalar bibliometric indicators, kept as exact rationals until display."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable

from .collabgraph import CollabGraph, DomesticSplit
from .ingest import SUBSTANTIVE_TYPES, CountryTable, PublicationRecord


class UndefinedIndicatorError(ArithmeticError):
    """An indicator whose denominator is zero or missing."""

    def __init__(self, message: str, note: str | None = None):
        super().__init__(message if note is None else f"{message} ({note})")
        self.note = note


def round_half_away(value: Fraction, places: int = 0) -> Decimal:
    """Round to ``places`` decimals, halves away from zero, without floats."""
    scaled = abs(value) * 10**places
    q = int(scaled + Fraction(1, 2))  # floor for non-negative values
    result = Decimal(q).scaleb(-places)
    return -result if value < 0 else result


@dataclass(frozen=True)
class IndicatorValue:
    """``numerator / denominator``, displayed as a percent or a plain ratio."""

    numerator: int
    denominator: int | Fraction
    places: int = 0
    percent: bool = True

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator) / Fraction(self.denominator)

    @property
    def display(self) -> Decimal:
        v = self.value * 100 if self.percent else self.value
        return round_half_away(v, self.places)

    def __str__(self) -> str:
        return f"{self.display}%" if self.percent else str(self.display)


def _ratio(num: int, den, places: int, percent: bool = True, what: str = "") -> IndicatorValue:
    if den == 0:
        raise UndefinedIndicatorError(f"{what}: zero denominator")
    return IndicatorValue(num, den, places, percent)


def partner_percent(graph: CollabGraph, country: str, partner: str, year: int) -> IndicatorValue:
    """Joint papers with ``partner`` as a share of ``country``'s output in ``year``."""
    total = graph.output_in(country, year)
    joint = graph.joint_in(country, partner, year)
    return _ratio(joint, total, 0, what=f"{partner} as % {country} in {year}")


def substantive_share(records: Iterable[PublicationRecord], year: int) -> IndicatorValue:
    in_year = [r for r in records if r.year == year]
    substantive = sum(1 for r in in_year if r.doc_type in SUBSTANTIVE_TYPES)
    return _ratio(substantive, len(in_year), 1, what=f"substantive share {year}")


def domestic_share(split: DomesticSplit) -> IndicatorValue:
    return _ratio(split.domestic, split.total, 0, what="domestic share")


def gdp_index(graph: CollabGraph, table: CountryTable, country: str, year: int) -> IndicatorValue:
    """Papers per billion USD of GDP for ``country`` in ``year``."""
    entry = table.entries.get(country)
    if entry is None or year not in entry.gdp:
        raise UndefinedIndicatorError(f"no GDP for {country} in {year}")
    gdp = Fraction(entry.gdp[year])
    if gdp == 0:
        raise UndefinedIndicatorError(
            f"zero GDP for {country} in {year}", note="anomalous: output indexed against zero GDP"
        )
    return IndicatorValue(graph.output_in(country, year), gdp, places=1, percent=False)


def rank_by_gdp_index(
    graph: CollabGraph, table: CountryTable, year: int, countries: Iterable[str] | None = None
) -> list[tuple[str, IndicatorValue]]:
    """Countries with a defined index, highest first (ties by code)."""
    ranked = []
    for code in sorted(graph.nodes if countries is None else countries):
        try:
            ranked.append((code, gdp_index(graph, table, code, year)))
        except UndefinedIndicatorError:
            continue
    ranked.sort(key=lambda item: (-item[1].value, item[0]))
    return ranked


def field_world_share(country_count: int, world_count: int) -> IndicatorValue:
    return _ratio(country_count, world_count, 2, what="field world share")


def field_counts(records: Iterable[PublicationRecord], country: str | None = None) -> dict[str, int]:
    """Papers per subject field, optionally restricted to one country."""
    counts: dict[str, int] = {}
    for r in records:
        if country is None or country in r.countries:
            for f in r.fields:
                counts[f] = counts.get(f, 0) + 1
    return dict(sorted(counts.items()))


def betweenness(graph: CollabGraph) -> dict[str, Fraction]:
    """Unnormalized shortest-path betweenness over the unweighted skeleton.

    Each unordered pair of nodes spreads one unit over its shortest paths;
    interior nodes collect their share. Uses Brandes' accumulation with
    exact fractions.
    """
    if not graph.nodes:
        raise ValueError("betweenness of an empty graph")
    adj = {n: sorted(nb) for n, nb in graph.neighbors().items()}
    score = dict.fromkeys(sorted(graph.nodes), Fraction(0))
    for s in score:
        order = []
        preds: dict[str, list[str]] = {v: [] for v in adj}
        sigma = dict.fromkeys(adj, 0)
        dist = dict.fromkeys(adj, -1)
        sigma[s], dist[s] = 1, 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = dict.fromkeys(adj, Fraction(0))
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += Fraction(sigma[v], sigma[w]) * (1 + delta[w])
            if w != s:
                score[w] += delta[w]
    # every unordered pair was counted from both ends
    return {n: v / 2 for n, v in score.items()}
