"""Synthetic record sets shaped to published aggregate counts, and random generators.

The Egypt series (2000-2012, 2012 a part year) gives per-year
totals, joint counts with the USA and Saudi Arabia, and triple co-authored
papers. ``egypt_records`` builds records with exactly those counts.
"""

from __future__ import annotations

import random
import string
from itertools import combinations

from .collabgraph import CollabGraph
from .ingest import DOC_TYPES, PublicationRecord

# year: (Egypt total, Egypt+USA, triple, Egypt+Saudi); None = blank in the source
EGYPT_SERIES: dict[int, tuple[int, int, int | None, int]] = {
    2000: (2577, 286, 2, 95),
    2001: (2707, 227, 3, 94),
    2002: (2894, 295, None, 115),
    2003: (3238, 312, 7, 181),
    2004: (3212, 318, 4, 169),
    2005: (3338, 326, 3, 164),
    2006: (3847, 358, 6, 190),
    2007: (4280, 424, 8, 199),
    2008: (4710, 439, 15, 261),
    2009: (5725, 597, 20, 416),
    2010: (6281, 708, 33, 614),
    2011: (7416, 823, 55, 1093),
    2012: (4386, 428, 47, 832),
}
USA_PERCENT = (11, 8, 10, 10, 10, 10, 9, 10, 9, 10, 11, 11, 10)
SAUDI_PERCENT = (4, 3, 4, 6, 5, 5, 5, 5, 6, 7, 10, 15, 19)

EGYPT_COUNTRIES = """code,name,region,year,gdp
EG,Egypt,north,,
SA,Saudi Arabia,non-african,,
US,USA,non-african,,
"""

AFRICA_SAMPLE = {
    "DZ": ("Algeria", "north"), "EG": ("Egypt", "north"), "MA": ("Morocco", "north"),
    "TN": ("Tunisia", "north"), "NG": ("Nigeria", "west"), "GH": ("Ghana", "west"),
    "SN": ("Senegal", "west"), "CM": ("Cameroon", "central"), "GA": ("Gabon", "central"),
    "KE": ("Kenya", "east"), "UG": ("Uganda", "east"), "ET": ("Ethiopia", "east"),
    "TZ": ("Tanzania", "east"), "ZA": ("South Africa", "southern"), "MW": ("Malawi", "southern"),
}
OUTSIDE_SAMPLE = {"US": "USA", "FR": "France", "GB": "UK", "SA": "Saudi Arabia", "DE": "Germany"}


def egypt_records() -> list[PublicationRecord]:
    """Records whose Egypt/USA/Saudi counts equal the published series.

    The blank 2002 triple cell is generated as zero triple papers.
    """
    records = []
    for year, (total, with_us, triple, with_sa) in EGYPT_SERIES.items():
        t = triple or 0
        groups = [
            (frozenset({"EG", "US", "SA"}), t),
            (frozenset({"EG", "US"}), with_us - t),
            (frozenset({"EG", "SA"}), with_sa - t),
            (frozenset({"EG"}), total - with_us - with_sa + t),
        ]
        k = 0
        for countries, count in groups:
            for _ in range(count):
                k += 1
                records.append(PublicationRecord(f"EG{year}-{k:05d}", year, "article", countries))
    return records


def egypt_triples() -> dict[int, int | None]:
    return {year: row[2] for year, row in EGYPT_SERIES.items()}


def africa_country_table_text() -> str:
    lines = ["code,name,region,year,gdp"]
    for code, (name, region) in sorted(AFRICA_SAMPLE.items()):
        lines.append(f"{code},{name},{region},,")
    for code, name in sorted(OUTSIDE_SAMPLE.items()):
        lines.append(f"{code},{name},non-african,,")
    return "\n".join(lines) + "\n"


def africa_records(
    year: int = 2000,
    substantive: int = 11678,
    total: int = 13271,
    domestic: int = 6319,
    seed: int = 0,
) -> list[PublicationRecord]:
    """One year of African output: ``substantive`` articles and reviews out of
    ``total`` records, ``domestic`` of the substantive ones wholly African."""
    rng = random.Random(seed)
    africa = sorted(AFRICA_SAMPLE)
    outside = sorted(OUTSIDE_SAMPLE)
    records = []
    for i in range(total):
        if i < substantive:
            doc_type = "article" if i % 5 else "review"
        else:
            doc_type = "proceedings" if i % 2 else "other"
        countries = set(rng.sample(africa, rng.randint(1, 3)))
        if i < substantive and i >= domestic:
            countries |= set(rng.sample(outside, rng.randint(1, 2)))
        records.append(PublicationRecord(f"F{year}-{i:06d}", year, doc_type, frozenset(countries)))
    return records


def country_codes(n: int) -> list[str]:
    """``n`` distinct two-letter codes (AA, AB, ...)."""
    letters = string.ascii_uppercase
    return [letters[i // 26] + letters[i % 26] for i in range(n)]


def random_records(
    rng: random.Random,
    n: int,
    n_countries: int,
    years: tuple[int, int] = (2000, 2012),
    max_countries: int = 5,
    doc_types=DOC_TYPES,
) -> list[PublicationRecord]:
    codes = country_codes(n_countries)
    out = []
    for i in range(n):
        k = rng.randint(1, min(max_countries, n_countries))
        fields = frozenset(rng.sample(["Chemistry", "Physics", "Plant & Animal Science", "Geosciences"], rng.randint(0, 2)))
        out.append(
            PublicationRecord(
                f"R{i:06d}",
                rng.randint(*years),
                rng.choice(list(doc_types)),
                frozenset(rng.sample(codes, k)),
                fields,
            )
        )
    return out


def random_graph(rng: random.Random, n: int, p: float = 0.4, max_weight: int = 20,
                 years: tuple[int, int] | None = None) -> CollabGraph:
    """Random graph with integer weights; yearly series spread over ``years``."""
    codes = country_codes(n)
    edges, yearly = {}, {}
    node_yearly: dict[str, dict[int, int]] = {c: {} for c in codes}
    lo, hi = years or (2000, 2000)
    for a, b in combinations(codes, 2):
        if rng.random() < p:
            series = {}
            for y in range(lo, hi + 1):
                c = rng.randint(0, max_weight)
                if c:
                    series[y] = c
            if not series:
                series[hi] = 1
            edges[(a, b)] = sum(series.values())
            yearly[(a, b)] = series
    strength = dict.fromkeys(codes, 0)
    for (a, b), w in edges.items():
        strength[a] += w
        strength[b] += w
    nodes = {c: strength[c] + rng.randint(1, 10) for c in codes}
    for c in codes:
        node_yearly[c] = {hi: nodes[c]}
    return CollabGraph(nodes, edges, yearly, node_yearly, (lo, hi))


def planted_partition(
    rng: random.Random,
    blocks: int = 4,
    block_size: int = 15,
    p_in: float = 0.5,
    p_out: float = 0.02,
    max_weight: int = 5,
) -> tuple[CollabGraph, dict[str, int]]:
    """Graph with dense blocks and sparse cross-links, plus the planted labels."""
    codes = country_codes(blocks * block_size)
    truth = {c: i // block_size for i, c in enumerate(codes)}
    edges = {}
    for a, b in combinations(codes, 2):
        p = p_in if truth[a] == truth[b] else p_out
        if rng.random() < p:
            edges[(a, b)] = rng.randint(1, max_weight)
    strength = dict.fromkeys(codes, 0)
    for (a, b), w in edges.items():
        strength[a] += w
        strength[b] += w
    return CollabGraph(nodes={c: max(strength[c], 1) for c in codes}, edges=edges), truth
