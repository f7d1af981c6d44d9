"""Parsing, validation and filtering of publication records and the country/GDP table.

Record lines are tab-separated::

    id <TAB> year <TAB> doc_type <TAB> countries <TAB> fields

with ``countries`` and ``fields`` comma-separated (``fields`` may be empty).
The country table is a CSV with header ``code,name,region,year,gdp``; rows
sharing a code merge into one entry.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Iterable, Iterator, TextIO

DOC_TYPES = ("article", "review", "note", "proceedings", "other")
DEFAULT_DOC_TYPES = frozenset({"article", "note", "review"})
SUBSTANTIVE_TYPES = frozenset({"article", "review"})
REGIONS = ("north", "west", "east", "central", "southern", "non-african")
DEFAULT_YEAR_RANGE = (1900, 2100)

_CODE_RE = re.compile(r"^[A-Z]{2}$")


@dataclass(frozen=True)
class PublicationRecord:
    id: str
    year: int
    doc_type: str
    countries: frozenset[str]
    fields: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ValidationReport:
    records_read: int
    records_kept: int
    rejects: tuple[tuple[int, str], ...] = ()

    def to_dict(self) -> dict:
        return {
            "records_read": self.records_read,
            "records_kept": self.records_kept,
            "rejects": [{"line": n, "reason": r} for n, r in self.rejects],
        }


@dataclass(frozen=True)
class CountryEntry:
    name: str
    region: str
    gdp: dict[int, Decimal] = field(default_factory=dict, compare=True)


@dataclass(frozen=True)
class CountryTable:
    entries: dict[str, CountryEntry]

    def __contains__(self, code: str) -> bool:
        return code in self.entries

    def __getitem__(self, code: str) -> CountryEntry:
        return self.entries[code]

    def name(self, code: str) -> str:
        entry = self.entries.get(code)
        return entry.name if entry else code

    def region_codes(self, regions: Iterable[str] | None = None) -> frozenset[str]:
        """Codes whose region is in ``regions`` (default: every African region)."""
        wanted = set(regions) if regions is not None else set(REGIONS) - {"non-african"}
        return frozenset(c for c, e in self.entries.items() if e.region in wanted)

    def with_synthetic(self, codes: Iterable[str]) -> CountryTable:
        """Copy of the table with placeholder entries for unknown ``codes``."""
        entries = dict(self.entries)
        for code in sorted(set(codes) - set(entries)):
            entries[code] = CountryEntry(name=code, region="non-african", gdp={})
        return CountryTable(entries)


class CountryTableError(ValueError):
    """Fatal problem in a country table."""


def _lines(stream: TextIO | Iterable[str]) -> Iterator[str]:
    if isinstance(stream, str):
        raise TypeError("pass a stream or an iterable of lines, not a str")
    yield from stream


def _parse_line(line: str, year_range: tuple[int, int]) -> PublicationRecord | str:
    parts = line.split("\t")
    if len(parts) == 4:
        parts.append("")
    if len(parts) != 5:
        return "bad-field-count"
    rid, year_s, doc_type, countries_s, fields_s = (p.strip() for p in parts)
    if not rid:
        return "no-id"
    try:
        year = int(year_s)
    except ValueError:
        return "bad-year"
    if not year_range[0] <= year <= year_range[1]:
        return "year-out-of-range"
    if doc_type not in DOC_TYPES:
        return "bad-doc-type"
    countries = frozenset(c.strip() for c in countries_s.split(",") if c.strip())
    if not countries:
        return "no-countries"
    if any(not _CODE_RE.match(c) for c in countries):
        return "bad-country-code"
    fields_ = frozenset(f.strip() for f in fields_s.split(",") if f.strip())
    return PublicationRecord(rid, year, doc_type, countries, fields_)


def parse_records(
    stream: TextIO | Iterable[str],
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> tuple[list[PublicationRecord], ValidationReport]:
    """Parse record lines, rejecting malformed ones with a reason token.

    Blank lines are skipped and not counted. Each non-blank line is either
    kept or listed in the report's rejects, so kept + rejected == read.
    """
    records: list[PublicationRecord] = []
    rejects: list[tuple[int, str]] = []
    seen: set[str] = set()
    read = 0
    for lineno, raw in enumerate(_lines(stream), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        read += 1
        parsed = _parse_line(line, year_range)
        if isinstance(parsed, str):
            rejects.append((lineno, parsed))
        elif parsed.id in seen:
            rejects.append((lineno, "duplicate-id"))
        else:
            seen.add(parsed.id)
            records.append(parsed)
    return records, ValidationReport(read, len(records), tuple(rejects))


def format_record(record: PublicationRecord) -> str:
    return "\t".join(
        [
            record.id,
            str(record.year),
            record.doc_type,
            ",".join(sorted(record.countries)),
            ",".join(sorted(record.fields)),
        ]
    )


def serialize_records(records: Iterable[PublicationRecord]) -> str:
    return "".join(format_record(r) + "\n" for r in records)


def read_records(path, year_range: tuple[int, int] = DEFAULT_YEAR_RANGE):
    with open(path, encoding="utf-8") as fh:
        return parse_records(fh, year_range)


def parse_country_table(stream: TextIO | Iterable[str]) -> CountryTable:
    """Parse the ``code,name,region,year,gdp`` table.

    Rows with an empty year and gdp declare a country without GDP data.
    Raises CountryTableError on duplicate codes (conflicting names or a
    repeated (code, year) row), unknown regions and negative GDP.
    """
    reader = csv.DictReader(_lines(stream))
    expected = ["code", "name", "region", "year", "gdp"]
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != expected:
        raise CountryTableError(f"header must be {','.join(expected)}")
    names: dict[str, str] = {}
    regions: dict[str, str] = {}
    gdp: dict[str, dict[int, Decimal]] = {}
    for lineno, row in enumerate(reader, start=2):
        row = {k.strip(): (v or "").strip() for k, v in row.items() if k is not None}
        code, name, region = row["code"], row["name"], row["region"]
        if not _CODE_RE.match(code):
            raise CountryTableError(f"line {lineno}: bad country code {code!r}")
        if region not in REGIONS:
            raise CountryTableError(f"line {lineno}: unknown region {region!r} for {code}")
        if code in names and (names[code] != name or regions[code] != region):
            raise CountryTableError(f"line {lineno}: duplicate country code {code}")
        names[code] = name
        regions[code] = region
        series = gdp.setdefault(code, {})
        if not row["year"] and not row["gdp"]:
            continue
        try:
            year = int(row["year"])
            value = Decimal(row["gdp"])
        except (ValueError, InvalidOperation) as exc:
            raise CountryTableError(f"line {lineno}: bad year/gdp for {code}") from exc
        if not value.is_finite():
            raise CountryTableError(f"line {lineno}: bad gdp for {code}")
        if value < 0:
            raise CountryTableError(f"line {lineno}: negative GDP for {code} in {year}")
        if year in series:
            raise CountryTableError(f"line {lineno}: duplicate country code {code} for year {year}")
        series[year] = value
    return CountryTable(
        {c: CountryEntry(names[c], regions[c], gdp[c]) for c in names}
    )


def read_country_table(path) -> CountryTable:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_country_table(fh)


def format_country_table(table: CountryTable) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["code", "name", "region", "year", "gdp"])
    for code in sorted(table.entries):
        entry = table.entries[code]
        if not entry.gdp:
            writer.writerow([code, entry.name, entry.region, "", ""])
        for year in sorted(entry.gdp):
            writer.writerow([code, entry.name, entry.region, year, str(entry.gdp[year])])
    return out.getvalue()


def filter_records(
    records: Iterable[PublicationRecord],
    doc_types: Iterable[str] = DEFAULT_DOC_TYPES,
    years: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> list[PublicationRecord]:
    doc_types = frozenset(doc_types)
    if not doc_types:
        raise ValueError("doc_types must be non-empty")
    lo, hi = years
    if lo > hi:
        raise ValueError(f"empty year range {lo}:{hi}")
    return [r for r in records if r.doc_type in doc_types and lo <= r.year <= hi]
