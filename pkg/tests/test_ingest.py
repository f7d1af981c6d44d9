import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collabnet.fixtures import random_records
from collabnet.ingest import (
    DOC_TYPES,
    CountryTableError,
    PublicationRecord,
    filter_records,
    format_country_table,
    parse_country_table,
    parse_records,
    serialize_records,
)


def test_countries_are_deduplicated(lines):
    records, report = parse_records(lines("W1\t2011\tarticle\tGH,GH,NG\t"))
    assert records[0].countries == {"GH", "NG"}
    assert report.rejects == ()


def test_example_line_from_format(lines):
    (r,), _ = parse_records(lines("W123\t2011\tarticle\tEG,SA,US\tChemistry"))
    assert r == PublicationRecord("W123", 2011, "article", frozenset({"EG", "SA", "US"}), frozenset({"Chemistry"}))


@pytest.mark.parametrize(
    "line, reason",
    [
        ("W1\t2011\tarticle\t\t", "no-countries"),
        ("W1\t2011\tarticle", "bad-field-count"),
        ("W1\t20x1\tarticle\tEG\t", "bad-year"),
        ("W1\t1850\tarticle\tEG\t", "year-out-of-range"),
        ("W1\t2011\tletter\tEG\t", "bad-doc-type"),
        ("W1\t2011\tarticle\tEgypt\t", "bad-country-code"),
        ("\t2011\tarticle\tEG\t", "no-id"),
    ],
)
def test_malformed_lines_are_rejected_with_reason(lines, line, reason):
    records, report = parse_records(lines("OK\t2000\tnote\tKE\t", line))
    assert [r.id for r in records] == ["OK"]
    assert report.rejects == ((2, reason),)
    assert report.records_read == 2 and report.records_kept == 1


def test_duplicate_ids_rejected(lines):
    _, report = parse_records(lines("A\t2000\tnote\tKE\t", "A\t2001\tnote\tKE\t"))
    assert report.rejects == ((2, "duplicate-id"),)


def test_blank_lines_are_not_records(lines):
    records, report = parse_records(lines("", "A\t2000\tnote\tKE\t", "   "))
    assert len(records) == 1 and report.records_read == 1


def test_thousand_generated_lines():
    rng = random.Random(7)
    text = serialize_records(random_records(rng, 1000, 15))
    assert text.count("\n") == 1000  # linear count oracle
    records, report = parse_records(io.StringIO(text))
    assert len(records) == 1000
    assert report.records_read == 1000 and report.records_kept == 1000 and report.rejects == ()


def test_unreadable_stream_is_fatal():
    class Broken(io.StringIO):
        def __iter__(self):
            raise OSError("device gone")

    with pytest.raises(OSError):
        parse_records(Broken())


def test_round_trip_identity():
    records = random_records(random.Random(3), 300, 12)
    again, _ = parse_records(io.StringIO(serialize_records(records)))
    assert again == records
    third, _ = parse_records(io.StringIO(serialize_records(again)))
    assert third == again


line_token = st.text(alphabet="abcXYZ019 ,\t-", max_size=40)


@settings(max_examples=200, deadline=None)
@given(st.lists(line_token, max_size=30))
def test_report_counts_reconcile(rows):
    _, report = parse_records(io.StringIO("\n".join(rows)))
    assert report.records_kept + len(report.rejects) == report.records_read


# country table

TABLE = """code,name,region,year,gdp
ZA,South Africa,southern,2008,287.1
ZA,South Africa,southern,2009,297.2
EG,Egypt,north,2008,162.8
ZW,Zimbabwe,southern,,
"""


def test_country_table_fields():
    t = parse_country_table(io.StringIO(TABLE))
    assert str(t["ZA"].gdp[2008]) == "287.1"
    assert t["ZA"].name == "South Africa" and t["ZA"].region == "southern"
    assert sorted(t["ZA"].gdp) == [2008, 2009]
    assert t["ZW"].gdp == {}
    assert 2010 not in t["EG"].gdp  # missing is not zero


def test_country_table_round_trip():
    t = parse_country_table(io.StringIO(TABLE))
    assert parse_country_table(io.StringIO(format_country_table(t))) == t


@pytest.mark.parametrize(
    "rows, match",
    [
        (["EG,Egypt,north,2000,1", "EG,Misr,north,2001,2"], "duplicate country code EG"),
        (["EG,Egypt,north,2000,1", "EG,Egypt,north,2000,2"], "duplicate country code EG"),
        (["EG,Egypt,north,2000,-5"], "negative GDP"),
        (["EG,Egypt,maghreb,2000,5"], "unknown region"),
    ],
)
def test_country_table_fatal_errors(rows, match):
    text = "code,name,region,year,gdp\n" + "\n".join(rows) + "\n"
    with pytest.raises(CountryTableError, match=match):
        parse_country_table(io.StringIO(text))


def test_country_table_requires_header():
    with pytest.raises(CountryTableError, match="header"):
        parse_country_table(io.StringIO("EG,Egypt,north,2000,1\n"))


# filtering


def test_filter_keeps_paper_document_types(lines):
    recs, _ = parse_records(lines("A\t2005\tarticle\tEG\t", "B\t2005\tproceedings\tEG\t"))
    assert [r.id for r in filter_records(recs, {"article", "note", "review"}, (2000, 2012))] == ["A"]


def test_filter_identity_over_everything():
    recs = random_records(random.Random(1), 200, 8)
    assert filter_records(recs, DOC_TYPES, (1900, 2100)) == recs


def test_filter_matches_linear_scan():
    rng = random.Random(11)
    recs = random_records(rng, 500, 10)
    types = set(rng.sample(DOC_TYPES, 3))
    lo = rng.randint(2000, 2006)
    hi = rng.randint(lo, 2012)
    expected = []
    for r in recs:
        keep = False
        for t in types:
            if r.doc_type == t:
                keep = True
        if keep and r.year >= lo and r.year <= hi:
            expected.append(r)
    assert filter_records(recs, types, (lo, hi)) == expected


def test_filter_is_idempotent():
    recs = random_records(random.Random(2), 300, 8)
    once = filter_records(recs, {"article", "review"}, (2003, 2009))
    assert filter_records(once, {"article", "review"}, (2003, 2009)) == once


def test_filter_preconditions():
    with pytest.raises(ValueError):
        filter_records([], set(), (2000, 2001))
    with pytest.raises(ValueError):
        filter_records([], {"article"}, (2005, 2001))
