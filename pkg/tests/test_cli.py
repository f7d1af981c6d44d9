import json
import os
from pathlib import Path

import pytest

from collabnet.cli import ALL_EMITS, run, write_fixture

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def egypt(tmp_path_factory):
    path = tmp_path_factory.mktemp("egypt")
    write_fixture("egypt", str(path))
    return path


def base_args(fx, out):
    return ["--records", str(fx / "records.tsv"), "--countries", str(fx / "countries.csv"), "--out", str(out)]


def test_help(capsys):
    assert run(["--help"]) == 0
    assert "usage: collabnet" in capsys.readouterr().out
    assert run(["all", "--help"]) == 0


def test_missing_records_file(tmp_path, capsys):
    missing = tmp_path / "nope.tsv"
    assert run(["ingest", "--records", str(missing), "--out", str(tmp_path / "o")]) == 2
    assert str(missing) in capsys.readouterr().err


def test_no_records_flag(capsys):
    assert run(["ingest"]) == 2
    assert "--records" in capsys.readouterr().err


def test_bad_flag_value(egypt, tmp_path):
    assert run(["graph", *base_args(egypt, tmp_path), "--years", "2010"]) == 2
    assert run(["graph", *base_args(egypt, tmp_path), "--doc-types", "letters"]) == 2
    assert run(["bogus"]) == 2


def test_all_report_matches_golden(egypt, tmp_path):
    out = tmp_path / "out"
    assert run(["all", *base_args(egypt, out), "--seed", "0"]) == 0
    if os.environ.get("COLLABNET_REGEN_GOLDEN") == "1":
        (GOLDEN / "report.txt").write_text((out / "report.txt").read_text(encoding="utf-8"), encoding="utf-8")
    expected = (GOLDEN / "report.txt").read_text(encoding="utf-8")
    assert (out / "report.txt").read_text(encoding="utf-8") == expected


@pytest.mark.parametrize(
    "command, files",
    [
        ("ingest", {"records.tsv", "ingest_report.json"}),
        ("graph", {"window.graphml", "persistent.graphml", "window.paj", "persistent.paj"}),
        ("indicators", {"indicators.csv", "indicators.json", "betweenness.csv", "gdp_index.csv"}),
        ("cluster", {"clusters.csv"}),
        ("layout", {"layout.json"}),
        ("render", {"wheel.svg", "map.svg"}),
        ("report", {"table_partners.csv", "table_partners.json", "table_yearly.csv",
                    "table_yearly.json", "report.txt"}),
    ],
)
def test_each_stage_writes_its_files(egypt, tmp_path, command, files):
    out = tmp_path / command
    assert run([command, *base_args(egypt, out)]) == 0
    assert {p.name for p in out.iterdir()} == files


def test_emit_selects_outputs(egypt, tmp_path):
    out = tmp_path / "sel"
    assert run(["all", *base_args(egypt, out), "--emit", "wheel,clusters"]) == 0
    assert {p.name for p in out.iterdir()} == {"wheel.svg", "clusters.csv"}


def test_ingest_report(egypt, tmp_path):
    out = tmp_path / "ing"
    assert run(["ingest", *base_args(egypt, out), "--years", "2010:2011"]) == 0
    report = json.loads((out / "ingest_report.json").read_text())
    assert report["records_read"] == report["records_kept"] + len(report["rejects"])
    assert report["records_after_filter"] == 6281 + 7416


def test_config_file_and_flag_override(egypt, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# pipeline settings\n"
        f"records = {egypt / 'records.tsv'}\n"
        f"out = {tmp_path / 'from-config'}\n"
        "min-total = 10000\n"
        "emit = report\n"
    )
    assert run(["report", "--config", str(cfg)]) == 0
    text = (tmp_path / "from-config" / "report.txt").read_text()
    assert "persistent links: 0" in text
    assert run(["report", "--config", str(cfg), "--min-total", "25", "--out", str(tmp_path / "flags")]) == 0
    assert "persistent links: 3" in (tmp_path / "flags" / "report.txt").read_text()


def test_every_flag_has_a_config_key():
    from collabnet.cli import CONVERTERS, build_parser

    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices["all"]
    dests = {a.dest for a in sub._actions} - {"help", "config", "verbose"}
    assert dests <= set(CONVERTERS)


def test_bad_config(tmp_path, egypt):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert run(["all", "--config", str(cfg), "--records", str(egypt / "records.tsv")]) == 2
    assert run(["all", "--config", str(tmp_path / "absent.cfg")]) == 2


def test_strict_undefined_indicator_fails(egypt, tmp_path, capsys):
    # the fixture country table has no GDP values
    assert run(["indicators", *base_args(egypt, tmp_path / "s"), "--strict", "true"]) == 1
    assert "GDP" in capsys.readouterr().err


def test_region_scope_needs_table(egypt, tmp_path):
    args = ["graph", "--records", str(egypt / "records.tsv"), "--out", str(tmp_path), "--scope", "region"]
    assert run(args) == 2


def test_africa_fixture_indicators(tmp_path):
    fx = tmp_path / "africa"
    assert run(["fixture", "africa", "--out", str(fx)]) == 0
    out = tmp_path / "o"
    assert run(["indicators", *base_args(fx, out), "--emit", "indicators"]) == 0
    lines = (out / "indicators.csv").read_text().splitlines()
    assert lines == ["Year,Records,Substantive %,Domestic %", "2000,13271,88.0,54"]


def test_deterministic_output_directory(egypt, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["all", *base_args(egypt, a), "--seed", "3"]) == 0
    assert run(["all", *base_args(egypt, b), "--seed", "3"]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    assert all((a / n).read_bytes() == (b / n).read_bytes() for n in names)
