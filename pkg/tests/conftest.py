import io

import pytest

from collabnet.ingest import PublicationRecord


def rec(rid, year, countries, doc_type="article", fields=()):
    return PublicationRecord(rid, year, doc_type, frozenset(countries), frozenset(fields))


@pytest.fixture
def lines():
    def make(*rows):
        return io.StringIO("".join(r + "\n" for r in rows))

    return make


ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_runtest_makereport(item, call):
    label = item.get_closest_marker("criterion")
    if label is not None and call.when == "call":
        ok = call.excinfo is None
        detail = "" if ok else str(call.excinfo.value).splitlines()[0][:100]
        ACCEPTANCE[label.args[0]] = (ok, detail)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda n: int(n.split(".")[0])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
