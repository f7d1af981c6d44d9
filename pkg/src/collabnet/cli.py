"""Command-line pipeline: ingest, graph, indicators, cluster, layout, render, report, all.

Every flag has a config-file key of the same name with dashes replaced by
underscores (``min-total`` -> ``min_total``); flags override the file.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from functools import cached_property
from pathlib import Path

from . import __version__
from .clustering import Clustering, cluster, normalize
from .collabgraph import (
    CollabGraph,
    ThresholdPolicy,
    apply_threshold,
    build_graph,
    domestic_split,
    joint_count,
)
from .indicators import (
    UndefinedIndicatorError,
    betweenness,
    domestic_share,
    gdp_index,
    substantive_share,
)
from .ingest import (
    DEFAULT_DOC_TYPES,
    DOC_TYPES,
    SUBSTANTIVE_TYPES,
    CountryTable,
    CountryTableError,
    filter_records,
    read_country_table,
    read_records,
    serialize_records,
)
from .layout import CircularOrder, MapCoordinates, circular_order, map_layout
from .render import RenderSpec, Table, emit_map, emit_wheel, export_graph, partner_matrix, yearly_series

log = logging.getLogger("collabnet")

STAGES = ("ingest", "graph", "indicators", "cluster", "layout", "render", "report")
EMITS = {
    "ingest": ("records", "ingest-report"),
    "graph": ("graphml", "pajek"),
    "indicators": ("indicators", "betweenness", "gdp-index"),
    "cluster": ("clusters",),
    "layout": ("layout",),
    "render": ("wheel", "map"),
    "report": ("tables", "report"),
}
ALL_EMITS = tuple(e for stage in STAGES for e in EMITS[stage])


class UsageError(Exception):
    """Bad configuration or unreadable input (exit code 2)."""


class PipelineError(Exception):
    """A stage could not produce its result (exit code 1)."""


@dataclass(frozen=True)
class PipelineConfig:
    records: str = ""
    countries: str = ""
    years: tuple[int, int] = (1900, 2100)
    doc_types: frozenset[str] = DEFAULT_DOC_TYPES
    threshold_mode: str = "total-over-window"
    min_total: int = 25
    min_per_year: int = 5
    window: int = 5
    resolution: Fraction = Fraction(1)
    seed: int = 0
    out: str = "out"
    emit: tuple[str, ...] = ALL_EMITS
    scope: str = "all"
    focus: str = ""
    partners: tuple[str, ...] = ()
    unknown_policy: str = "reject"
    n_lines: int = 1000
    strict: bool = False

    def policy(self) -> ThresholdPolicy:
        return ThresholdPolicy(self.threshold_mode, self.window, self.min_total, self.min_per_year)


def _years(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"years must look like A:B, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty year range {text}")
    return lo, hi


def _tokens(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _doc_types(text: str) -> frozenset[str]:
    types = frozenset(_tokens(text))
    bad = types - set(DOC_TYPES)
    if bad or not types:
        raise argparse.ArgumentTypeError(f"doc types must be drawn from {','.join(DOC_TYPES)}")
    return types


def _emit(text: str) -> tuple[str, ...]:
    items = _tokens(text)
    bad = set(items) - set(ALL_EMITS)
    if bad:
        raise argparse.ArgumentTypeError(f"unknown emission(s) {','.join(sorted(bad))}")
    return items


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _resolution(text: str) -> Fraction:
    value = Fraction(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("resolution must be positive")
    return value


def _bool(text: str) -> bool:
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


CONVERTERS = {
    "records": str,
    "countries": str,
    "years": _years,
    "doc_types": _doc_types,
    "threshold_mode": str,
    "min_total": _nonneg,
    "min_per_year": _nonneg,
    "window": _positive,
    "resolution": _resolution,
    "seed": int,
    "out": str,
    "emit": _emit,
    "scope": str,
    "focus": str,
    "partners": _tokens,
    "unknown_policy": str,
    "n_lines": _nonneg,
    "strict": _bool,
}


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONVERTERS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = CONVERTERS[key](value)
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--records", help="record lines (id, year, doc_type, countries, fields)")
    common.add_argument("--countries", help="country table CSV (code,name,region,year,gdp)")
    common.add_argument("--years", type=_years, help="inclusive year range A:B")
    common.add_argument("--doc-types", type=_doc_types, help="comma list (default article,note,review)")
    common.add_argument("--threshold-mode", choices=("total-over-window", "per-year-minimum"))
    common.add_argument("--min-total", type=_nonneg)
    common.add_argument("--min-per-year", type=_nonneg)
    common.add_argument("--window", type=_positive, help="years in the recent window (default 5)")
    common.add_argument("--resolution", type=_resolution)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory (default ./out)")
    common.add_argument("--emit", type=_emit, help=f"comma list from {','.join(ALL_EMITS)}")
    common.add_argument("--scope", choices=("all", "region"),
                        help="'region' keeps only African countries of the country table")
    common.add_argument("--focus", help="country for the yearly series (default: largest output)")
    common.add_argument("--partners", type=_tokens, help="partner codes for the report tables")
    common.add_argument("--unknown-policy", choices=("reject", "keep"))
    common.add_argument("--n-lines", type=_nonneg, help="edges drawn on the map (default 1000)")
    common.add_argument("--strict", type=_bool, help="treat undefined indicators as errors")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="collabnet",
        description="Country co-authorship networks, indicators, clusters and layouts.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "ingest": "parse and filter records; write the cleaned records and a validation report",
        "graph": "build the recent-window graph and its thresholded network (GraphML, Pajek)",
        "indicators": "yearly shares, betweenness and GDP index",
        "cluster": "modularity clustering of the recent-window graph",
        "layout": "wheel ordering and 2-D map coordinates",
        "render": "wheel and map SVG figures",
        "report": "partner matrix and yearly series tables plus a text report",
        "all": "run every stage",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    fx = sub.add_parser("fixture", help="write a bundled fixture (records + country table)")
    fx.add_argument("name", choices=("egypt", "africa"))
    fx.add_argument("--out", default="fixture")
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    values = read_config(args.config) if args.config else {}
    for f in fields(PipelineConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    try:
        cfg = PipelineConfig(**values)
        cfg.policy()
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if cfg.scope not in ("all", "region"):
        raise UsageError(f"scope must be all or region, got {cfg.scope!r}")
    if cfg.unknown_policy not in ("reject", "keep"):
        raise UsageError(f"unknown_policy must be reject or keep, got {cfg.unknown_policy!r}")
    if not cfg.records:
        raise UsageError("no records file given (--records)")
    return cfg


class Pipeline:
    """Lazily computed stages over one configuration."""

    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.out = Path(cfg.out)

    # inputs

    @cached_property
    def parsed(self):
        try:
            return read_records(self.cfg.records)
        except FileNotFoundError:
            raise UsageError(f"records file not found: {self.cfg.records}") from None
        except (OSError, UnicodeDecodeError) as exc:
            raise UsageError(f"cannot read records file {self.cfg.records}: {exc}") from None

    @cached_property
    def table(self) -> CountryTable | None:
        if not self.cfg.countries:
            return None
        try:
            return read_country_table(self.cfg.countries)
        except FileNotFoundError:
            raise UsageError(f"country table not found: {self.cfg.countries}") from None
        except OSError as exc:
            raise UsageError(f"cannot read country table {self.cfg.countries}: {exc}") from None
        except CountryTableError as exc:
            raise UsageError(f"{self.cfg.countries}: {exc}") from None

    @cached_property
    def all_types(self):
        """Records in the year range, any document type (for type shares)."""
        return filter_records(self.parsed[0], DOC_TYPES, self.cfg.years)

    @cached_property
    def records(self):
        return filter_records(self.parsed[0], self.cfg.doc_types, self.cfg.years)

    @cached_property
    def scope(self):
        if self.cfg.scope == "all":
            return "all"
        if self.table is None:
            raise UsageError("--scope region needs a country table (--countries)")
        return self.table.region_codes()

    @cached_property
    def window(self) -> tuple[int, int]:
        if not self.records:
            raise PipelineError("no records left after filtering")
        end = max(r.year for r in self.records)
        return end - self.cfg.window + 1, end

    # graphs

    @cached_property
    def graph(self) -> CollabGraph:
        """Full-range graph over every country (for tables)."""
        return build_graph(self.records, table=self.table, unknown_policy=self.cfg.unknown_policy)

    @cached_property
    def window_graph(self) -> CollabGraph:
        lo, hi = self.window
        recs = [r for r in self.records if lo <= r.year <= hi]
        return build_graph(recs, self.scope, table=self.table,
                           unknown_policy=self.cfg.unknown_policy, year_range=(lo, hi))

    @cached_property
    def persistent(self) -> CollabGraph:
        return apply_threshold(self.window_graph, self.cfg.policy(), self.window[1])

    @cached_property
    def clustering(self) -> Clustering:
        if not self.window_graph.nodes:
            raise PipelineError("the recent-window graph is empty")
        return cluster(self.window_graph, self.cfg.resolution, self.cfg.seed)

    @cached_property
    def wheel(self) -> CircularOrder:
        g = self.persistent
        if not g.nodes:
            return CircularOrder((), Fraction(0))
        return circular_order(g, self.clustering.restrict(g.nodes), self.cfg.seed)

    @cached_property
    def map(self) -> MapCoordinates | None:
        g = self.window_graph
        if len(g.nodes) < 2 or not any(g.edges.values()):
            log.warning("map layout skipped: needs at least two linked nodes")
            return None
        return map_layout(normalize(g), self.cfg.seed)

    @cached_property
    def focus(self) -> str:
        if self.cfg.focus:
            return self.cfg.focus
        if not self.graph.nodes:
            raise PipelineError("graph is empty")
        return min(self.graph.nodes, key=lambda c: (-self.graph.nodes[c], c))

    @cached_property
    def partners(self) -> tuple[str, ...]:
        if self.cfg.partners:
            return self.cfg.partners
        links = {b if a == self.focus else a: w for (a, b), w in self.graph.edges.items() if self.focus in (a, b)}
        return tuple(sorted(links, key=lambda c: (-links[c], c))[:2])

    def names(self) -> dict[str, str]:
        return {c: e.name for c, e in self.table.entries.items()} if self.table else {}

    # helpers

    def wants(self, emission: str) -> bool:
        return emission in self.cfg.emit

    def write(self, name: str, text: str) -> None:
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / name).write_text(text, encoding="utf-8", newline="")
        log.info("wrote %s", self.out / name)

    def undefined(self, exc: UndefinedIndicatorError):
        if self.cfg.strict:
            raise PipelineError(str(exc)) from exc
        log.warning("undefined indicator: %s", exc)
        return None

    # stages

    def stage_ingest(self):
        records, report = self.parsed
        if self.wants("records"):
            self.write("records.tsv", serialize_records(self.records))
        if self.wants("ingest-report"):
            payload = report.to_dict()
            payload["records_after_filter"] = len(self.records)
            self.write("ingest_report.json", json.dumps(payload, indent=2) + "\n")

    def stage_graph(self):
        for fmt, ext in (("graphml", "graphml"), ("pajek", "paj")):
            if self.wants(fmt):
                self.write(f"window.{ext}", export_graph(self.window_graph, self.clustering, fmt))
                self.write(f"persistent.{ext}", export_graph(
                    self.persistent, self.clustering.restrict(self.persistent.nodes), fmt))

    def indicator_table(self) -> Table:
        region = self.table.region_codes() if self.table else None
        years = sorted({r.year for r in self.all_types})
        rows = []
        for y in years:
            try:
                sub = substantive_share(self.all_types, y).display
            except UndefinedIndicatorError as exc:
                sub = self.undefined(exc)
            dom = None
            if region:
                substantive = [r for r in self.all_types if r.year == y and r.doc_type in SUBSTANTIVE_TYPES]
                split = domestic_split(substantive, region)
                try:
                    dom = domestic_share(split).display
                except UndefinedIndicatorError as exc:
                    dom = self.undefined(exc)
            total = sum(1 for r in self.all_types if r.year == y)
            rows.append((y, total, None if sub is None else str(sub), None if dom is None else str(dom)))
        return Table(("Year", "Records", "Substantive %", "Domestic %"), tuple(rows))

    def stage_indicators(self):
        if self.wants("indicators"):
            table = self.indicator_table()
            self.write("indicators.csv", table.to_csv())
            self.write("indicators.json", table.to_json())
        if self.wants("betweenness"):
            scores = betweenness(self.window_graph) if self.window_graph.nodes else {}
            ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
            rows = tuple((c, f"{float(v):.6f}", f"{v.numerator}/{v.denominator}") for c, v in ranked)
            self.write("betweenness.csv", Table(("Country", "Betweenness", "Exact"), rows).to_csv())
        if self.wants("gdp-index") and self.table is not None:
            year = self.window[1]
            rows = []
            for code in sorted(self.window_graph.nodes):
                try:
                    v = gdp_index(self.window_graph, self.table, code, year)
                    rows.append((code, year, v.numerator, str(self.table[code].gdp[year]), str(v.display)))
                except UndefinedIndicatorError as exc:
                    self.undefined(exc)
                    rows.append((code, year, self.window_graph.output_in(code, year), None, None))
            rows.sort(key=lambda r: (r[4] is None, -float(r[4] or 0), r[0]))
            self.write("gdp_index.csv", Table(("Country", "Year", "Output", "GDP", "Papers per bn USD"),
                                              tuple(rows)).to_csv())

    def stage_cluster(self):
        if self.wants("clusters"):
            c = self.clustering
            rows = tuple((code, c.assignment[code]) for code in sorted(c.assignment))
            self.write("clusters.csv", Table(("Country", "Cluster"), rows).to_csv())

    def stage_layout(self):
        if not self.wants("layout"):
            return
        payload = {
            "window": list(self.window),
            "wheel": {"order": list(self.wheel.order), "objective": str(self.wheel.objective)},
            "map": None,
        }
        if self.map is not None:
            payload["map"] = {
                "stress": round(self.map.stress, 9),
                "iterations": self.map.iterations,
                "coords": {c: [round(x, 9), round(y, 9)] for c, (x, y) in self.map.coords.items()},
            }
        self.write("layout.json", json.dumps(payload, indent=2) + "\n")

    def stage_render(self):
        spec = RenderSpec(n_lines=self.cfg.n_lines)
        if self.wants("wheel"):
            self.write("wheel.svg", emit_wheel(self.wheel, self.persistent, spec,
                                               self.clustering.restrict(self.persistent.nodes)))
        if self.wants("map") and self.map is not None:
            self.write("map.svg", emit_map(self.map, self.clustering, self.window_graph, spec))

    def report_tables(self) -> tuple[Table, Table]:
        g, focus, partners = self.graph, self.focus, self.partners
        for code in (focus, *partners):
            if code not in g.nodes:
                raise PipelineError(f"country {code} has no records")
        triple = None
        if len(partners) == 2:
            triple = {y: joint_count(self.records, {focus, *partners}, y)
                      for y in range(g.year_range[0], g.year_range[1] + 1)}
        series = yearly_series(g, focus, partners, triple, self.names())
        rows = sorted((c for c in g.nodes if c not in partners), key=lambda c: (-g.nodes[c], c))
        matrix = partner_matrix(g, rows, partners, self.names())
        return matrix, series

    def stage_report(self):
        matrix, series = self.report_tables()
        if self.wants("tables"):
            self.write("table_partners.csv", matrix.to_csv())
            self.write("table_partners.json", matrix.to_json())
            self.write("table_yearly.csv", series.to_csv())
            self.write("table_yearly.json", series.to_json())
        if self.wants("report"):
            self.write("report.txt", self.report_text(series))

    def report_text(self, series: Table) -> str:
        _, report = self.parsed
        cfg = self.cfg
        lines = [
            f"records read: {report.records_read}",
            f"records kept: {report.records_kept}",
            f"records rejected: {len(report.rejects)}",
            f"records after filter: {len(self.records)}",
            f"doc types: {','.join(sorted(cfg.doc_types))}",
            f"year range: {self.graph.year_range[0]}-{self.graph.year_range[1]}",
            f"countries: {len(self.graph.nodes)}",
            f"country pairs: {len(self.graph.edges)}",
            f"recent window: {self.window[0]}-{self.window[1]}",
            f"threshold: {cfg.threshold_mode} min_total={cfg.min_total} "
            f"min_per_year={cfg.min_per_year} window={cfg.window}",
            f"persistent links: {len(self.persistent.edges)} among {len(self.persistent.nodes)} countries",
            f"clusters: {self.clustering.n_clusters} at resolution {cfg.resolution} "
            f"(quality {float(self.clustering.quality):.6f})",
        ]
        for i, members in enumerate(self.clustering.members()):
            lines.append(f"  cluster {i}: {' '.join(members)}")
        lines.append(f"wheel order: {' '.join(self.wheel.order)} (objective {self.wheel.objective})")
        if self.map is not None:
            lines.append(f"map stress: {self.map.stress:.6f}")
        lines += ["", f"yearly series for {self.focus}:", series.to_csv().rstrip("\n")]
        return "\n".join(lines) + "\n"

    def run(self, command: str) -> None:
        stages = STAGES if command == "all" else (command,)
        for stage in stages:
            getattr(self, f"stage_{stage}")()


def write_fixture(name: str, out: str) -> None:
    from . import fixtures

    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    if name == "egypt":
        records, countries = fixtures.egypt_records(), fixtures.EGYPT_COUNTRIES
    else:
        records, countries = fixtures.africa_records(), fixtures.africa_country_table_text()
    (path / "records.tsv").write_text(serialize_records(records), encoding="utf-8")
    (path / "countries.csv").write_text(countries, encoding="utf-8")


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "fixture":
            write_fixture(args.name, args.out)
            return 0
        cfg = resolve_config(args)
        Pipeline(cfg).run(args.command)
    except UsageError as exc:
        print(f"collabnet: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"collabnet: error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 2
    except (PipelineError, ValueError, UndefinedIndicatorError) as exc:
        print(f"collabnet: pipeline error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
