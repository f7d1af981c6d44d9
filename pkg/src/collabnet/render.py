"""Byte-deterministic emitters: SVG figures, GraphML/Pajek graphs, CSV/JSON tables."""

from __future__ import annotations

import csv
import io
import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

from .clustering import Clustering
from .collabgraph import CollabGraph, pair
from .indicators import UndefinedIndicatorError, partner_percent
from .layout import CircularOrder, MapCoordinates

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)


@dataclass(frozen=True)
class RenderSpec:
    n_lines: int = 1000
    label_scale: float = 1.0
    size: int = 800
    palette: tuple[str, ...] = PALETTE
    max_radius: float = 24.0
    max_stroke: float = 6.0

    def __post_init__(self):
        if self.n_lines < 0:
            raise ValueError("n_lines must be >= 0")
        if not self.palette:
            raise ValueError("palette must be non-empty")


def _f(x: float) -> str:
    text = f"{x:.2f}"
    return "0.00" if text == "-0.00" else text


def _svg_open(size: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]


def top_edges(graph: CollabGraph, n: int) -> list[tuple[tuple[str, str], int]]:
    """The ``n`` heaviest positive edges, ties broken by pair."""
    ranked = sorted(((p, w) for p, w in graph.edges.items() if w > 0), key=lambda pw: (-pw[1], pw[0]))
    return ranked[:n]


def _stroke(w: int, wmax: int, spec: RenderSpec) -> float:
    return 0.5 + (spec.max_stroke - 0.5) * w / wmax


def _radius(output: int, omax: int, spec: RenderSpec) -> float:
    # area proportional to output
    return 2.0 + (spec.max_radius - 2.0) * math.sqrt(output / omax) if omax else 2.0


def emit_wheel(order: CircularOrder, graph: CollabGraph, spec: RenderSpec = RenderSpec(),
               clustering: Clustering | None = None) -> str:
    """Nodes evenly spaced on a circle in ``order``; one chord per edge."""
    size = spec.size
    cx = cy = size / 2
    radius = size * 0.38
    n = len(order.order)
    pos = {}
    for i, code in enumerate(order.order):
        angle = 2 * math.pi * i / n - math.pi / 2
        pos[code] = (cx + radius * math.cos(angle), cy + radius * math.sin(angle), angle)
    lines = _svg_open(size)
    lines.append(f'<circle class="rim" cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(radius)}" fill="none" stroke="#cccccc"/>')
    edges = [(p, w) for p, w in sorted(graph.edges.items()) if w > 0]
    wmax = max((w for _, w in edges), default=1)
    lines.append('<g class="chords" fill="none" stroke="#555555" stroke-opacity="0.6">')
    for (a, b), w in edges:
        xa, ya, _ = pos[a]
        xb, yb, _ = pos[b]
        lines.append(
            f'<path class="chord" data-source="{a}" data-target="{b}" data-weight="{w}" '
            f'd="M {_f(xa)} {_f(ya)} Q {_f(cx)} {_f(cy)} {_f(xb)} {_f(yb)}" '
            f'stroke-width="{_f(_stroke(w, wmax, spec))}"/>'
        )
    lines.append("</g>")
    omax = max(graph.nodes.values(), default=0)
    font = 12 * spec.label_scale
    lines.append('<g class="nodes">')
    for code in order.order:
        x, y, angle = pos[code]
        fill = spec.palette[clustering.assignment[code] % len(spec.palette)] if clustering else spec.palette[0]
        r = _radius(graph.nodes.get(code, 0), omax, spec) / 2
        lx = cx + (radius + r + 8) * math.cos(angle)
        ly = cy + (radius + r + 8) * math.sin(angle)
        anchor = "start" if math.cos(angle) > 1e-9 else ("end" if math.cos(angle) < -1e-9 else "middle")
        lines.append(f'<circle class="node" data-id="{code}" cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{fill}"/>')
        lines.append(
            f'<text x="{_f(lx)}" y="{_f(ly)}" font-size="{_f(font)}" text-anchor="{anchor}" '
            f'dominant-baseline="middle">{escape(code)}</text>'
        )
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_map(coords: MapCoordinates, clustering: Clustering, graph: CollabGraph,
             spec: RenderSpec = RenderSpec()) -> str:
    """Nodes at map coordinates, coloured by cluster, sized by output."""
    size = spec.size
    margin = spec.max_radius + 30
    codes = sorted(graph.nodes)
    xs = [coords.coords[c][0] for c in codes] or [0.0]
    ys = [coords.coords[c][1] for c in codes] or [0.0]
    span = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
    scale = (size - 2 * margin) / span
    midx, midy = (max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2

    def place(code):
        x, y = coords.coords[code]
        return size / 2 + (x - midx) * scale, size / 2 - (y - midy) * scale

    lines = _svg_open(size)
    edges = top_edges(graph, spec.n_lines)
    wmax = max((w for _, w in edges), default=1)
    lines.append('<g class="edges" stroke="#999999" stroke-opacity="0.5">')
    for (a, b), w in edges:
        (xa, ya), (xb, yb) = place(a), place(b)
        lines.append(
            f'<line class="edge" data-source="{a}" data-target="{b}" data-weight="{w}" '
            f'x1="{_f(xa)}" y1="{_f(ya)}" x2="{_f(xb)}" y2="{_f(yb)}" '
            f'stroke-width="{_f(_stroke(w, wmax, spec) / 2)}"/>'
        )
    lines.append("</g>")
    omax = max(graph.nodes.values(), default=0)
    font = 11 * spec.label_scale
    lines.append('<g class="nodes" fill-opacity="0.85">')
    for code in codes:
        x, y = place(code)
        cid = clustering.assignment[code]
        r = _radius(graph.nodes[code], omax, spec)
        lines.append(
            f'<circle class="node" data-id="{code}" data-cluster="{cid}" cx="{_f(x)}" cy="{_f(y)}" '
            f'r="{_f(r)}" fill="{spec.palette[cid % len(spec.palette)]}"/>'
        )
        lines.append(
            f'<text x="{_f(x)}" y="{_f(y + r + font)}" font-size="{_f(font)}" '
            f'text-anchor="middle">{escape(code)}</text>'
        )
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# graph files

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def export_graph(graph: CollabGraph, clustering: Clustering | None = None,
                 format: Literal["graphml", "pajek"] = "graphml") -> str:
    if format == "graphml":
        return _to_graphml(graph, clustering)
    if format == "pajek":
        return _to_pajek(graph, clustering)
    raise ValueError(f"unsupported graph format {format!r}")


def import_graph(text: str, format: Literal["graphml", "pajek"] = "graphml") -> tuple[CollabGraph, dict[str, int] | None]:
    """Inverse of :func:`export_graph`: returns the graph and cluster ids (or None)."""
    if format == "graphml":
        return _from_graphml(text)
    if format == "pajek":
        return _from_pajek(text)
    raise ValueError(f"unsupported graph format {format!r}")


def _series(s: Mapping[int, int]) -> str:
    return ";".join(f"{y}:{c}" for y, c in sorted(s.items()))


def _parse_series(text: str) -> dict[int, int]:
    out = {}
    for item in filter(None, text.split(";")):
        y, c = item.split(":")
        out[int(y)] = int(c)
    return out


def _to_graphml(graph: CollabGraph, clustering: Clustering | None) -> str:
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<graphml xmlns="{GRAPHML_NS}">',
        '  <key id="output" for="node" attr.name="output" attr.type="int"/>',
        '  <key id="node_yearly" for="node" attr.name="yearly" attr.type="string"/>',
        '  <key id="weight" for="edge" attr.name="weight" attr.type="int"/>',
        '  <key id="edge_yearly" for="edge" attr.name="yearly" attr.type="string"/>',
        '  <key id="year_range" for="graph" attr.name="year_range" attr.type="string"/>',
    ]
    if clustering is not None:
        lines.append('  <key id="cluster" for="node" attr.name="cluster" attr.type="int"/>')
    lines.append('  <graph id="G" edgedefault="undirected">')
    if graph.year_range is not None:
        lines.append(f'    <data key="year_range">{graph.year_range[0]}:{graph.year_range[1]}</data>')
    for code in sorted(graph.nodes):
        lines.append(f"    <node id={quoteattr(code)}>")
        lines.append(f'      <data key="output">{graph.nodes[code]}</data>')
        if graph.node_yearly.get(code):
            lines.append(f'      <data key="node_yearly">{_series(graph.node_yearly[code])}</data>')
        if clustering is not None:
            lines.append(f'      <data key="cluster">{clustering.assignment[code]}</data>')
        lines.append("    </node>")
    for (a, b) in sorted(graph.edges):
        lines.append(f"    <edge source={quoteattr(a)} target={quoteattr(b)}>")
        lines.append(f'      <data key="weight">{graph.edges[(a, b)]}</data>')
        if graph.yearly.get((a, b)):
            lines.append(f'      <data key="edge_yearly">{_series(graph.yearly[(a, b)])}</data>')
        lines.append("    </edge>")
    lines.append("  </graph>")
    lines.append("</graphml>")
    return "\n".join(lines) + "\n"


def _from_graphml(text: str):
    root = ET.fromstring(text)
    ns = {"g": GRAPHML_NS}
    keys = {k.get("id"): (k.get("for"), k.get("attr.name")) for k in root.findall("g:key", ns)}
    g = root.find("g:graph", ns)
    if g is None:
        raise ValueError("GraphML document has no graph element")

    def data(el):
        return {keys[d.get("key")][1]: (d.text or "") for d in el.findall("g:data", ns)}

    year_range = None
    if "year_range" in data(g):
        lo, hi = data(g)["year_range"].split(":")
        year_range = (int(lo), int(hi))
    nodes, node_yearly, clusters = {}, {}, {}
    for el in g.findall("g:node", ns):
        d = data(el)
        code = el.get("id")
        nodes[code] = int(d.get("output", 0))
        if d.get("yearly"):
            node_yearly[code] = _parse_series(d["yearly"])
        if "cluster" in d:
            clusters[code] = int(d["cluster"])
    edges, yearly = {}, {}
    for el in g.findall("g:edge", ns):
        d = data(el)
        p = pair(el.get("source"), el.get("target"))
        edges[p] = int(d.get("weight", 1))
        if d.get("yearly"):
            yearly[p] = _parse_series(d["yearly"])
    graph = CollabGraph(
        nodes=dict(sorted(nodes.items())),
        edges=dict(sorted(edges.items())),
        yearly=dict(sorted(yearly.items())),
        node_yearly=dict(sorted(node_yearly.items())),
        year_range=year_range,
    )
    return graph, (clusters or None)


def _to_pajek(graph: CollabGraph, clustering: Clustering | None) -> str:
    """Pajek project: network, an ``output`` vector and an optional partition."""
    codes = sorted(graph.nodes)
    num = {c: i + 1 for i, c in enumerate(codes)}
    n = len(codes)
    lines = ["*Network collab", f"*Vertices {n}"]
    lines += [f'{num[c]} "{c}"' for c in codes]
    lines.append("*Edges")
    lines += [f"{num[a]} {num[b]} {graph.edges[(a, b)]}" for (a, b) in sorted(graph.edges)]
    lines += ["", "*Vector output", f"*Vertices {n}"]
    lines += [str(graph.nodes[c]) for c in codes]
    if clustering is not None:
        lines += ["", "*Partition cluster", f"*Vertices {n}"]
        lines += [str(clustering.assignment[c]) for c in codes]
    return "\n".join(lines) + "\n"


def _from_pajek(text: str):
    lines = [ln.strip() for ln in text.splitlines()]
    codes: list[str] = []
    edges: dict = {}
    outputs: list[int] = []
    clusters: list[int] = []
    section = None
    for ln in lines:
        if not ln:
            continue
        low = ln.lower()
        if low.startswith("*network"):
            section = "network"
        elif low.startswith("*vector"):
            section = "vector"
        elif low.startswith("*partition"):
            section = "partition"
        elif low.startswith("*vertices"):
            section = {"network": "vertices", "vector": "vector-values", "partition": "partition-values"}[section]
        elif low.startswith("*edges"):
            section = "edges"
        elif section == "vertices":
            head, label = ln.split(" ", 1)
            codes.append(label.strip().strip('"'))
        elif section == "edges":
            i, j, w = ln.split()[:3]
            edges[pair(codes[int(i) - 1], codes[int(j) - 1])] = int(w)
        elif section == "vector-values":
            outputs.append(int(ln))
        elif section == "partition-values":
            clusters.append(int(ln))
    nodes = dict(zip(codes, outputs)) if outputs else dict.fromkeys(codes, 0)
    graph = CollabGraph(nodes=dict(sorted(nodes.items())), edges=dict(sorted(edges.items())))
    return graph, (dict(zip(codes, clusters)) if clusters else None)


# tables


@dataclass(frozen=True)
class Table:
    header: tuple[str, ...]
    rows: tuple[tuple[object, ...], ...]

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow(["" if v is None else v for v in row])
        return out.getvalue()

    def to_json(self) -> str:
        body = [dict(zip(self.header, row)) for row in self.rows]
        return json.dumps({"columns": list(self.header), "rows": body}, indent=2) + "\n"


def _name(code: str, names: Mapping[str, str] | None) -> str:
    return names.get(code, code) if names else code


def partner_matrix(graph: CollabGraph, countries: Sequence[str], partners: Sequence[str],
                   names: Mapping[str, str] | None = None,
                   totals: Mapping[str, object] | None = None) -> Table:
    """Output and joint-paper counts of each country with each partner.

    A pair with no joint papers is left blank. ``totals`` optionally adds a
    leading summary row (label, output, then one value per partner).
    """
    for code in (*countries, *partners):
        if code not in graph.nodes:
            raise ValueError(f"unknown country {code}")
    header = ("Country", "Output", *(_name(p, names) for p in partners))
    rows = []
    if totals is not None:
        rows.append(tuple(totals.get(k) for k in ("label", "output", *partners)))
    for c in countries:
        rows.append((_name(c, names), graph.nodes[c],
                     *((graph.weight(c, p) or None) if c != p else None for p in partners)))
    return Table(header, tuple(rows))


def yearly_series(graph: CollabGraph, country: str, partners: Sequence[str],
                  triple: Mapping[int, int | None] | None = None,
                  names: Mapping[str, str] | None = None,
                  years: Iterable[int] | None = None) -> Table:
    """Per-year output of ``country`` with its joint counts and integer
    percent columns for each partner; the optional ``triple`` column holds
    papers shared by all of them. Undefined or missing values stay blank."""
    for code in (country, *partners):
        if code not in graph.nodes:
            raise ValueError(f"unknown country {code}")
    cn = _name(country, names)
    header = ["Year", f"{cn} total"]
    for i, p in enumerate(partners):
        pn = _name(p, names)
        joint, pct = f"{cn} + {pn}", f"{pn} as % {cn}"
        # first partner: count then percent; later partners mirror it
        header += [joint, pct] if i == 0 else [pct, joint]
        if i == 0 and triple is not None:
            header.append("Triple co-authors")
    if years is None:
        years = range(graph.year_range[0], graph.year_range[1] + 1) if graph.year_range else ()
    rows = []
    for y in years:
        row: list[object] = [y, graph.output_in(country, y)]
        for i, p in enumerate(partners):
            try:
                pct: object = int(partner_percent(graph, country, p, y).display)
            except UndefinedIndicatorError:
                pct = None
            joint = graph.joint_in(country, p, y)
            row += [joint, pct] if i == 0 else [pct, joint]
            if i == 0 and triple is not None:
                row.append(triple.get(y))
        rows.append(tuple(row))
    return Table(tuple(header), tuple(rows))


def emit_tables(graph: CollabGraph, indicators: Mapping[str, object],
                shape: Literal["partner-matrix", "yearly-series"],
                fmt: Literal["csv", "json"] = "csv") -> str:
    """Render a Table 1 style matrix or a Egypt series style yearly series.

    ``indicators`` carries the request: ``countries``/``partners`` for the
    matrix, ``country``/``partners``/``triple`` for the series, plus
    optional ``names``, ``totals`` and ``years``.
    """
    names = indicators.get("names")
    if shape == "partner-matrix":
        table = partner_matrix(graph, indicators["countries"], indicators["partners"], names,
                               indicators.get("totals"))
    elif shape == "yearly-series":
        table = yearly_series(graph, indicators["country"], indicators["partners"],
                              indicators.get("triple"), names, indicators.get("years"))
    else:
        raise ValueError(f"unknown table shape {shape!r}")
    if fmt == "csv":
        return table.to_csv()
    if fmt == "json":
        return table.to_json()
    raise ValueError(f"unknown table format {fmt!r}")
