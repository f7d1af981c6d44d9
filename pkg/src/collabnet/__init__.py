"""Country co-authorship networks: ingestion, counting, indicators, clustering, layouts and rendering."""

__version__ = "0.1.0"

from .clustering import Clustering, NormalizedGraph, cluster, normalize, quality_score
from .collabgraph import (
    CollabGraph,
    DomesticSplit,
    ThresholdPolicy,
    apply_threshold,
    build_graph,
    domestic_split,
    joint_count,
)
from .indicators import (
    IndicatorValue,
    UndefinedIndicatorError,
    betweenness,
    domestic_share,
    field_world_share,
    gdp_index,
    partner_percent,
    substantive_share,
)
from .ingest import (
    CountryTable,
    PublicationRecord,
    ValidationReport,
    filter_records,
    parse_country_table,
    parse_records,
    serialize_records,
)
from .layout import CircularOrder, MapCoordinates, circular_order, map_layout, seriation_objective
from .render import RenderSpec, emit_map, emit_tables, emit_wheel, export_graph, import_graph
