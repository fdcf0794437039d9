"""Global science basemaps from category citation matrices, and overlays on them."""

from .analytics import (
    DiversityReport,
    GrowthVector,
    ReliabilityParams,
    check_normal_approx,
    diversity,
    growth_rates,
    min_sample_size,
    normalize_overlay,
    reliability_zscore,
)
from .basemap import Basemap, build_basemap, load_basemap, parse_basemap, serialize_basemap
from .factors import FactorAssignment, FactorModel, assign_factors, factor_analysis, varimax
from .ingest import (
    AnalyzeRow,
    DocumentRecord,
    OverlayVector,
    overlay_from_records,
    overlay_from_rows,
    parse_analyze,
    parse_tagged,
)
from .layout import Layout, LayoutConfig, kamada_kawai, layout_stress, stress_gradient
from .matrix import CitationMatrix, SimilarityMatrix, cosine_citing, load_citation_matrix
from .network import SimilarityNetwork, build_network, graph_distances
from .registry import CategoryRegistry, apply_factor_labels, load_registry, resolve_name
from .render import RenderOptions, read_pajek_vec, render_svg, write_pajek_net, write_pajek_vec

__version__ = "0.1.0"
