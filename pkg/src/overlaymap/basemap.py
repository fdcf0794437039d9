"""The global template: network + layout + macro-discipline partition.

Serialized form (UTF-8, ``\\n`` line endings, TAB-separated fields)::

    #overlaymap-basemap 1
    [provenance]
    key=value                       one per line, keys sorted
    [macro]
    id  label  #rrggbb  explained_variance
    [nodes]
    id  x  y  factor  name  alias1;alias2
    [edges]
    i  j  w                          0-based, i < j, sorted
    [similarity]
    S rows of S values               full cosine matrix, used by diversity

Floats are written with ``repr`` so that parse -> serialize is bit-identical.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .factors import FactorAssignment, FactorModel, assign_factors, factor_analysis
from .layout import Layout, LayoutConfig, kamada_kawai
from .matrix import CitationMatrix, SimilarityMatrix, cosine_citing
from .network import DEFAULT_THRESHOLD, SimilarityNetwork, build_network, graph_distances
from .registry import (
    CategoryRegistry,
    MacroDiscipline,
    SubjectCategory,
    apply_factor_labels,
    default_labels,
    default_palette,
    parse_color,
)

MAGIC = "#overlaymap-basemap 1"
DEFAULT_FACTORS = 18


class BasemapFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Basemap:
    registry: CategoryRegistry  # with macro-disciplines applied
    coordinates: np.ndarray  # (S, 2) in the unit box centred at 0
    network: SimilarityNetwork
    similarity: SimilarityMatrix
    explained_variance: tuple[float, ...]
    provenance: dict[str, str] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.registry.size

    @property
    def n_factors(self) -> int:
        return len(self.registry.macros)

    @property
    def threshold(self) -> float:
        return self.network.threshold

    @property
    def assignment(self) -> list[int]:
        return [int(c.macro_id) for c in self.registry.categories]

    def factor_sizes(self) -> list[int]:
        a = self.assignment
        return [a.count(f) for f in range(self.n_factors)]

    def serialize(self) -> str:
        return serialize_basemap(self)

    def content_hash(self) -> str:
        return "sha256:" + hashlib.sha256(self.serialize().encode("utf-8")).hexdigest()


def build_basemap(
    matrix: CitationMatrix,
    registry: CategoryRegistry,
    threshold: float = DEFAULT_THRESHOLD,
    n_factors: int = DEFAULT_FACTORS,
    config: LayoutConfig | None = None,
    include_diagonal: bool = True,
    labels: Sequence[str] | None = None,
    palette: Sequence[tuple[int, int, int]] | None = None,
) -> tuple[Basemap, Layout, FactorModel, FactorAssignment]:
    """Run the full pipeline and return the basemap with its intermediate results.

    Layout uses the thresholded network; factor analysis uses the cosine
    matrix. Both choices are written into the provenance block.
    """
    if matrix.size != registry.size:
        raise ValueError(f"matrix has {matrix.size} categories, registry {registry.size}")
    config = config or LayoutConfig()
    sim = cosine_citing(matrix, include_diagonal=include_diagonal)
    net = build_network(sim, threshold)
    layout = kamada_kawai(net, config, graph_distances(net))
    model = factor_analysis(sim, n_factors)
    fa = assign_factors(model)
    labels = list(labels) if labels is not None else default_labels(n_factors)
    palette = list(palette) if palette is not None else default_palette(n_factors)
    labelled = apply_factor_labels(registry, fa, labels, palette)
    provenance = {
        "threshold": repr(float(threshold)),
        "factors": str(n_factors),
        "seed": str(config.seed),
        "include_diagonal": str(include_diagonal).lower(),
        "input_hash": matrix.content_hash(),
        "input_total": str(matrix.total),
        "layout_input": "thresholded-network",
        "factor_input": "cosine-matrix",
        "factor_method": "principal-components+varimax",
        "length_scale": repr(config.length_scale),
        "spring_constant": repr(config.spring_constant),
        "tol": repr(config.tol),
        "max_steps": str(config.max_steps),
        "final_stress": repr(layout.final_stress),
        "initial_stress": repr(layout.initial_stress),
        "layout_steps": str(layout.steps),
        "convergence": layout.reason,
        "factor_ties": ",".join(str(i) for i in fa.ties),
        "zero_rows": ",".join(str(i) for i in sim.zero_rows),
    }
    basemap = Basemap(
        registry=labelled,
        coordinates=layout.coordinates,
        network=net,
        similarity=sim,
        explained_variance=tuple(float(v) for v in model.explained_variance),
        provenance=provenance,
    )
    return basemap, layout, model, fa


def serialize_basemap(bm: Basemap) -> str:
    out = [MAGIC, "[provenance]"]
    out += [f"{k}={bm.provenance[k]}" for k in sorted(bm.provenance)]
    out.append("[macro]")
    for m in bm.registry.macros:
        ev = bm.explained_variance[m.id] if m.id < len(bm.explained_variance) else 0.0
        out.append(f"{m.id}\t{m.label}\t{m.hex}\t{ev!r}")
    out.append("[nodes]")
    for c in bm.registry.categories:
        x, y = (float(v) for v in bm.coordinates[c.id])
        macro = "" if c.macro_id is None else str(c.macro_id)
        out.append(f"{c.id}\t{x!r}\t{y!r}\t{macro}\t{c.name}\t{';'.join(c.aliases)}")
    out.append("[edges]")
    out += [f"{i}\t{j}\t{float(w)!r}" for i, j, w in bm.network.edges]
    out.append("[similarity]")
    out += ["\t".join(repr(float(v)) for v in row) for row in bm.similarity.values]
    return "\n".join(out) + "\n"


def _sections(text: str) -> dict[str, list[str]]:
    lines = text.split("\n")
    if not lines or lines[0] != MAGIC:
        raise BasemapFormatError(f"not a basemap file (expected first line {MAGIC!r})")
    sections: dict[str, list[str]] = {}
    current = None
    for line in lines[1:]:
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            if current in sections:
                raise BasemapFormatError(f"section [{current}] repeated")
            sections[current] = []
        elif current is None:
            if line:
                raise BasemapFormatError("content before the first section")
        elif line:
            sections[current].append(line)
    for required in ("provenance", "macro", "nodes", "edges", "similarity"):
        if required not in sections:
            raise BasemapFormatError(f"missing section [{required}]")
    return sections


def parse_basemap(text: str) -> Basemap:
    sec = _sections(text)
    try:
        provenance = dict(line.split("=", 1) for line in sec["provenance"])
        macros, explained = [], []
        for line in sec["macro"]:
            mid, label, color, ev = line.split("\t")
            macros.append(MacroDiscipline(int(mid), label, parse_color(color)))
            explained.append(float(ev))
        cats, coords = [], []
        for line in sec["nodes"]:
            cid, x, y, macro, name, aliases = line.split("\t")
            cats.append(
                SubjectCategory(
                    int(cid),
                    name,
                    tuple(a for a in aliases.split(";") if a),
                    int(macro) if macro else None,
                )
            )
            coords.append((float(x), float(y)))
        S = len(cats)
        edges = []
        for line in sec["edges"]:
            i, j, w = line.split("\t")
            edges.append((int(i), int(j), float(w)))
        sim_rows = [[float(v) for v in line.split("\t")] for line in sec["similarity"]]
    except ValueError as exc:
        raise BasemapFormatError(f"malformed basemap: {exc}") from None
    if len(sim_rows) != S or any(len(r) != S for r in sim_rows):
        raise BasemapFormatError("similarity section is not S x S")
    registry = CategoryRegistry(tuple(cats), tuple(macros))
    zero_rows = tuple(int(v) for v in provenance.get("zero_rows", "").split(",") if v)
    sim = SimilarityMatrix(
        np.array(sim_rows, dtype=np.float64).reshape(S, S),
        include_diagonal=provenance.get("include_diagonal", "true") == "true",
        zero_rows=zero_rows,
    )
    net = SimilarityNetwork(S, tuple(edges), float(provenance.get("threshold", DEFAULT_THRESHOLD)))
    return Basemap(
        registry=registry,
        coordinates=np.array(coords, dtype=np.float64).reshape(S, 2),
        network=net,
        similarity=sim,
        explained_variance=tuple(explained),
        provenance=provenance,
    )


def load_basemap(path: str | Path) -> Basemap:
    return parse_basemap(Path(path).read_text(encoding="utf-8"))
