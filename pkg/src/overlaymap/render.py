"""Pajek ``.vec``/``.net`` interchange and static SVG maps."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np

from .basemap import Basemap
from .ingest import OverlayVector


class PajekFormatError(ValueError):
    pass


def _num(v: float) -> str:
    """Shortest round-tripping decimal; integral values without a fraction."""
    v = float(v)
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def write_pajek_vec(vec: OverlayVector | np.ndarray) -> str:
    counts = vec.counts if isinstance(vec, OverlayVector) else np.asarray(vec, dtype=np.float64)
    lines = [f"*Vertices {counts.size}"] + [_num(v) for v in counts]
    return "\n".join(lines) + "\n"


def read_pajek_vec(text: str, label: str = "") -> OverlayVector:
    lines = text.splitlines()
    pos = 0
    while pos < len(lines) and not lines[pos].strip():
        pos += 1
    if pos == len(lines):
        raise PajekFormatError("empty .vec document")
    head = lines[pos].split()
    if len(head) != 2 or head[0].lower() != "*vertices":
        raise PajekFormatError(f"line {pos + 1}: expected '*Vertices N'")
    try:
        n = int(head[1])
    except ValueError:
        raise PajekFormatError(f"line {pos + 1}: vertex count {head[1]!r} is not an integer") from None
    values: list[float] = []
    for lineno in range(pos + 1, len(lines)):
        s = lines[lineno].strip()
        if not s:
            continue
        try:
            v = float(s)
        except ValueError:
            raise PajekFormatError(f"line {lineno + 1}: non-numeric value {s!r}") from None
        if not math.isfinite(v):
            raise PajekFormatError(f"line {lineno + 1}: non-finite value {s!r}")
        values.append(v)
    if len(values) != n:
        raise PajekFormatError(f"count mismatch: *Vertices {n} but {len(values)} values")
    counts = np.array(values, dtype=np.float64)
    total = int(round(counts.sum())) if counts.size else 0
    return OverlayVector(counts, total_documents=total, label=label)


def write_pajek_net(basemap: Basemap) -> str:
    """Vertices with quoted labels and ``x y`` in [0, 1], then 1-based weighted edges."""
    S = basemap.size
    lines = [f"*Vertices {S}"]
    xy = np.clip(basemap.coordinates + 0.5, 0.0, 1.0)
    for c in basemap.registry.categories:
        name = c.name.replace('"', "'")
        x, y = xy[c.id]
        # Pajek's y axis points down
        lines.append(f'{c.id + 1} "{name}" {x:.6f} {1.0 - y:.6f}')
    lines.append("*Edges")
    for i, j, w in sorted(basemap.network.edges):
        lines.append(f"{i + 1} {j + 1} {_num(w)}")
    return "\n".join(lines) + "\n"


# -- SVG ----------------------------------------------------------------------


@dataclass(frozen=True)
class RenderOptions:
    scale: float = 1.0  # multiplies every node radius
    size_mapping: str = "sqrt"  # "sqrt" (area proportional) or "linear" (radius proportional)
    labels: str | int = "off"  # "on", "off" or top-k as an int
    font_size: float = 9.0
    edge_threshold: float | None = None  # None draws every basemap edge
    width: int = 900
    height: int = 900
    color_by: str = "factor"  # "factor" or "uniform"
    max_radius: float = 22.0
    base_radius: float = 5.0  # node radius without overlay
    empty_radius: float = 2.5  # outline marker for zero or undefined values
    title: str = ""

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ValueError("scale must be > 0")
        if self.size_mapping not in ("sqrt", "linear"):
            raise ValueError(f"size_mapping must be 'sqrt' or 'linear', got {self.size_mapping!r}")
        if self.color_by not in ("factor", "uniform"):
            raise ValueError(f"color_by must be 'factor' or 'uniform', got {self.color_by!r}")
        if isinstance(self.labels, int) and not isinstance(self.labels, bool):
            if self.labels < 0:
                raise ValueError("top-k labels must be >= 0")
        elif self.labels not in ("on", "off"):
            raise ValueError(f"labels must be 'on', 'off' or an int, got {self.labels!r}")


def node_radii(values: np.ndarray | None, opts: RenderOptions, n: int) -> np.ndarray:
    """Radius per node; NaN marks nodes drawn as empty outlines."""
    if values is None:
        return np.full(n, opts.base_radius * opts.scale)
    v = np.asarray(values, dtype=np.float64)
    finite = np.isfinite(v) & (v > 0)
    peak = float(v[finite].max()) if finite.any() else 0.0
    r = np.full(n, np.nan)
    if peak > 0:
        rel = v[finite] / peak
        shape = np.sqrt(rel) if opts.size_mapping == "sqrt" else rel
        r[finite] = opts.max_radius * opts.scale * shape
    return r


def _labelled(values: np.ndarray | None, opts: RenderOptions, n: int) -> set[int]:
    if opts.labels == "off":
        return set()
    if opts.labels == "on":
        return set(range(n))
    k = int(opts.labels)
    key = np.zeros(n) if values is None else np.nan_to_num(np.asarray(values, dtype=float), nan=-np.inf)
    order = sorted(range(n), key=lambda i: (-key[i], i))
    return set(order[:k])


def _grey(t: float) -> str:
    level = int(round(200 - 160 * t))
    return f"#{level:02x}{level:02x}{level:02x}"


def render_svg(
    basemap: Basemap,
    overlay: OverlayVector | np.ndarray | None = None,
    opts: RenderOptions | None = None,
) -> str:
    """Draw the basemap, optionally sized by an overlay.

    Edges sit below nodes; stroke width and darkness grow with similarity.
    Nodes with a zero (or NaN) overlay value remain as small hollow markers.
    """
    opts = opts or RenderOptions()
    S = basemap.size
    values = None
    if overlay is not None:
        values = overlay.counts if isinstance(overlay, OverlayVector) else np.asarray(overlay, dtype=float)
        if values.shape != (S,):
            raise ValueError(f"overlay has {values.size} categories; basemap has {S}")
    radii = node_radii(values, opts, S)

    margin = opts.max_radius * opts.scale + 4
    span_x, span_y = opts.width - 2 * margin, opts.height - 2 * margin
    span = min(span_x, span_y)

    def to_px(i: int) -> tuple[float, float]:
        x, y = basemap.coordinates[i]
        return (opts.width / 2 + float(x) * span, opts.height / 2 - float(y) * span)

    svg = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "version": "1.1",
            "width": str(opts.width),
            "height": str(opts.height),
            "viewBox": f"0 0 {opts.width} {opts.height}",
        },
    )
    meta = ET.SubElement(svg, "metadata")
    meta.text = f"basemap {basemap.content_hash()}"
    if opts.title:
        ET.SubElement(svg, "title").text = opts.title
    ET.SubElement(svg, "rect", {"width": "100%", "height": "100%", "fill": "#ffffff"})

    tau = basemap.threshold
    cut = tau if opts.edge_threshold is None else max(opts.edge_threshold, tau)
    g_edges = ET.SubElement(svg, "g", {"id": "edges"})
    for i, j, w in sorted(basemap.network.edges):
        if w <= cut:
            continue
        t = (w - tau) / (1.0 - tau) if tau < 1 else 1.0
        t = min(max(t, 0.0), 1.0)
        (x1, y1), (x2, y2) = to_px(i), to_px(j)
        ET.SubElement(
            g_edges,
            "line",
            {
                "class": "edge",
                "x1": f"{x1:.3f}",
                "y1": f"{y1:.3f}",
                "x2": f"{x2:.3f}",
                "y2": f"{y2:.3f}",
                "stroke": _grey(t),
                "stroke-width": f"{0.3 + 2.2 * t:.4f}",
                "data-w": repr(float(w)),
            },
        )

    cats = basemap.registry.categories
    macros = basemap.registry.macros
    # larger nodes first so small ones stay visible on top
    draw_order = sorted(range(S), key=lambda i: (-(np.nan_to_num(radii[i], nan=0.0)), i))
    g_nodes = ET.SubElement(svg, "g", {"id": "nodes"})
    for i in draw_order:
        cx, cy = to_px(i)
        mid = cats[i].macro_id
        colour = macros[mid].hex if (opts.color_by == "factor" and mid is not None and mid < len(macros)) else "#4a6fa5"
        attrs = {"class": "node", "data-id": str(i), "cx": f"{cx:.3f}", "cy": f"{cy:.3f}"}
        if np.isnan(radii[i]):
            attrs.update(
                {
                    "r": repr(opts.empty_radius * opts.scale),
                    "fill": "none",
                    "stroke": colour,
                    "stroke-width": "0.8",
                    "class": "node empty",
                }
            )
        else:
            attrs.update({"r": repr(float(radii[i])), "fill": colour, "fill-opacity": "0.8", "stroke": "#333333", "stroke-width": "0.4"})
        circle = ET.SubElement(g_nodes, "circle", attrs)
        ET.SubElement(circle, "title").text = cats[i].name

    shown = _labelled(values, opts, S)
    if shown:
        g_labels = ET.SubElement(svg, "g", {"id": "labels", "font-family": "sans-serif"})
        for i in sorted(shown):
            cx, cy = to_px(i)
            r = radii[i] if not np.isnan(radii[i]) else opts.empty_radius * opts.scale
            ET.SubElement(
                g_labels,
                "text",
                {
                    "class": "label",
                    "data-id": str(i),
                    "x": f"{cx + r + 1:.3f}",
                    "y": f"{cy + opts.font_size / 3:.3f}",
                    "font-size": f"{opts.font_size:g}",
                },
            ).text = cats[i].name

    ET.indent(svg)
    body = ET.tostring(svg, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"
