"""Time the desk-scale pipeline end to end and print a short report.

matrix -> basemap (tau=0.15, F=3) -> Analyze overlay -> SVG, then checks
that circle areas are proportional to the overlay counts.
"""

from __future__ import annotations

import argparse
import time
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from overlaymap import LayoutConfig, build_basemap, overlay_from_rows, render_svg
from overlaymap.ingest import parse_analyze_text
from overlaymap.synthetic import analyze_rows, block_citation_matrix, block_registry, format_analyze


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--blocks", type=int, nargs="+", default=[10, 10, 10])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--svg", type=Path, help="optional path for the rendered overlay")
    args = ap.parse_args()

    t0 = time.perf_counter()
    registry = block_registry(args.blocks)
    matrix = block_citation_matrix(args.blocks, seed=args.seed)
    bm, layout, _, fa = build_basemap(matrix, registry, 0.15, len(args.blocks), LayoutConfig(seed=args.seed))
    t1 = time.perf_counter()
    counts = np.random.default_rng(args.seed).integers(0, 200, size=registry.size)
    vec = overlay_from_rows(parse_analyze_text(format_analyze(analyze_rows(registry, counts))), bm.registry)
    svg = render_svg(bm, vec)
    t2 = time.perf_counter()

    r = {int(c.get("data-id")): float(c.get("r")) for c in ET.fromstring(svg).iter("{http://www.w3.org/2000/svg}circle")}
    active = np.flatnonzero(counts > 0)
    ref = active[0]
    worst = max(abs((r[i] ** 2 / r[ref] ** 2) / (counts[i] / counts[ref]) - 1.0) for i in active)

    print(f"categories:        {bm.size}")
    print(f"edges:             {bm.network.n_edges}")
    print(f"factor sizes:      {bm.factor_sizes()}")
    print(f"layout:            {layout.reason} after {layout.steps} steps, stress {layout.final_stress:.4g}")
    print(f"basemap build:     {t1 - t0:.3f} s")
    print(f"overlay + render:  {t2 - t1:.3f} s")
    print(f"max area error:    {worst:.2e}")
    if args.svg:
        args.svg.write_text(svg, encoding="utf-8")
        print(f"wrote {args.svg}")


if __name__ == "__main__":
    main()
