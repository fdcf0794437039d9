"""Write a small synthetic dataset for trying the command line.

Produces, under ``--out`` (default ``data/demo``):

    registry.tsv        30 categories in three themed blocks
    matrix.tsv          30 x 30 citing-to-cited counts
    factor_labels.tsv   one label and colour per factor
    analyze.txt         Analyze-style tally for one document set
    records.txt         the same kind of set as tagged-field records
    years/<year>.txt    Analyze tallies for 2004-2008 with steady growth
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from overlaymap.ingest import write_tagged
from overlaymap.matrix import dump_citation_matrix
from overlaymap.registry import dump_registry
from overlaymap.synthetic import analyze_rows, block_citation_matrix, block_registry, format_analyze, random_records

BLOCKS = [10, 10, 10]
# labels attach to factors in explained-variance order, not to block order
LABELS = [("Group A", "#2ca02c"), ("Group B", "#1f77b4"), ("Group C", "#d62728")]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="data/demo")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out)
    (out / "years").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    registry = block_registry(BLOCKS)
    matrix = block_citation_matrix(BLOCKS, seed=args.seed)

    (out / "registry.tsv").write_text(dump_registry(registry), encoding="utf-8")
    (out / "matrix.tsv").write_text(dump_citation_matrix(matrix, registry), encoding="utf-8")
    (out / "factor_labels.tsv").write_text("".join(f"{a}\t{b}\n" for a, b in LABELS), encoding="utf-8")

    # an organisation concentrated in the first block with a tail elsewhere
    weights = np.r_[np.full(10, 6.0), np.full(10, 1.5), np.full(10, 0.3)]
    counts = rng.poisson(weights * 8)
    (out / "analyze.txt").write_text(format_analyze(analyze_rows(registry, counts)), encoding="utf-8")

    records = random_records(registry, 120, rng, max_categories=3, unknown_rate=0.05)
    (out / "records.txt").write_text(write_tagged(records), encoding="utf-8")

    # physical-science block doubles each year; the rest grows slowly
    base = rng.integers(5, 40, size=registry.size)
    for t, year in enumerate(range(2004, 2009)):
        factor = np.where(np.arange(registry.size) // 10 == 1, 2.0**t, 1.1**t)
        yearly = np.round(base * factor).astype(int)
        (out / "years" / f"{year}.txt").write_text(format_analyze(analyze_rows(registry, yearly)), encoding="utf-8")

    print(f"wrote demo data to {out}/ ({registry.size} categories, {matrix.total} citations)")


if __name__ == "__main__":
    main()
