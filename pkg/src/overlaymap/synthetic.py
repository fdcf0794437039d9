"""Synthetic inputs for demos and tests (the real JCR matrix is proprietary)."""

from __future__ import annotations

import numpy as np

from .ingest import AnalyzeRow, DocumentRecord
from .matrix import CitationMatrix
from .registry import CategoryRegistry, SubjectCategory

BLOCK_THEMES = ("BIOLOGY", "PHYSICS", "SOCIOLOGY", "CHEMISTRY", "ENGINEERING", "MEDICINE")


def block_registry(block_sizes: list[int]) -> CategoryRegistry:
    cats = []
    for b, size in enumerate(block_sizes):
        theme = BLOCK_THEMES[b % len(BLOCK_THEMES)]
        for k in range(size):
            cid = len(cats)
            suffix = "" if b < len(BLOCK_THEMES) else f" {b // len(BLOCK_THEMES) + 1}"
            name = f"{theme}{suffix}, AREA {k + 1}"
            alias = (f"{theme.title()}{suffix} {k + 1}",) if k == 0 else ()
            cats.append(SubjectCategory(cid, name, alias))
    return CategoryRegistry(tuple(cats))


def block_citation_matrix(
    block_sizes: list[int],
    seed: int = 0,
    within: float = 400.0,
    across: float = 8.0,
    self_cite: float = 1500.0,
) -> CitationMatrix:
    """Poisson counts with heavy within-block citing and a few cross-block bridges."""
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(len(block_sizes)), block_sizes)
    S = labels.size
    same = labels[:, None] == labels[None, :]
    # heterogeneous profiles inside a block so the layout is not degenerate
    affinity = rng.gamma(2.0, 0.5, size=(S, S))
    rate = np.where(same, within * affinity, across * affinity)
    # bridge: the last category of each block also cites the next block heavily
    starts = np.cumsum([0] + list(block_sizes))
    for b in range(len(block_sizes) - 1):
        bridge = starts[b + 1] - 1
        rate[bridge, starts[b + 1] : starts[b + 2]] = 0.6 * within * affinity[bridge, starts[b + 1] : starts[b + 2]]
    np.fill_diagonal(rate, self_cite)
    return CitationMatrix(rng.poisson(rate).astype(np.int64))


def block_similarity(block_sizes: list[int], rng: np.random.Generator, within: float = 0.9,
                     noise: float = 0.05, cross: float = 0.05) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric block-structured similarity matrix with unit diagonal, and its labels."""
    labels = np.repeat(np.arange(len(block_sizes)), block_sizes)
    S = labels.size
    same = labels[:, None] == labels[None, :]
    noise_m = rng.uniform(0.0, noise, size=(S, S))
    cross_m = rng.uniform(0.0, cross, size=(S, S))
    sim = np.where(same, within + noise_m, cross_m)
    sim = np.triu(sim, 1)
    sim = sim + sim.T
    np.fill_diagonal(sim, 1.0)
    return np.clip(sim, 0.0, 1.0), labels


def analyze_rows(registry: CategoryRegistry, counts: np.ndarray) -> list[AnalyzeRow]:
    total = float(counts.sum()) or 1.0
    return [
        AnalyzeRow(registry.categories[i].name, int(c), round(100.0 * c / total, 4))
        for i, c in enumerate(counts)
        if c > 0
    ]


def format_analyze(rows: list[AnalyzeRow], total_records: int | None = None) -> str:
    """Render rows in the tab-separated Analyze.txt layout."""
    total = total_records if total_records is not None else sum(r.record_count for r in rows)
    out = [f"Field: Subject Area\tRecord Count\t% of {total}\tBar Chart"]
    for r in sorted(rows, key=lambda r: (-r.record_count, r.category_name)):
        pct = "" if r.percent is None else f"{r.percent:.4f} %"
        out.append(f"{r.category_name}\t{r.record_count}\t{pct}\t")
    out.append("")
    out.append(f"({len(rows)} Subject Area value(s) shown)")
    return "\n".join(out) + "\n"


def random_records(
    registry: CategoryRegistry,
    n_records: int,
    rng: np.random.Generator,
    max_categories: int = 3,
    unknown_rate: float = 0.0,
) -> list[DocumentRecord]:
    out = []
    for r in range(n_records):
        k = int(rng.integers(1, max_categories + 1))
        ids = rng.choice(registry.size, size=min(k, registry.size), replace=False)
        names = [registry.categories[int(i)].name.title() for i in ids]
        if unknown_rate and rng.random() < unknown_rate:
            names.append("UNLISTED FIELD")
        out.append(
            DocumentRecord(
                {
                    "PT": ["J"],
                    "TI": [f"Synthetic record {r + 1}"],
                    "SC": ["; ".join(names)],
                }
            )
        )
    return out
