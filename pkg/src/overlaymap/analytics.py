"""Analytics on overlay vectors: normalisation, sample-size reliability,
growth rates and portfolio diversity."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.stats import norm

from .ingest import OverlayVector
from .matrix import SimilarityMatrix

NORMALIZE_MODES = ("raw", "by_total", "by_category")


def normalize_overlay(
    vec: OverlayVector, mode: str = "raw", world: OverlayVector | None = None
) -> OverlayVector:
    """Rescale overlay counts.

    ``by_total`` turns counts into shares of the set; ``by_category`` divides
    each count by the world count of that category, which the caller must
    supply (there is no built-in notion of category size).
    """
    if mode == "raw":
        return vec
    if mode == "by_total":
        total = float(vec.counts.sum())
        if total <= 0:
            raise ValueError("cannot normalise an all-zero overlay by its total")
        return replace(vec, counts=vec.counts / total, unmatched=list(vec.unmatched))
    if mode == "by_category":
        if world is None:
            raise ValueError("by_category normalisation needs a world vector")
        w = np.asarray(world.counts, dtype=np.float64)
        if w.shape != vec.counts.shape:
            raise ValueError(f"world vector has {w.size} categories, overlay {vec.size}")
        bad = np.flatnonzero((vec.counts > 0) & (w <= 0))
        if bad.size:
            raise ValueError(f"world count is zero for active categories {bad.tolist()}")
        out = np.zeros_like(vec.counts)
        active = w > 0
        out[active] = vec.counts[active] / w[active]
        return replace(vec, counts=out, unmatched=list(vec.unmatched))
    raise ValueError(f"unknown normalisation mode {mode!r}; expected one of {NORMALIZE_MODES}")


# -- reliability -----------------------------------------------------------


@dataclass(frozen=True)
class ReliabilityParams:
    p: float  # probability a paper is assigned to its correct category
    m: float  # lowest acceptable share in that category
    sigma: float  # one-sided significance level

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if not 0.0 < self.m < self.p:
            raise ValueError(f"m must lie in (0, p), got m={self.m}, p={self.p}")
        if not 0.0 < self.sigma < 0.5:
            raise ValueError(f"sigma must lie in (0, 0.5), got {self.sigma}")

    @property
    def z(self) -> float:
        return float(norm.ppf(1.0 - self.sigma))


@dataclass(frozen=True)
class SampleSize:
    n: int
    unrounded: float
    z: float
    normal_approx_ok: bool


def check_normal_approx(n: float, p: float) -> bool:
    """Normal approximation to the binomial is usable iff N >= 50 and Np(1-p) >= 9."""
    return bool(n >= 50 and n * p * (1.0 - p) >= 9)


def min_sample_size(p: float, m: float, sigma: float, conservative: bool = False) -> SampleSize:
    """Smallest N with ``N >= (z / (p - m))**2 * p * (1 - p)``.

    Rounds to nearest (ties up), which matches the published table; with
    ``conservative=True`` the bound is rounded up instead.
    """
    params = ReliabilityParams(p, m, sigma)
    z = params.z
    raw = (z / (p - m)) ** 2 * p * (1.0 - p)
    n = math.ceil(raw) if conservative else math.floor(raw + 0.5)
    return SampleSize(n=int(n), unrounded=raw, z=z, normal_approx_ok=check_normal_approx(n, p))


def reliability_zscore(n: float, p: float, m: float) -> float:
    return n * (p - m) / math.sqrt(n * p * (1.0 - p))


# -- growth ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GrowthVector:
    values: np.ndarray  # average annual growth; NaN where undefined
    first_year: int
    last_year: int

    @property
    def defined(self) -> np.ndarray:
        return ~np.isnan(self.values)


def growth_rates(series: Sequence[OverlayVector]) -> GrowthVector:
    """Average of year-over-year relative growth ``n[t+1] / n[t] - 1``.

    Only pairs with ``n[t] > 0`` contribute; a category with no such pair is
    undefined (NaN). Consecutive vectors are treated as consecutive years;
    gaps are not annualised.
    """
    if len(series) < 2:
        raise ValueError("growth needs at least two overlay vectors")
    years = [v.year for v in series]
    if any(y is None for y in years):
        raise ValueError("every overlay in a growth series needs a year")
    if any(b <= a for a, b in zip(years, years[1:])):
        raise ValueError(f"years must be strictly increasing, got {years}")
    sizes = {v.size for v in series}
    if len(sizes) != 1:
        raise ValueError("overlay vectors in a series must share one registry")
    C = np.vstack([v.counts for v in series])
    base, nxt = C[:-1], C[1:]
    valid = base > 0
    g = np.where(valid, nxt / np.where(valid, base, 1.0) - 1.0, 0.0)
    n_valid = valid.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        avg = np.where(n_valid > 0, g.sum(axis=0) / np.maximum(n_valid, 1), np.nan)
    return GrowthVector(avg, int(years[0]), int(years[-1]))


# -- diversity ---------------------------------------------------------------


@dataclass(frozen=True)
class DiversityReport:
    variety: int
    balance: float
    disparity: float
    rao_stirling: float

    CONVENTION = (
        "Rao-Stirling = sum over unordered pairs i<j of p_i p_j d_ij, d = 1 - cosine; "
        "balance = Shannon entropy / ln(variety); disparity = mean d over active pairs"
    )


def distance_matrix(sim: SimilarityMatrix | np.ndarray) -> np.ndarray:
    values = sim.values if isinstance(sim, SimilarityMatrix) else np.asarray(sim, dtype=np.float64)
    d = np.clip(1.0 - values, 0.0, 1.0)
    np.fill_diagonal(d, 0.0)
    return d


def rao_stirling(p: np.ndarray, d: np.ndarray) -> float:
    """Closed form of ``sum_{i<j} p_i p_j d_ij`` (zero diagonal assumed)."""
    return float(0.5 * (p @ d @ p))


def diversity(vec: OverlayVector | np.ndarray, sim: SimilarityMatrix | np.ndarray) -> DiversityReport:
    counts = vec.counts if isinstance(vec, OverlayVector) else np.asarray(vec, dtype=np.float64)
    d = distance_matrix(sim)
    if d.shape != (counts.size, counts.size):
        raise ValueError(f"overlay has {counts.size} categories, similarity matrix {d.shape}")
    total = float(counts.sum())
    if total <= 0:
        raise ValueError("diversity of an empty overlay is undefined")
    active = np.flatnonzero(counts > 0)
    V = int(active.size)
    if V <= 1:
        return DiversityReport(V, 1.0, 0.0, 0.0)
    p = counts / total
    pa = p[active]
    c = counts[active]
    if np.all(c == c[0]):
        balance = 1.0
    else:
        balance = float(np.clip(-np.sum(pa * np.log(pa)) / math.log(V), 0.0, 1.0))
    sub = d[np.ix_(active, active)]
    iu = np.triu_indices(V, k=1)
    disparity = float(sub[iu].mean())
    rs = rao_stirling(pa, sub)
    return DiversityReport(V, balance, disparity, rs)
