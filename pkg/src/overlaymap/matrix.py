"""Citing-to-cited category citation matrices and their citing-direction cosine.

Matrix file grammar::

    # optional comment lines
    <name_0> TAB <name_1> TAB ... TAB <name_{S-1}>
    <c_00>   TAB <c_01>   TAB ...
    ...                                   (S rows of S nonnegative integers)

Row ``i`` holds the citations *from* category ``i``; column order equals
row order. Header names are resolved against a registry and the matrix is
permuted into registry id order.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .registry import CategoryRegistry

logger = logging.getLogger(__name__)


class MatrixError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CitationMatrix:
    counts: np.ndarray  # (S, S) int64, row = citing, column = cited

    def __post_init__(self) -> None:
        c = np.asarray(self.counts)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise MatrixError(f"citation matrix is non-square: shape {c.shape}")
        if not np.issubdtype(c.dtype, np.integer):
            if not np.all(np.isfinite(c)) or np.any(c != np.round(c)):
                raise MatrixError("citation matrix has non-integer entries")
            c = c.astype(np.int64)
        if np.any(c < 0):
            raise MatrixError("citation matrix has negative entries")
        c = np.array(c, dtype=np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def size(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(str(self.size).encode())
        h.update(self.counts.astype("<i8").tobytes())
        return "sha256:" + h.hexdigest()


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    values: np.ndarray  # (S, S) float64, symmetric, in [0, 1]
    include_diagonal: bool = True
    zero_rows: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.values - self.values.T), initial=0.0) <= tol)


def parse_citation_matrix(text: str, registry: CategoryRegistry) -> CitationMatrix:
    lines = [(n, ln) for n, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    while lines and lines[0][1].lstrip().startswith("#"):
        lines.pop(0)
    if not lines:
        raise MatrixError("matrix file has no header line")
    header_no, header = lines[0]
    names = [h.strip() for h in header.split("\t")]
    S = len(names)

    ids: list[int] = []
    unresolved: list[str] = []
    for name in names:
        cid = registry.resolve(name)
        if cid is None:
            unresolved.append(name)
        else:
            ids.append(cid)
    if unresolved:
        raise MatrixError(f"unresolved category names in header: {unresolved}")
    if len(set(ids)) != len(ids):
        dup = sorted({names[k] for k, i in enumerate(ids) if ids.count(i) > 1})
        raise MatrixError(f"header names resolve to the same category: {dup}")

    rows = lines[1:]
    if len(rows) != S:
        raise MatrixError(f"non-square: header has {S} columns but {len(rows)} data rows")
    data = np.zeros((S, S), dtype=np.int64)
    for r, (lineno, line) in enumerate(rows):
        cells = line.split("\t")
        if len(cells) != S:
            raise MatrixError(f"non-square: line {lineno} has {len(cells)} values, expected {S}")
        for c, cell in enumerate(cells):
            try:
                v = int(cell.strip())
            except ValueError:
                raise MatrixError(f"line {lineno}: non-integer entry {cell.strip()!r}") from None
            if v < 0:
                raise MatrixError(f"line {lineno}: negative entry {v}")
            data[r, c] = v

    if S != registry.size:
        missing = sorted(set(range(registry.size)) - set(ids))
        raise MatrixError(
            f"matrix covers {S} categories but the registry has {registry.size}; "
            f"missing: {[registry.categories[i].name for i in missing]}"
        )
    order = np.empty(S, dtype=np.int64)
    order[np.asarray(ids)] = np.arange(S)  # registry id -> file position
    aligned = data[np.ix_(order, order)]
    matrix = CitationMatrix(aligned)
    logger.info("loaded %d x %d citation matrix, total %d citations", S, S, matrix.total)
    return matrix


def load_citation_matrix(source: str | Path, registry: CategoryRegistry) -> CitationMatrix:
    return parse_citation_matrix(Path(source).read_text(encoding="utf-8"), registry)


def dump_citation_matrix(matrix: CitationMatrix, registry: CategoryRegistry) -> str:
    out = ["\t".join(registry.names)]
    out.extend("\t".join(str(int(v)) for v in row) for row in matrix.counts)
    return "\n".join(out) + "\n"


def _gram(counts: np.ndarray) -> np.ndarray:
    """Row Gram matrix, exact in int64 when the magnitudes allow it."""
    peak = int(counts.max(initial=0))
    if peak * peak * max(counts.shape[1], 1) < 2**62:
        return (counts @ counts.T).astype(np.float64)
    return counts.astype(np.float64) @ counts.T.astype(np.float64)


def cosine_citing(matrix: CitationMatrix, include_diagonal: bool = True) -> SimilarityMatrix:
    """Salton's cosine between citing profiles (rows) of ``matrix``.

    With ``include_diagonal=False`` the two self-citation coordinates of each
    pair, columns ``i`` and ``j``, are dropped from both vectors before the
    cosine of ``(i, j)`` is taken.

    Categories that cite nothing get similarity 0 against everything,
    including themselves, and are listed in ``zero_rows``.
    """
    R = matrix.counts
    S = matrix.size
    if S == 0 or not R.any():
        raise MatrixError("citation matrix is all zeros")
    zero_rows = tuple(int(i) for i in np.flatnonzero(~R.any(axis=1)))

    if include_diagonal:
        G = _gram(R)
        n2 = np.diag(G).copy()
        dot = G
        ni2 = np.broadcast_to(n2[:, None], (S, S))
        nj2 = np.broadcast_to(n2[None, :], (S, S))
    else:
        # dot_ij - R_ii R_ji - R_ij R_jj ; |r_i|^2 - R_ii^2 - R_ij^2
        Rf = R.astype(np.float64)
        d = np.diag(Rf)
        G = _gram(R)
        n2 = np.diag(G)
        dot = G - d[:, None] * Rf.T - Rf * d[None, :]
        ni2 = n2[:, None] - d[:, None] ** 2 - Rf**2
        nj2 = ni2.T

    # the diagonal of the excluded form subtracts R_ii^2 twice; it is overwritten below
    denom = np.sqrt(np.maximum(ni2, 0.0)) * np.sqrt(np.maximum(nj2, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        sim = np.where(denom > 0, dot / np.where(denom > 0, denom, 1.0), 0.0)
    sim = np.clip(sim, 0.0, 1.0)
    upper = np.triu(sim, 1)
    sim = upper + upper.T
    nonzero = R.any(axis=1)
    np.fill_diagonal(sim, np.where(nonzero, 1.0, 0.0))
    return SimilarityMatrix(sim, include_diagonal=include_diagonal, zero_rows=zero_rows)
