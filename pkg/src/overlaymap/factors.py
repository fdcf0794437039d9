"""Principal-component extraction with varimax rotation over a similarity matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import SimilarityMatrix


class FactorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FactorModel:
    loadings: np.ndarray  # (S, F), columns ordered by explained variance, descending
    rotated: bool
    explained_variance: np.ndarray  # (F,) column sums of squared loadings
    eigenvalues: np.ndarray  # (F,) of the unrotated components

    @property
    def n_factors(self) -> int:
        return self.loadings.shape[1]


@dataclass(frozen=True)
class FactorAssignment:
    assignment: tuple[int, ...]
    n_factors: int
    ties: tuple[int, ...] = ()  # categories whose maximum |loading| was shared

    def sizes(self) -> list[int]:
        return [self.assignment.count(f) for f in range(self.n_factors)]


def varimax(
    loadings: np.ndarray,
    normalize: bool = True,
    max_iter: int = 1000,
    tol: float = 1e-10,
) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal varimax rotation.

    Parameters
    ----------
    loadings : ndarray, shape (S, F)
    normalize : bool
        Kaiser normalisation: rows are scaled to unit communality before the
        rotation is fitted and scaled back afterwards. Zero rows are left as is.
    max_iter, tol
        Stop when the relative gain of the criterion falls below ``tol``.

    Returns
    -------
    rotated : ndarray, shape (S, F)
    rotation : ndarray, shape (F, F)
        Orthogonal matrix with ``rotated = loadings @ rotation``.
    """
    A = np.asarray(loadings, dtype=np.float64)
    S, F = A.shape
    if F < 2:
        return A.copy(), np.eye(F)
    if normalize:
        h = np.sqrt((A**2).sum(axis=1))
        scale = np.where(h > 0, h, 1.0)
        A_n = A / scale[:, None]
    else:
        scale = np.ones(S)
        A_n = A
    R = np.eye(F)
    crit = 0.0
    for _ in range(max_iter):
        B = A_n @ R
        target = B**3 - B @ np.diag((B**2).sum(axis=0)) / S
        U, s, Vt = np.linalg.svd(A_n.T @ target)
        R = U @ Vt
        new_crit = float(s.sum())
        if new_crit < crit * (1.0 + tol):
            break
        crit = new_crit
    rotated = (A_n @ R) * scale[:, None]
    return rotated, R


def factor_analysis(sim: SimilarityMatrix | np.ndarray, n_factors: int, rotate: bool = True) -> FactorModel:
    """Extract ``n_factors`` principal components of ``sim`` and varimax-rotate them.

    The similarity matrix is treated as a correlation matrix. Unrotated
    loadings are eigenvectors scaled by the square root of their eigenvalue
    (negative eigenvalues are clipped to zero). After rotation every column
    is sign-flipped so its largest-magnitude entry is positive, and columns
    are sorted by explained variance.
    """
    values = sim.values if isinstance(sim, SimilarityMatrix) else np.asarray(sim, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise FactorError(f"similarity matrix must be square, got {values.shape}")
    S = values.shape[0]
    if not 1 <= n_factors <= S:
        raise FactorError(f"number of factors must be in 1..{S}, got {n_factors}")
    if np.max(np.abs(values - values.T), initial=0.0) > 1e-10:
        raise FactorError("similarity matrix is not symmetric")

    evals, evecs = np.linalg.eigh((values + values.T) / 2.0)
    order = np.argsort(-evals, kind="stable")[:n_factors]
    lam = np.clip(evals[order], 0.0, None)
    loadings = evecs[:, order] * np.sqrt(lam)[None, :]
    if rotate and n_factors > 1:
        loadings, _ = varimax(loadings)

    for f in range(n_factors):
        col = loadings[:, f]
        if col.size and col[np.argmax(np.abs(col))] < 0:
            loadings[:, f] = -col
    explained = (loadings**2).sum(axis=0)
    col_order = np.argsort(-explained, kind="stable")
    return FactorModel(
        loadings=loadings[:, col_order],
        rotated=bool(rotate and n_factors > 1),
        explained_variance=explained[col_order],
        eigenvalues=lam,
    )


def assign_factors(model: FactorModel | np.ndarray, tie_tol: float = 1e-12) -> FactorAssignment:
    """Assign each category to the factor of its largest absolute loading.

    Ties (within ``tie_tol``) go to the lowest factor index and are reported.
    """
    L = model.loadings if isinstance(model, FactorModel) else np.asarray(model, dtype=np.float64)
    absL = np.abs(L)
    best = absL.max(axis=1, initial=0.0)
    near = absL >= (best[:, None] - tie_tol)
    assignment = tuple(int(np.argmax(row)) for row in near)
    ties = tuple(int(i) for i in np.flatnonzero(near.sum(axis=1) > 1))
    return FactorAssignment(assignment, L.shape[1], ties)
