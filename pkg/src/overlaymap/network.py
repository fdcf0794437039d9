"""Thresholded similarity network and its all-pairs graph distances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import SimilarityMatrix

DEFAULT_THRESHOLD = 0.15
DISCONNECTED_FACTOR = 1.5


@dataclass(frozen=True)
class SimilarityNetwork:
    """Undirected edges ``(i, j, w)`` with ``i < j`` and ``w > threshold``."""

    n_nodes: int
    edges: tuple[tuple[int, int, float], ...]
    threshold: float

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def is_empty(self) -> bool:
        return not self.edges

    def weight_matrix(self) -> np.ndarray:
        W = np.zeros((self.n_nodes, self.n_nodes))
        for i, j, w in self.edges:
            W[i, j] = W[j, i] = w
        return W


def build_network(sim: SimilarityMatrix | np.ndarray, threshold: float = DEFAULT_THRESHOLD) -> SimilarityNetwork:
    """Keep every pair with similarity strictly above ``threshold``."""
    if not 0.0 <= threshold < 1.0:
        raise ValueError(f"threshold must lie in [0, 1), got {threshold}")
    values = sim.values if isinstance(sim, SimilarityMatrix) else np.asarray(sim, dtype=float)
    S = values.shape[0]
    iu, ju = np.triu_indices(S, k=1)
    w = values[iu, ju]
    keep = w > threshold
    edges = tuple((int(i), int(j), float(x)) for i, j, x in zip(iu[keep], ju[keep], w[keep]))
    return SimilarityNetwork(S, edges, float(threshold))


def graph_distances(net: SimilarityNetwork) -> np.ndarray:
    """All-pairs shortest paths with edge length ``1 - w``.

    Pairs in different components get ``1.5 x`` the largest finite distance.
    If no positive finite distance exists (no edges, or only zero-length
    ones) the pseudo-distance is 1.5 so that disconnected nodes still repel.
    """
    S = net.n_nodes
    D = np.full((S, S), np.inf)
    np.fill_diagonal(D, 0.0)
    for i, j, w in net.edges:
        length = max(1.0 - w, 0.0)
        if length < D[i, j]:
            D[i, j] = D[j, i] = length
    # Floyd-Warshall, vectorised over the inner two loops.
    for k in range(S):
        np.minimum(D, D[:, k : k + 1] + D[k : k + 1, :], out=D)
    finite = D[np.isfinite(D)]
    longest = float(finite.max()) if finite.size else 0.0
    if longest <= 0.0:
        longest = 1.0
    D[~np.isfinite(D)] = DISCONNECTED_FACTOR * longest
    return D
