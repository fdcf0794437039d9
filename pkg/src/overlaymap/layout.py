"""Kamada-Kawai spring layout of a similarity network.

Target distance between nodes ``i`` and ``j`` is ``l_ij = L * d_ij`` where
``d`` is the graph distance; the spring constant is ``k_ij = K / d_ij**2``.
The energy minimised is::

    E = 1/2 * sum_{i<j} k_ij * (|p_i - p_j| - l_ij)**2

The optimiser repeatedly moves the node with the largest gradient norm by a
damped Newton step on that node alone. A step is accepted only if it lowers
the energy, so the recorded stress never increases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import SimilarityNetwork, graph_distances


@dataclass(frozen=True)
class LayoutConfig:
    length_scale: float = 1.0  # L
    spring_constant: float = 1.0  # K
    max_steps: int = 100_000  # node-steps
    tol: float = 1e-4  # on the largest per-node gradient norm
    seed: int = 0
    jitter: float = 0.05  # initial perturbation, relative to the circle radius
    # Floor on d_ij for distinct nodes, as a fraction of the largest distance;
    # keeps k_ij finite for zero-length (identical-profile) edges.
    min_distance: float = 1e-2
    max_halvings: int = 40
    refresh_every: int = 1000

    def __post_init__(self) -> None:
        if self.length_scale <= 0:
            raise ValueError("length_scale must be > 0")
        if self.spring_constant <= 0:
            raise ValueError("spring_constant must be > 0")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")


@dataclass(frozen=True, eq=False)
class Layout:
    coordinates: np.ndarray  # (S, 2), rescaled into the unit box centred at 0
    config: LayoutConfig
    final_stress: float  # in optimiser units, before rescaling
    initial_stress: float
    steps: int
    reason: str  # "tolerance", "iteration_cap", "stalled" or "trivial"
    stress_trace: tuple[float, ...] = field(default=())


def spring_parameters(distances: np.ndarray, config: LayoutConfig) -> tuple[np.ndarray, np.ndarray]:
    """Target lengths ``l`` and spring constants ``k`` (zero on the diagonal)."""
    d = np.array(distances, dtype=np.float64)
    S = d.shape[0]
    off = ~np.eye(S, dtype=bool)
    if S > 1:
        floor = config.min_distance * float(d[off].max())
        if floor <= 0:
            floor = config.min_distance
        d[off] = np.maximum(d[off], floor)
    lengths = config.length_scale * d
    k = np.zeros_like(d)
    k[off] = config.spring_constant / d[off] ** 2
    return lengths, k


def _stress(coords: np.ndarray, lengths: np.ndarray, k: np.ndarray) -> float:
    diff = coords[:, None, :] - coords[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    iu = np.triu_indices(coords.shape[0], k=1)
    return float(0.5 * np.sum(k[iu] * (dist[iu] - lengths[iu]) ** 2))


def _gradient(coords: np.ndarray, lengths: np.ndarray, k: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    np.fill_diagonal(dist, 1.0)
    coef = k * (1.0 - lengths / np.maximum(dist, 1e-300))
    np.fill_diagonal(coef, 0.0)
    return np.einsum("ij,ijd->id", coef, diff)


def layout_stress(coords: np.ndarray, config: LayoutConfig, distances: np.ndarray) -> float:
    """Kamada-Kawai energy of ``coords`` for the given graph distances."""
    lengths, k = spring_parameters(distances, config)
    return _stress(np.asarray(coords, dtype=np.float64), lengths, k)


def stress_gradient(coords: np.ndarray, config: LayoutConfig, distances: np.ndarray) -> np.ndarray:
    """Analytic gradient of :func:`layout_stress`, shape ``(S, 2)``."""
    lengths, k = spring_parameters(distances, config)
    return _gradient(np.asarray(coords, dtype=np.float64), lengths, k)


def initial_layout(n: int, config: LayoutConfig, distances: np.ndarray) -> np.ndarray:
    """Seeded circle: radius half the largest target length, plus Gaussian jitter."""
    if n <= 1:
        return np.zeros((n, 2))
    lengths, _ = spring_parameters(distances, config)
    radius = 0.5 * float(lengths.max())
    angle = 2.0 * np.pi * np.arange(n) / n
    pos = radius * np.column_stack([np.cos(angle), np.sin(angle)])
    rng = np.random.default_rng(config.seed)
    pos += config.jitter * radius * rng.standard_normal((n, 2))
    return pos


def _pair_terms(p: np.ndarray, others: np.ndarray):
    diff = p[None, :] - others
    dist = np.sqrt((diff**2).sum(axis=1))
    return diff, dist


def _local_energy(p, others, lengths, k) -> float:
    _, dist = _pair_terms(p, others)
    return float(0.5 * np.sum(k * (dist - lengths) ** 2))


def _newton_direction(p, others, lengths, k, grad) -> np.ndarray | None:
    diff, dist = _pair_terms(p, others)
    dist = np.maximum(dist, 1e-300)
    dx, dy = diff[:, 0], diff[:, 1]
    inv3 = lengths / dist**3
    hxx = float(np.sum(k * (1.0 - inv3 * dy * dy)))
    hyy = float(np.sum(k * (1.0 - inv3 * dx * dx)))
    hxy = float(np.sum(k * inv3 * dx * dy))
    det = hxx * hyy - hxy * hxy
    if hxx <= 0 or det <= 0:
        return None
    return -np.array([hyy * grad[0] - hxy * grad[1], hxx * grad[1] - hxy * grad[0]]) / det


def _rescale_unit_box(coords: np.ndarray) -> np.ndarray:
    if coords.shape[0] == 0:
        return coords.copy()
    lo, hi = coords.min(axis=0), coords.max(axis=0)
    extent = float((hi - lo).max())
    centred = coords - (lo + hi) / 2.0
    if extent <= 0:
        return np.zeros_like(coords)
    return centred / extent


def optimize_layout(
    coords: np.ndarray,
    lengths: np.ndarray,
    k: np.ndarray,
    config: LayoutConfig,
    trace: bool = False,
) -> tuple[np.ndarray, int, str, list[float]]:
    """Run node-wise damped Newton steps in place on a copy of ``coords``."""
    pos = np.array(coords, dtype=np.float64)
    S = pos.shape[0]
    history: list[float] = []
    if S <= 1:
        return pos, 0, "trivial", history
    idx = np.arange(S)
    grad = _gradient(pos, lengths, k)
    steps = 0
    reason = "iteration_cap"
    while True:
        norms = np.sqrt((grad**2).sum(axis=1))
        m = int(np.argmax(norms))
        if norms[m] < config.tol:
            grad = _gradient(pos, lengths, k)
            norms = np.sqrt((grad**2).sum(axis=1))
            m = int(np.argmax(norms))
            if norms[m] < config.tol:
                reason = "tolerance"
                break
        if steps >= config.max_steps:
            break

        mask = idx != m
        others, l_m, k_m = pos[mask], lengths[m, mask], k[m, mask]
        old = pos[m].copy()
        e_old = _local_energy(old, others, l_m, k_m)
        g = grad[m]
        accepted = None
        directions = []
        newton = _newton_direction(old, others, l_m, k_m, g)
        if newton is not None:
            directions.append(newton)
        directions.append(-g / float(k_m.sum()))
        for direction in directions:
            alpha = 1.0
            for _ in range(config.max_halvings):
                cand = old + alpha * direction
                if _local_energy(cand, others, l_m, k_m) < e_old:
                    accepted = cand
                    break
                alpha *= 0.5
            if accepted is not None:
                break
        if accepted is None:
            reason = "stalled"
            break

        # incremental gradient update for the moved node's partners
        def pair_force(p):
            diff = others - p[None, :]
            dist = np.maximum(np.sqrt((diff**2).sum(axis=1)), 1e-300)
            return (k_m * (1.0 - l_m / dist))[:, None] * diff

        grad[mask] += pair_force(accepted) - pair_force(old)
        pos[m] = accepted
        diff = accepted[None, :] - others
        dist = np.maximum(np.sqrt((diff**2).sum(axis=1)), 1e-300)
        grad[m] = ((k_m * (1.0 - l_m / dist))[:, None] * diff).sum(axis=0)
        steps += 1
        if steps % config.refresh_every == 0:
            grad = _gradient(pos, lengths, k)
        if trace:
            history.append(_stress(pos, lengths, k))
    return pos, steps, reason, history


def kamada_kawai(
    net: SimilarityNetwork,
    config: LayoutConfig | None = None,
    distances: np.ndarray | None = None,
    trace: bool = False,
) -> Layout:
    """Lay out ``net`` in the plane.

    Deterministic for a given ``config.seed``. The returned coordinates are
    rescaled into the unit box centred at the origin; ``final_stress`` and
    ``initial_stress`` are measured before rescaling. With ``trace=True`` the
    full stress after every accepted step is recorded (quadratic cost per
    step, meant for diagnostics).
    """
    config = config or LayoutConfig()
    S = net.n_nodes
    if S < 1:
        raise ValueError("cannot lay out an empty network")
    if distances is None:
        distances = graph_distances(net)
    lengths, k = spring_parameters(distances, config)
    start = initial_layout(S, config, distances)
    e0 = _stress(start, lengths, k)
    pos, steps, reason, history = optimize_layout(start, lengths, k, config, trace=trace)
    e1 = _stress(pos, lengths, k)
    return Layout(
        coordinates=_rescale_unit_box(pos),
        config=config,
        final_stress=e1,
        initial_stress=e0,
        steps=steps,
        reason=reason,
        stress_trace=tuple(history),
    )
