"""Exact stretch factor of an embedded graph.

The stretch factor is ``max d_G(u, v) / d(u, v)`` over unordered pairs of
distinct vertices, where ``d_G`` is the shortest-path distance with
Euclidean edge weights and ``d`` the straight-line distance.  It is
undefined when the graph is disconnected.

Shortest paths come from the compiled kernels when available (see
``_backend``).  :func:`oracle_stretch` is an independent Floyd-Warshall
implementation used only for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ._backend import kernels
from .errors import InvalidInputError, StretchLabError
from .geom import pairwise_euclid
from .model import EmbeddedGraph

UNDEFINED = "undefined-disconnected"


@dataclass(frozen=True)
class DistanceMatrix:
    n: int
    dist: np.ndarray

    def __getitem__(self, ij):
        return self.dist[ij]


@dataclass(frozen=True)
class StretchReport:
    """Stretch factor of one instance.

    ``value`` is ``None`` when the graph is disconnected; ``pair`` is the
    maximising pair ``(i, j)`` with ``i < j`` (ties broken lexicographically).
    """

    value: float | None
    pair: tuple[int, int] | None = None
    d_graph: float | None = None
    d_euclid: float | None = None

    @property
    def defined(self) -> bool:
        return self.value is not None

    @property
    def marker(self) -> str | float:
        return self.value if self.defined else UNDEFINED

    def to_dict(self) -> dict:
        return {
            "stretch": self.value,
            "defined": self.defined,
            "pair": list(self.pair) if self.pair is not None else None,
            "d_graph": self.d_graph,
            "d_euclid": self.d_euclid,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "StretchReport":
        if not doc["defined"]:
            return cls(None)
        return cls(doc["stretch"], tuple(doc["pair"]), doc["d_graph"], doc["d_euclid"])


def _adj_u8(g: EmbeddedGraph) -> np.ndarray:
    return np.ascontiguousarray(g.adjacency, dtype=np.uint8)


def _csr(g: EmbeddedGraph):
    m = csr_matrix(g.adjacency)
    return m.indptr.astype(np.intc), m.indices.astype(np.intc)


def use_dense(g: EmbeddedGraph) -> bool:
    """Array-scan Dijkstra once the mean degree reaches n/8, binary heap below."""
    n = g.n
    return 2 * g.edge_count() >= n * n / 8.0


def is_connected(g: EmbeddedGraph) -> bool:
    if g.n <= 1:
        return True
    ncomp, _ = connected_components(csr_matrix(g.adjacency), directed=False)
    return ncomp == 1


def sssp(g: EmbeddedGraph, source: int, dense: bool | None = None) -> np.ndarray:
    """Shortest-path lengths from ``source``; ``inf`` for other components."""
    if not 0 <= source < g.n:
        raise InvalidInputError(f"source {source} out of range for n={g.n}")
    dmat = pairwise_euclid(g.points)
    if dense is None:
        dense = use_dense(g)
    if dense:
        return kernels.sssp_dense(dmat, _adj_u8(g), int(source))
    indptr, indices = _csr(g)
    return kernels.sssp_heap(dmat, indptr, indices, int(source))


def apsp(g: EmbeddedGraph, dense: bool | None = None) -> DistanceMatrix:
    n = g.n
    dmat = pairwise_euclid(g.points)
    if dense is None:
        dense = use_dense(g)
    out = np.empty((n, n))
    if dense:
        adj = _adj_u8(g)
        for s in range(n):
            out[s] = kernels.sssp_dense(dmat, adj, s)
    else:
        indptr, indices = _csr(g)
        for s in range(n):
            out[s] = kernels.sssp_heap(dmat, indptr, indices, s)
    # both directions are computed independently; keep the matrix exactly symmetric
    out = np.minimum(out, out.T)
    out.flags.writeable = False
    return DistanceMatrix(n, out)


def stretch_factor(g: EmbeddedGraph, dense: bool | None = None) -> StretchReport:
    n = g.n
    if n < 2:
        raise InvalidInputError("stretch factor needs at least two vertices")
    if not is_connected(g):
        return StretchReport(None)
    dmat = pairwise_euclid(g.points)
    if np.count_nonzero(dmat == 0.0) > n:
        raise StretchLabError("coincident points for distinct vertices")
    if dense is None:
        dense = use_dense(g)
    adj = _adj_u8(g)
    if dense:
        ratio, i, j, dg, de = kernels.max_stretch(dmat, adj, dense=True)
    else:
        indptr, indices = _csr(g)
        ratio, i, j, dg, de = kernels.max_stretch(dmat, adj, indptr, indices, dense=False)
    if i < 0:
        # every pair adjacent (or only float-level ties below 1): ratio is exactly 1
        ai, aj = np.nonzero(np.triu(g.adjacency, 1))
        i, j = int(ai[0]), int(aj[0])
        return StretchReport(1.0, (i, j), float(dmat[i, j]), float(dmat[i, j]))
    return StretchReport(float(ratio), (int(i), int(j)), float(dg), float(de))


def oracle_stretch(g: EmbeddedGraph) -> StretchReport:
    """Floyd-Warshall reference for :func:`stretch_factor`.

    Shares no shortest-path code with the kernels: distances are built with
    ``math.hypot`` and relaxed with the textbook triple loop (vectorised over
    the inner two indices).
    """
    n = g.n
    if n < 2:
        raise InvalidInputError("stretch factor needs at least two vertices")
    pts = g.points
    euc = np.array([[math.hypot(pts[i, 0] - pts[j, 0], pts[i, 1] - pts[j, 1]) for j in range(n)] for i in range(n)])
    dist = np.where(g.adjacency, euc, np.inf)
    np.fill_diagonal(dist, 0.0)
    for k in range(n):
        dist = np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :])
    iu, ju = np.triu_indices(n, 1)
    dg = dist[iu, ju]
    if np.isinf(dg).any():
        return StretchReport(None)
    de = euc[iu, ju]
    ratio = dg / de
    k = int(np.argmax(ratio))  # first maximum = lexicographically smallest pair
    return StretchReport(float(ratio[k]), (int(iu[k]), int(ju[k])), float(dg[k]), float(de[k]))


def bad_pairs(g: EmbeddedGraph, lam: float, dm: DistanceMatrix) -> list[tuple[int, int]]:
    """Pairs with ``d_G(u, v) > (2*lam + 1) * d(u, v)``, lexicographically sorted."""
    if not lam > 0:
        raise InvalidInputError("lambda must be positive")
    euc = pairwise_euclid(g.points)
    iu, ju = np.triu_indices(g.n, 1)
    bad = dm.dist[iu, ju] > (2.0 * lam + 1.0) * euc[iu, ju]
    return list(zip(iu[bad].tolist(), ju[bad].tolist()))


def common_neighbours(g: EmbeddedGraph, u: int, v: int) -> int:
    if u == v:
        raise InvalidInputError("common_neighbours needs two distinct vertices")
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise InvalidInputError("vertex out of range")
    return int(np.count_nonzero(g.adjacency[u] & g.adjacency[v]))
