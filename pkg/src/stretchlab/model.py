"""Randomly embedded Erdos-Renyi graphs.

``n`` points are drawn uniformly from the unit square and every one of the
``n(n-1)/2`` pairs is joined independently with probability ``p``; the
weight of an edge is the Euclidean length of the segment, derived on demand
from the points and never stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import rng as _rng
from .errors import InvalidInputError
from .geom import euclid


@dataclass(frozen=True)
class ModelParams:
    n: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInputError(f"n must be a positive integer, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidInputError(f"p must lie in [0, 1], got {self.p}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


class EmbeddedGraph:
    """An immutable embedded graph.

    ``points`` is an ``(n, 2)`` float array and ``adjacency`` a symmetric,
    irreflexive ``(n, n)`` boolean matrix.  Both are stored read-only.
    """

    __slots__ = ("params", "points", "adjacency")

    def __init__(self, params: ModelParams, points, adjacency):
        pts = np.array(points, dtype=np.float64, copy=True).reshape(-1, 2)
        adj = np.array(adjacency, dtype=bool, copy=True)
        n = params.n
        if pts.shape != (n, 2):
            raise InvalidInputError(f"expected {n} points, got {pts.shape[0]}")
        if adj.shape != (n, n):
            raise InvalidInputError(f"adjacency must be {n}x{n}, got {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise InvalidInputError("adjacency is not symmetric")
        if adj.diagonal().any():
            raise InvalidInputError("adjacency has self-loops")
        pts.flags.writeable = False
        adj.flags.writeable = False
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "adjacency", adj)

    def __setattr__(self, name, value):
        raise AttributeError("EmbeddedGraph is immutable")

    @property
    def n(self) -> int:
        return self.params.n

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.adjacency[i, j])

    def neighbours(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[i])

    def edge_count(self) -> int:
        return int(np.count_nonzero(self.adjacency)) // 2

    def edges(self) -> np.ndarray:
        """Edge list as a ``(m, 2)`` array with ``i < j``, lexicographically sorted."""
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return np.stack([i, j], axis=1)

    def with_edges(self, extra) -> "EmbeddedGraph":
        """Copy of this graph with the given ``(i, j)`` pairs added as edges."""
        adj = self.adjacency.copy()
        for i, j in extra:
            if i == j:
                raise InvalidInputError("self-loop requested")
            adj[i, j] = adj[j, i] = True
        return EmbeddedGraph(self.params, self.points, adj)

    def __eq__(self, other):
        if not isinstance(other, EmbeddedGraph):
            return NotImplemented
        return (
            self.params == other.params
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.adjacency, other.adjacency)
        )

    def __repr__(self):
        return f"EmbeddedGraph(n={self.n}, p={self.params.p}, seed={self.params.seed}, edges={self.edge_count()})"

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.params.p,
            "seed": int(self.params.seed),
            "points": self.points.tolist(),
            "edges": self.edges().tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "EmbeddedGraph":
        try:
            params = ModelParams(int(doc["n"]), float(doc["p"]), int(doc.get("seed", 0)))
            n = params.n
            adj = np.zeros((n, n), dtype=bool)
            for i, j in doc["edges"]:
                if not (0 <= i < n and 0 <= j < n) or i == j:
                    raise InvalidInputError(f"bad edge ({i}, {j})")
                adj[i, j] = adj[j, i] = True
            return cls(params, doc["points"], adj)
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed graph document: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "EmbeddedGraph":
        return cls.from_dict(json.loads(text))


def sample_embedding(n: int, seed: int) -> np.ndarray:
    """The ``n`` points of the model for ``seed``, with coincident points resampled."""
    pts = _rng.stream(seed, _rng.POINTS).random((n, 2))
    return resample_coincident(pts, seed)


def resample_coincident(pts: np.ndarray, seed: int) -> np.ndarray:
    # A later point equal to an earlier one is redrawn from its own stream
    # (RESAMPLE, index).  Probability zero, but it keeps every ratio finite.
    streams = {}
    while True:
        _, first = np.unique(pts, axis=0, return_index=True)
        if len(first) == len(pts):
            return pts
        for i in np.setdiff1d(np.arange(len(pts)), first):
            i = int(i)
            if i not in streams:
                streams[i] = _rng.stream(seed, _rng.RESAMPLE, i)
            pts[i] = streams[i].random(2)


def sample_adjacency(n: int, p: float, seed: int) -> np.ndarray:
    """Bernoulli(p) coin per pair, drawn in lexicographic (i < j) pair order."""
    adj = np.zeros((n, n), dtype=bool)
    if n < 2:
        return adj
    iu, ju = np.triu_indices(n, 1)
    coins = _rng.stream(seed, _rng.EDGES).random(iu.size) < p
    adj[iu, ju] = coins
    adj[ju, iu] = coins
    return adj


def generate(params: ModelParams) -> EmbeddedGraph:
    """Draw one randomly embedded random graph; deterministic in ``params``."""
    pts = sample_embedding(params.n, params.seed)
    adj = sample_adjacency(params.n, params.p, params.seed)
    return EmbeddedGraph(params, pts, adj)


def edge_weight(g: EmbeddedGraph, i: int, j: int) -> float:
    if not (0 <= i < g.n and 0 <= j < g.n):
        raise InvalidInputError(f"vertex out of range: ({i}, {j})")
    if i == j:
        raise InvalidInputError("no self-loops")
    if not g.adjacency[i, j]:
        raise InvalidInputError(f"({i}, {j}) is not an edge")
    return euclid(g.points[i], g.points[j])


def load_graph(path) -> EmbeddedGraph:
    return EmbeddedGraph.from_json(Path(path).read_text())


def save_graph(g: EmbeddedGraph, path) -> None:
    Path(path).write_text(g.to_json() + "\n")
