"""The lower-bound construction, executable.

The first ``cn`` vertices are embedded and joined whenever they are within
``2/sqrt(n)`` of each other.  ``cn/2`` isolated ones become *primary*
vertices and the discs ``C(v, 1/sqrt(n))`` around them *primary discs*; the
remaining first-stage vertices are *far* vertices.  The other ``n(1-c)``
*secondary* vertices are then embedded in three phases:

1. each is assigned a cell of the partition {exterior, disc_1, ..., disc_m}
   with probability equal to the cell's area;
2. each is placed uniformly inside its cell;
3. every pair of vertices is joined with probability ``p``.

A primary disc holding exactly its centre ``u`` and one secondary ``v`` is
*nice* if ``d(u, v) < 1/(lam sqrt(n))`` and ``uv`` is not an edge; a nice disc
forces the stretch factor above ``lam``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng
from .bounds import C_HIGH, C_LOW
from .errors import InvalidInputError, NoValidCError, StretchLabError
from .geom import disc_square_area_many, euclid, pairwise_euclid
from .model import EmbeddedGraph, ModelParams, resample_coincident, sample_adjacency
from .stretch import is_connected, stretch_factor

MAX_REJECTIONS = 10**6
EXTERIOR = 0


def pick_c(n: int) -> float:
    """``k / n`` for the smallest even ``k`` with ``n/51 < k < n/(16 pi)``."""
    lo, hi = n * C_LOW, n * C_HIGH
    k = 2 * (math.floor(lo / 2) + 1)
    if k <= lo:  # guard against lo landing on an even integer after rounding
        k += 2
    if not k < hi:
        raise NoValidCError(n, lo, hi)
    return k / n


def resolve_c(n: int, override: float | None = None) -> tuple[float, bool]:
    """``(c, in_paper_window)``.

    Without ``override`` this is :func:`pick_c`.  An override may be any
    ``c`` in ``(0, 1/(16 pi))``; it is snapped to the nearest ``k/n`` with
    ``k >= 2`` even, and flagged as outside the admissible window when it is.
    """
    if override is None:
        return pick_c(n), True
    if not 0.0 < override < C_HIGH:
        raise InvalidInputError(f"c override must lie in (0, 1/(16 pi)), got {override}")
    k = max(2, 2 * round(override * n / 2))
    if k > n:
        raise InvalidInputError(f"c override {override} leaves no room for {k} first-stage vertices at n={n}")
    c = k / n
    return c, C_LOW < c < C_HIGH


@dataclass(frozen=True)
class ThresholdGraphStats:
    m_points: int
    radius: float
    edge_count: int
    isolated_count: int
    isolated: tuple = field(default=(), repr=False)


def threshold_graph(points, r: float, block: int = 2048) -> ThresholdGraphStats:
    """Join points at Euclidean distance ``<= r`` and count edges and isolated vertices."""
    if not r >= 0:
        raise InvalidInputError("radius must be non-negative")
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    m = len(pts)
    degree = np.zeros(m, dtype=np.int64)
    edges = 0
    for s in range(0, m, block):
        chunk = pts[s : s + block]
        close = np.hypot(chunk[:, 0][:, None] - pts[:, 0][None, :], chunk[:, 1][:, None] - pts[:, 1][None, :]) <= r
        close[np.arange(len(chunk)), np.arange(s, s + len(chunk))] = False
        degree[s : s + len(chunk)] = close.sum(axis=1)
    edges = int(degree.sum()) // 2
    isolated = np.flatnonzero(degree == 0)
    return ThresholdGraphStats(m, float(r), edges, int(isolated.size), tuple(int(i) for i in isolated))


@dataclass(frozen=True)
class ThreePhaseTrace:
    n: int
    c: float
    lam: float
    conditioning_ok: bool
    primary: tuple = ()  # A; disc d (1-based) is centred on primary[d - 1]
    far: tuple = ()
    disc_assignment: dict = field(default_factory=dict)  # secondary vertex -> disc index, 0 = exterior
    two_vertex_discs: tuple = ()
    nice_discs: tuple = ()
    paper_c: bool = True

    @property
    def m(self) -> int:
        return len(self.primary)

    @property
    def radius(self) -> float:
        return 1.0 / math.sqrt(self.n)

    @property
    def nice_radius(self) -> float:
        return 1.0 / (self.lam * math.sqrt(self.n))

    def occupants(self) -> dict:
        occ: dict = {}
        for v, d in self.disc_assignment.items():
            if d != EXTERIOR:
                occ.setdefault(d, []).append(v)
        return occ

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "c": self.c,
            "A": list(self.primary),
            "far": list(self.far),
            "disc_assignment": {str(v): d for v, d in sorted(self.disc_assignment.items())},
            "two_vertex_discs": list(self.two_vertex_discs),
            "nice_discs": list(self.nice_discs),
            "lambda": self.lam,
            "conditioning_ok": self.conditioning_ok,
            "paper_c": self.paper_c,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "ThreePhaseTrace":
        return cls(
            n=int(doc["n"]),
            c=float(doc["c"]),
            lam=float(doc["lambda"]),
            conditioning_ok=bool(doc["conditioning_ok"]),
            primary=tuple(doc["A"]),
            far=tuple(doc.get("far", ())),
            disc_assignment={int(v): int(d) for v, d in doc["disc_assignment"].items()},
            two_vertex_discs=tuple(doc["two_vertex_discs"]),
            nice_discs=tuple(doc["nice_discs"]),
            paper_c=bool(doc.get("paper_c", True)),
        )


def _place_in_disc(rng, cx, cy, r):
    x0, x1 = max(cx - r, 0.0), min(cx + r, 1.0)
    y0, y1 = max(cy - r, 0.0), min(cy + r, 1.0)
    for _ in range(MAX_REJECTIONS):
        x, y = rng.random(2)
        x = x0 + (x1 - x0) * x
        y = y0 + (y1 - y0) * y
        if euclid((x, y), (cx, cy)) <= r:
            return x, y
    raise StretchLabError("rejection sampling inside a primary disc did not terminate")


def _place_in_exterior(rng, centres, r):
    for _ in range(MAX_REJECTIONS):
        x, y = rng.random(2)
        if not np.any(np.hypot(centres[:, 0] - x, centres[:, 1] - y) <= r):
            return x, y
    raise StretchLabError("rejection sampling outside the primary discs did not terminate")


def _niceness(pts, adj, centre, occupant, nice_r) -> bool:
    return euclid(pts[occupant], pts[centre]) < nice_r and not adj[centre, occupant]


@dataclass(frozen=True)
class PhaseOne:
    """First-stage embedding plus the phase-1 cell of every secondary vertex."""

    first: np.ndarray
    primary: np.ndarray
    far: np.ndarray
    cells: np.ndarray | None  # None when the conditioning failed
    isolated_count: int

    @property
    def conditioning_ok(self) -> bool:
        return self.cells is not None

    def two_vertex_discs(self) -> list[int]:
        m = len(self.primary)
        counts = np.bincount(self.cells, minlength=m + 1)
        return [int(d) for d in range(1, m + 1) if counts[d] == 1]


def _first_stage_size(n: int, c: float) -> int:
    k = round(c * n)
    if abs(k - c * n) > 1e-9 or k % 2 or k < 2 or k > n:
        raise InvalidInputError(f"c*n = {c * n} must be an even integer in [2, n]")
    return k


def phase_one(params: ModelParams, c: float) -> PhaseOne:
    """Embed the first ``cn`` vertices, choose the primary set and run phase 1.

    Primary vertices are the first ``cn/2`` isolated vertices of the
    ``2/sqrt(n)`` threshold graph, in index order.
    """
    n, seed = params.n, params.seed
    k = _first_stage_size(n, c)
    m = k // 2
    r = 1.0 / math.sqrt(n)
    first = _rng.stream(seed, _rng.POINTS).random((k, 2))
    stats = threshold_graph(first, 2.0 * r)
    if stats.isolated_count < m:
        return PhaseOne(first, np.zeros(0, dtype=int), np.arange(k), None, stats.isolated_count)
    primary = np.array(stats.isolated[:m])
    far = np.setdiff1d(np.arange(k), primary)
    centres = first[primary]
    areas = disc_square_area_many(centres[:, 0], centres[:, 1], r)
    probs = np.concatenate([[1.0 - areas.sum()], areas])
    u = _rng.stream(seed, _rng.PHASE1).random(n - k)
    cells = np.searchsorted(np.cumsum(probs)[:-1], u, side="right")
    return PhaseOne(first, primary, far, cells, stats.isolated_count)


def three_phase_generate(params: ModelParams, c: float, lam: float, paper_c: bool | None = None):
    """Generate ``(graph, trace)`` by the three-phase process.

    ``c * n`` must be an even integer.  If the first-stage threshold graph
    has fewer than ``cn/2`` isolated vertices the conditioning fails: the
    trace says so (``conditioning_ok=False``) and the secondary vertices are
    placed uniformly, so that the output graph is still an exact sample of
    the model.
    """
    if not lam > 0:
        raise InvalidInputError("lambda must be positive")
    n, seed = params.n, params.seed
    if paper_c is None:
        paper_c = C_LOW < c < C_HIGH
    one = phase_one(params, c)
    k = len(one.first)
    m = k // 2
    r = 1.0 / math.sqrt(n)
    nice_r = 1.0 / (lam * math.sqrt(n))
    place = _rng.stream(seed, _rng.PHASE2)

    if not one.conditioning_ok:
        rest = place.random((n - k, 2))
        pts = resample_coincident(np.vstack([one.first, rest]), seed)
        adj = sample_adjacency(n, params.p, seed)
        trace = ThreePhaseTrace(n, c, lam, False, paper_c=paper_c)
        return EmbeddedGraph(params, pts, adj), trace

    centres = one.first[one.primary]
    rest = np.empty((n - k, 2))
    for idx, cell in enumerate(one.cells):
        if cell == EXTERIOR:
            rest[idx] = _place_in_exterior(place, centres, r)
        else:
            rest[idx] = _place_in_disc(place, centres[cell - 1, 0], centres[cell - 1, 1], r)
    pts = resample_coincident(np.vstack([one.first, rest]), seed)
    adj = sample_adjacency(n, params.p, seed)

    secondary = np.arange(k, n)
    two = one.two_vertex_discs()
    occupant = {int(d): int(v) for v, d in zip(secondary, one.cells) if d != EXTERIOR}
    nice = [d for d in two if _niceness(pts, adj, int(one.primary[d - 1]), occupant[d], nice_r)]
    trace = ThreePhaseTrace(
        n=n,
        c=c,
        lam=lam,
        conditioning_ok=True,
        primary=tuple(int(v) for v in one.primary),
        far=tuple(int(v) for v in one.far),
        disc_assignment={int(v): int(d) for v, d in zip(secondary, one.cells)},
        two_vertex_discs=tuple(two),
        nice_discs=tuple(nice),
        paper_c=paper_c,
    )
    assert len(trace.primary) == m
    return EmbeddedGraph(params, pts, adj), trace


def nice_disc_count(trace: ThreePhaseTrace, g: EmbeddedGraph) -> int:
    """Number of nice discs, recomputed from the graph and the trace's occupancy."""
    if not trace.conditioning_ok:
        return 0
    occ = trace.occupants()
    count = 0
    for d in trace.two_vertex_discs:
        (v,) = occ[d]
        if _niceness(g.points, g.adjacency, trace.primary[d - 1], v, trace.nice_radius):
            count += 1
    return count


def verify_nice_implication(trace: ThreePhaseTrace, g: EmbeddedGraph):
    """Check that a claimed nice disc really pushes the stretch factor above ``lam``.

    Returns ``None`` (not applicable) for a disconnected graph, ``True`` when
    the trace claims no nice disc, and otherwise whether ``F > lam``.
    """
    if not is_connected(g):
        return None
    if not trace.nice_discs:
        return True
    return stretch_factor(g).value > trace.lam


def check_trace(trace: ThreePhaseTrace, g: EmbeddedGraph, tol: float = 1e-9) -> None:
    """Assert the structural invariants of a trace; raises ``AssertionError``."""
    if not trace.conditioning_ok:
        return
    r = trace.radius
    pts = g.points
    centres = pts[list(trace.primary)]
    assert len(trace.primary) * 2 == round(trace.c * trace.n)
    if len(centres) > 1:
        d = pairwise_euclid(centres)
        np.fill_diagonal(d, np.inf)
        assert d.min() > 2 * r, "primary discs overlap"
    if trace.far:
        fp = pts[list(trace.far)]
        dist = np.hypot(fp[:, 0][:, None] - centres[:, 0][None, :], fp[:, 1][:, None] - centres[:, 1][None, :])
        assert dist.min() > r, "far vertex inside a primary disc"
    areas = disc_square_area_many(centres[:, 0], centres[:, 1], r)
    assert np.all(areas >= math.pi * r * r / 4 - tol) and np.all(areas <= math.pi * r * r + tol)
    probs = np.concatenate([[1.0 - areas.sum()], areas])
    assert probs.min() >= 0.0 and abs(probs.sum() - 1.0) <= tol
    for v, d in trace.disc_assignment.items():
        if d != EXTERIOR:
            cx, cy = pts[trace.primary[d - 1]]
            assert euclid((cx, cy), pts[v]) <= r + tol, "occupant outside its disc"
        else:
            dist = np.hypot(centres[:, 0] - pts[v, 0], centres[:, 1] - pts[v, 1])
            assert dist.min() > r - tol, "exterior vertex inside a primary disc"
    assert set(trace.nice_discs) <= set(trace.two_vertex_discs)
