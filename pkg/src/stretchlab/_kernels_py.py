"""Pure-Python/numpy shortest-path kernels.

Same contract as the compiled ``_kernels`` extension; used when the
extension is not built or ``STRETCHLAB_PURE=1`` is set.

All kernels take a precomputed Euclidean distance matrix ``dmat`` and an
adjacency matrix ``adj`` (``uint8``/``bool``, symmetric, zero diagonal).
The heap variants additionally take the CSR arrays ``indptr``/``indices``.
"""

import heapq

import numpy as np

INF = float("inf")


def sssp_dense(dmat, adj, source):
    n = dmat.shape[0]
    adj = np.asarray(adj, dtype=bool)
    t = np.full(n, INF)
    t[source] = 0.0
    done = np.zeros(n, dtype=bool)
    for _ in range(n):
        masked = np.where(done, INF, t)
        x = int(np.argmin(masked))
        tx = masked[x]
        if tx == INF:
            break
        done[x] = True
        cand = tx + dmat[x]
        upd = adj[x] & ~done & (cand < t)
        t[upd] = cand[upd]
    return t


def sssp_heap(dmat, indptr, indices, source):
    n = dmat.shape[0]
    t = [INF] * n
    t[source] = 0.0
    done = [False] * n
    heap = [(0.0, source)]
    while heap:
        tx, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        row = dmat[x]
        for y in indices[indptr[x]:indptr[x + 1]].tolist():
            if not done[y]:
                c = tx + row[y]
                if c < t[y]:
                    t[y] = c
                    heapq.heappush(heap, (c, y))
    return np.array(t)


class _Best:
    __slots__ = ("ratio", "i", "j", "dg", "de")

    def __init__(self):
        self.ratio = 1.0
        self.i = -1
        self.j = -1
        self.dg = 0.0
        self.de = 0.0

    def offer(self, u, v, dg, de):
        r = dg / de
        a, b = (u, v) if u < v else (v, u)
        if r > self.ratio or (r == self.ratio and (self.i < 0 or (a, b) < (self.i, self.j))):
            self.ratio, self.i, self.j, self.dg, self.de = r, a, b, dg, de


def _source_order(dmat, adj):
    n = dmat.shape[0]
    non = ~np.asarray(adj, dtype=bool)
    np.fill_diagonal(non, False)
    key = np.where(non, dmat, INF).min(axis=1) if n else np.zeros(0)
    order = np.argsort(key, kind="stable")
    return [int(u) for u in order if key[u] < INF], non


def max_stretch(dmat, adj, indptr=None, indices=None, dense=True):
    """Maximum of d_G(u, v) / d(u, v) over non-adjacent pairs of a connected graph.

    Returns ``(ratio, i, j, d_graph, d_euclid)`` with ``i < j``; ``i == -1``
    means no non-adjacent pair reached ratio 1 (the caller floors at 1).

    Each source runs Dijkstra until no unsettled non-neighbour ``v`` can beat
    the running maximum: the tentative label ``t[v]`` bounds ``d_G(u, v)``
    from above, so once ``t[v] / d(u, v) < best`` for all of them the
    remaining search is irrelevant.  Sources are visited by increasing
    distance to their nearest non-neighbour so that ``best`` grows early.
    """
    adjb = np.asarray(adj, dtype=bool)
    order, non = _source_order(dmat, adjb)
    best = _Best()
    for u in order:
        if dense:
            _pruned_dense(dmat, adjb, u, np.flatnonzero(non[u]), best)
        else:
            _pruned_heap(dmat, adjb, indptr, indices, u, np.flatnonzero(non[u]), best)
    return best.ratio, best.i, best.j, best.dg, best.de


def _pruned_dense(dmat, adj, u, targets, best):
    n = dmat.shape[0]
    du = dmat[u]
    t = np.full(n, INF)
    t[u] = 0.0
    done = np.zeros(n, dtype=bool)
    for _ in range(n):
        masked = np.where(done, INF, t)
        x = int(np.argmin(masked))
        tx = masked[x]
        if tx == INF:
            return
        done[x] = True
        if x != u and not adj[u, x]:
            best.offer(u, x, tx, du[x])
        cand = tx + dmat[x]
        upd = adj[x] & ~done & (cand < t)
        t[upd] = cand[upd]
        targets = targets[~done[targets]]
        if targets.size == 0 or not np.any(t[targets] / du[targets] >= best.ratio):
            return


def _pruned_heap(dmat, adj, indptr, indices, u, targets, best):
    n = dmat.shape[0]
    du = dmat[u]
    t = np.full(n, INF)
    t[u] = 0.0
    done = np.zeros(n, dtype=bool)
    heap = [(0.0, u)]
    settled = 0
    next_check = 1
    while heap:
        tx, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        settled += 1
        if x != u and not adj[u, x]:
            best.offer(u, x, tx, du[x])
        row = dmat[x]
        for y in indices[indptr[x]:indptr[x + 1]].tolist():
            if not done[y]:
                c = tx + row[y]
                if c < t[y]:
                    t[y] = c
                    heapq.heappush(heap, (c, y))
        if settled >= next_check:
            next_check *= 2
            targets = targets[~done[targets]]
            if targets.size == 0 or not np.any(t[targets] / du[targets] >= best.ratio):
                return
