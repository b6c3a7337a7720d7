# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled shortest-path kernels; see ``_kernels_py`` for the contract."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()


# ---------------------------------------------------------------- lazy heap

cdef struct Heap:
    double *key
    int *val
    Py_ssize_t size


cdef inline void heap_push(Heap *h, double k, int v) noexcept nogil:
    cdef Py_ssize_t i = h.size
    cdef Py_ssize_t parent
    h.size += 1
    while i > 0:
        parent = (i - 1) >> 1
        if h.key[parent] <= k:
            break
        h.key[i] = h.key[parent]
        h.val[i] = h.val[parent]
        i = parent
    h.key[i] = k
    h.val[i] = v


cdef inline void heap_pop(Heap *h, double *k, int *v) noexcept nogil:
    cdef Py_ssize_t i = 0, child, last
    cdef double lk
    cdef int lv
    k[0] = h.key[0]
    v[0] = h.val[0]
    h.size -= 1
    last = h.size
    if last == 0:
        return
    lk = h.key[last]
    lv = h.val[last]
    while True:
        child = 2 * i + 1
        if child >= last:
            break
        if child + 1 < last and h.key[child + 1] < h.key[child]:
            child += 1
        if h.key[child] >= lk:
            break
        h.key[i] = h.key[child]
        h.val[i] = h.val[child]
        i = child
    h.key[i] = lk
    h.val[i] = lv


# ---------------------------------------------------------------- sssp

def sssp_dense(const double[:, ::1] dmat, const unsigned char[:, ::1] adj, int source):
    cdef Py_ssize_t n = dmat.shape[0]
    out = np.full(n, np.inf)
    cdef double[::1] t = out
    cdef unsigned char[::1] done = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t step, y, x
    cdef double tx, c
    t[source] = 0.0
    with nogil:
        for step in range(n):
            x = -1
            tx = INFINITY
            for y in range(n):
                if not done[y] and t[y] < tx:
                    tx = t[y]
                    x = y
            if x < 0:
                break
            done[x] = 1
            for y in range(n):
                if adj[x, y] and not done[y]:
                    c = tx + dmat[x, y]
                    if c < t[y]:
                        t[y] = c
    return out


def sssp_heap(const double[:, ::1] dmat, const int[::1] indptr, const int[::1] indices, int source):
    cdef Py_ssize_t n = dmat.shape[0]
    out = np.full(n, np.inf)
    cdef double[::1] t = out
    cdef unsigned char[::1] done = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t cap = indices.shape[0] + n + 1
    cdef Heap h
    cdef double tx, c
    cdef int x, y
    cdef Py_ssize_t e
    h.key = <double *> malloc(cap * sizeof(double))
    h.val = <int *> malloc(cap * sizeof(int))
    h.size = 0
    if h.key == NULL or h.val == NULL:
        free(h.key)
        free(h.val)
        raise MemoryError()
    try:
        with nogil:
            t[source] = 0.0
            heap_push(&h, 0.0, source)
            while h.size > 0:
                heap_pop(&h, &tx, &x)
                if done[x]:
                    continue
                done[x] = 1
                for e in range(indptr[x], indptr[x + 1]):
                    y = indices[e]
                    if not done[y]:
                        c = tx + dmat[x, y]
                        if c < t[y]:
                            t[y] = c
                            heap_push(&h, c, y)
    finally:
        free(h.key)
        free(h.val)
    return out


# ---------------------------------------------------------------- stretch

cdef struct Best:
    double ratio
    int i
    int j
    double dg
    double de


cdef inline void offer(Best *b, int u, int v, double dg, double de) noexcept nogil:
    cdef double r = dg / de
    cdef int a = u if u < v else v
    cdef int c = v if u < v else u
    if r > b.ratio or (r == b.ratio and (b.i < 0 or a < b.i or (a == b.i and c < b.j))):
        b.ratio = r
        b.i = a
        b.j = c
        b.dg = dg
        b.de = de


cdef bint any_open(const double[:, ::1] dmat, int u, double[::1] t, unsigned char[::1] done,
                   int *targets, Py_ssize_t *ntarg, double best) noexcept nogil:
    # compact the unsettled targets and report whether one can still reach ``best``
    cdef Py_ssize_t k, m = 0
    cdef int v
    cdef bint open_ = False
    for k in range(ntarg[0]):
        v = targets[k]
        if done[v]:
            continue
        targets[m] = v
        m += 1
        if not open_ and t[v] / dmat[u, v] >= best:
            open_ = True
    ntarg[0] = m
    return open_


def max_stretch(const double[:, ::1] dmat, const unsigned char[:, ::1] adj,
                const int[::1] indptr=None, const int[::1] indices=None, bint dense=True):
    cdef Py_ssize_t n = dmat.shape[0]
    cdef Best b
    b.ratio = 1.0
    b.i = -1
    b.j = -1
    b.dg = 0.0
    b.de = 0.0
    if n < 2:
        return b.ratio, b.i, b.j, b.dg, b.de

    key_arr = np.full(n, np.inf)
    cdef double[::1] key = key_arr
    cdef Py_ssize_t u, v, k
    for u in range(n):
        for v in range(n):
            if v != u and not adj[u, v] and dmat[u, v] < key[u]:
                key[u] = dmat[u, v]
    order_arr = np.argsort(key_arr, kind="stable").astype(np.intc)
    cdef int[::1] order = order_arr

    t_arr = np.empty(n)
    cdef double[::1] t = t_arr
    cdef unsigned char[::1] done = np.empty(n, dtype=np.uint8)
    cdef int *targets = <int *> malloc(n * sizeof(int))
    cdef Py_ssize_t cap = (indices.shape[0] if indices is not None else 0) + n + 1
    cdef Heap h
    h.key = NULL
    h.val = NULL
    h.size = 0
    if not dense:
        h.key = <double *> malloc(cap * sizeof(double))
        h.val = <int *> malloc(cap * sizeof(int))
    if targets == NULL or (not dense and (h.key == NULL or h.val == NULL)):
        free(targets)
        free(h.key)
        free(h.val)
        raise MemoryError()

    cdef Py_ssize_t ntarg, step, y, settled, next_check
    cdef int src, x, yi
    cdef double tx, c
    cdef Py_ssize_t e
    try:
        with nogil:
            for k in range(n):
                src = order[k]
                if key[src] == INFINITY:
                    break
                ntarg = 0
                for v in range(n):
                    t[v] = INFINITY
                    done[v] = 0
                    if v != src and not adj[src, v]:
                        targets[ntarg] = <int> v
                        ntarg += 1
                t[src] = 0.0
                if dense:
                    for step in range(n):
                        x = -1
                        tx = INFINITY
                        for y in range(n):
                            if not done[y] and t[y] < tx:
                                tx = t[y]
                                x = <int> y
                        if x < 0:
                            break
                        done[x] = 1
                        if x != src and not adj[src, x]:
                            offer(&b, src, x, tx, dmat[src, x])
                        for y in range(n):
                            if adj[x, y] and not done[y]:
                                c = tx + dmat[x, y]
                                if c < t[y]:
                                    t[y] = c
                        if not any_open(dmat, src, t, done, targets, &ntarg, b.ratio):
                            break
                else:
                    h.size = 0
                    heap_push(&h, 0.0, src)
                    settled = 0
                    next_check = 1
                    while h.size > 0:
                        heap_pop(&h, &tx, &x)
                        if done[x]:
                            continue
                        done[x] = 1
                        settled += 1
                        if x != src and not adj[src, x]:
                            offer(&b, src, x, tx, dmat[src, x])
                        for e in range(indptr[x], indptr[x + 1]):
                            yi = indices[e]
                            if not done[yi]:
                                c = tx + dmat[x, yi]
                                if c < t[yi]:
                                    t[yi] = c
                                    heap_push(&h, c, yi)
                        if settled >= next_check:
                            next_check *= 2
                            if not any_open(dmat, src, t, done, targets, &ntarg, b.ratio):
                                break
    finally:
        free(targets)
        free(h.key)
        free(h.val)
    return b.ratio, b.i, b.j, b.dg, b.de
