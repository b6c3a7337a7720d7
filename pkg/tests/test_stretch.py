import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import floyd_warshall_lists
from stretchlab import stretch
from stretchlab.errors import InvalidInputError
from stretchlab.geom import pairwise_euclid
from stretchlab.model import EmbeddedGraph, ModelParams, generate
from stretchlab.stretch import (
    StretchReport,
    apsp,
    bad_pairs,
    common_neighbours,
    oracle_stretch,
    sssp,
    stretch_factor,
)


def make(points, edges, p=0.5):
    n = len(points)
    adj = np.zeros((n, n), dtype=bool)
    for i, j in edges:
        adj[i, j] = adj[j, i] = True
    return EmbeddedGraph(ModelParams(n, p, 0), points, adj)


def path_graph():
    # u=(0,0) -- w=(0.5,0.5) -- v=(1,0)
    return make([[0, 0], [1, 0], [0.5, 0.5]], [(0, 2), (1, 2)])


@pytest.mark.parametrize("dense", [True, False])
def test_sssp_examples(backend, dense):
    k2 = make([[0, 0], [1, 0]], [(0, 1)])
    assert sssp(k2, 0, dense=dense).tolist() == [0.0, 1.0]
    empty = make([[0, 0], [1, 0], [0.2, 0.3]], [])
    row = sssp(empty, 0, dense=dense)
    assert row[0] == 0 and np.isinf(row[1:]).all()
    with pytest.raises(InvalidInputError):
        sssp(k2, 2)


@pytest.mark.parametrize("dense", [True, False])
def test_sssp_matches_list_floyd_warshall(backend, dense):
    g = generate(ModelParams(30, 0.2, 4))
    ref = floyd_warshall_lists(g.points.tolist(), g.edges().tolist())
    for s in range(g.n):
        row = sssp(g, s, dense=dense)
        np.testing.assert_allclose(row, ref[s], rtol=1e-9)


def test_apsp_complete_graph_is_euclidean(backend):
    g = make([[0, 0], [1, 0], [0, 1]], [(0, 1), (0, 2), (1, 2)])
    np.testing.assert_allclose(apsp(g).dist, pairwise_euclid(g.points), rtol=1e-15)


def test_apsp_disconnected_has_inf(backend):
    g = make([[0, 0], [1, 0], [0, 1]], [(0, 1)])
    assert np.isinf(apsp(g)[0, 2])


@pytest.mark.parametrize("seed, p", [(1, 0.15), (2, 0.5), (3, 0.9)])
def test_apsp_invariants_and_oracle(backend, seed, p):
    g = generate(ModelParams(50, p, seed))
    dm = apsp(g)
    d = dm.dist
    ref = np.array(floyd_warshall_lists(g.points.tolist(), g.edges().tolist()))
    np.testing.assert_allclose(d, ref, rtol=1e-9)
    assert np.all(d.diagonal() == 0)
    assert np.array_equal(d, d.T)
    assert np.all(d >= pairwise_euclid(g.points) - 1e-12)
    finite = np.isfinite(d)
    if finite.all():
        # triangle inequality through every intermediate vertex
        assert np.all(d[:, None, :] <= d[:, :, None] + d[None, :, :] + 1e-12)


def test_complete_graph_stretch_one(backend):
    g = generate(ModelParams(12, 1.0, 8))
    rep = stretch_factor(g)
    assert rep.value == 1.0
    assert rep.pair == (0, 1)
    assert rep.d_graph == rep.d_euclid


def test_two_edge_detour(backend):
    rep = stretch_factor(path_graph())
    assert rep.value == pytest.approx(math.sqrt(2), rel=1e-12)
    assert rep.pair == (0, 1)
    assert rep.d_graph == pytest.approx(math.sqrt(2))
    assert rep.d_euclid == pytest.approx(1.0)


def test_disconnected_undefined(backend):
    rep = stretch_factor(make([[0, 0], [1, 0]], []))
    assert not rep.defined
    assert rep.marker == stretch.UNDEFINED
    assert not oracle_stretch(make([[0, 0], [1, 0]], [])).defined


def test_needs_two_vertices():
    g = EmbeddedGraph(ModelParams(1, 0.5, 0), [[0.5, 0.5]], [[False]])
    with pytest.raises(InvalidInputError):
        stretch_factor(g)


@pytest.mark.parametrize("dense", [True, False])
def test_matches_oracle_random(backend, dense):
    rng = np.random.default_rng(17)
    checked = 0
    for k in range(60):
        n = int(rng.integers(4, 41))
        p = float(rng.choice([0.3, 0.6, 0.9]))
        g = generate(ModelParams(n, p, 1000 + k))
        got, ref = stretch_factor(g, dense=dense), oracle_stretch(g)
        assert got.defined == ref.defined
        if ref.defined:
            checked += 1
            assert got.value == pytest.approx(ref.value, rel=1e-9)
            if ref.value > 1 + 1e-9:
                assert got.pair == ref.pair
                assert got.d_graph == pytest.approx(ref.d_graph, rel=1e-9)
                assert got.d_euclid == pytest.approx(ref.d_euclid, rel=1e-12)
    assert checked > 30


def test_dense_and_heap_variants_agree():
    for seed in range(10):
        g = generate(ModelParams(80, 0.1 + 0.08 * seed, seed))
        a, b = stretch_factor(g, dense=True), stretch_factor(g, dense=False)
        assert a.defined == b.defined
        if a.defined:
            assert a.value == pytest.approx(b.value, rel=1e-12)
            assert a.pair == b.pair


def test_report_json_round_trip():
    rep = stretch_factor(path_graph())
    doc = rep.to_dict()
    assert set(doc) == {"stretch", "defined", "pair", "d_graph", "d_euclid"}
    assert StretchReport.from_dict(doc) == rep
    assert StretchReport.from_dict(StretchReport(None).to_dict()) == StretchReport(None)


def test_adding_edges_never_increases_stretch():
    rng = np.random.default_rng(5)
    for seed in range(15):
        g = generate(ModelParams(40, 0.3, seed))
        base = stretch_factor(g)
        if not base.defined:
            continue
        for _ in range(5):
            i, j = rng.choice(g.n, 2, replace=False)
            g = g.with_edges([(int(i), int(j))])
            rep = stretch_factor(g)
            assert rep.value <= base.value * (1 + 1e-12)
            base = rep


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.floats(0.05, 20.0))
def test_similarity_invariance(seed, scale):
    # computation-level check: scale every coordinate, bypassing the unit-square contract
    g = generate(ModelParams(25, 0.4, seed))
    ref = oracle_stretch(g)
    if not ref.defined:
        return
    dmat = pairwise_euclid(g.points * scale)
    adj = np.ascontiguousarray(g.adjacency, dtype=np.uint8)
    ratio, i, j, dg, de = stretch.kernels.max_stretch(dmat, adj, dense=True)
    if i < 0:
        ratio = 1.0
    assert ratio == pytest.approx(ref.value, rel=1e-9)
    if ref.value > 1 + 1e-9:
        assert (i, j) == ref.pair
        assert dg == pytest.approx(ref.d_graph * scale, rel=1e-9)


def test_bad_pairs():
    k = generate(ModelParams(8, 1.0, 3))
    assert bad_pairs(k, 0.5, apsp(k)) == []
    g = path_graph()
    assert bad_pairs(g, 0.1, apsp(g)) == [(0, 1)]
    with pytest.raises(InvalidInputError):
        bad_pairs(g, 0.0, apsp(g))


def test_bad_pairs_consistent_with_stretch():
    for seed in range(20):
        g = generate(ModelParams(30, 0.35, seed))
        rep = stretch_factor(g)
        if not rep.defined:
            continue
        dm = apsp(g)
        for lam in (0.5, 1.0, 2.0, 5.0):
            assert bool(bad_pairs(g, lam, dm)) == (rep.value > 2 * lam + 1)


def test_common_neighbours():
    k4 = generate(ModelParams(4, 1.0, 0))
    assert common_neighbours(k4, 0, 3) == 2
    empty = generate(ModelParams(4, 0.0, 0))
    assert common_neighbours(empty, 1, 2) == 0
    with pytest.raises(InvalidInputError):
        common_neighbours(k4, 1, 1)


def test_common_neighbour_count_vs_chernoff():
    # fraction of (graph, pair) draws with fewer than p^2 n / 4 common neighbours
    # must not exceed exp(-p^2 n / 16) beyond sampling noise
    n, p = 1000, 0.5
    rng = np.random.default_rng(0)
    low = total = 0
    for seed in range(100):
        g = generate(ModelParams(n, p, seed))
        for _ in range(10):
            u, v = rng.choice(n, 2, replace=False)
            total += 1
            low += common_neighbours(g, int(u), int(v)) < p * p * n / 4
    bound = math.exp(-p * p * n / 16)
    assert low / total <= bound + 3 * math.sqrt(max(bound, 1 / total) / total)


def test_coincident_points_rejected():
    g = make([[0.2, 0.2], [0.2, 0.2], [0.5, 0.5]], [(0, 2), (1, 2)])
    with pytest.raises(Exception):
        stretch_factor(g)
