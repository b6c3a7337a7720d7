import json
import math

import numpy as np
import pytest

from stretchlab.bounds import C_HIGH, C_LOW
from stretchlab.constructs import (
    ThreePhaseTrace,
    check_trace,
    nice_disc_count,
    phase_one,
    pick_c,
    resolve_c,
    three_phase_generate,
    threshold_graph,
    verify_nice_implication,
)
from stretchlab.errors import InvalidInputError, NoValidCError
from stretchlab.model import EmbeddedGraph, ModelParams, generate
from stretchlab.stretch import stretch_factor


def _pick_c_brute(n):
    # enumerate every integer in the window and keep the even ones
    ks = [k for k in range(0, n + 1) if n / 51 < k < n / (16 * math.pi) and k % 2 == 0]
    return ks[0] / n if ks else None


def test_pick_c_examples():
    assert pick_c(10**4) == pytest.approx(0.0198)
    assert 10**4 / 51 == pytest.approx(196.08, abs=0.005)
    assert 10**4 / (16 * math.pi) == pytest.approx(198.94, abs=0.005)
    with pytest.raises(NoValidCError) as info:
        pick_c(100)
    lo, hi = info.value.interval
    assert lo == pytest.approx(1.96, abs=0.01) and hi == pytest.approx(1.99, abs=0.01)


def test_pick_c_against_enumeration():
    for n in range(2, 12000):
        expected = _pick_c_brute(n)
        if expected is None:
            with pytest.raises(NoValidCError):
                pick_c(n)
        else:
            c = pick_c(n)
            assert c == expected
            assert C_LOW < c < C_HIGH
            assert round(c * n) % 2 == 0


def test_resolve_c_override():
    assert resolve_c(10**4) == (0.0198, True)
    c, paper = resolve_c(1000, 0.01)
    assert c == 0.01 and not paper
    with pytest.raises(InvalidInputError):
        resolve_c(1000, 0.1)


def test_threshold_graph_examples():
    far = threshold_graph([[0, 0], [0.5, 0.5], [1, 1]], 0.1)
    assert (far.isolated_count, far.edge_count) == (3, 0)
    exact = threshold_graph([[0, 0], [0.5, 0]], 0.5)
    assert (exact.isolated_count, exact.edge_count) == (0, 1)
    just_over = threshold_graph([[0, 0], [0.5, 0]], np.nextafter(0.5, 0))
    assert just_over.edge_count == 0


def test_threshold_graph_blocked_matches_direct():
    pts = np.random.default_rng(2).random((700, 2))
    a = threshold_graph(pts, 0.03)
    b = threshold_graph(pts, 0.03, block=64)
    assert a == b
    assert a.isolated_count <= a.m_points and a.edge_count <= 700 * 699 // 2


def test_lemma2_isolated_count_small_run():
    n, c = 10**4, 0.0198
    cn = round(c * n)
    rng_seeds = range(50)
    hits = 0
    for s in rng_seeds:
        pts = np.random.default_rng(s).random((cn, 2))
        hits += threshold_graph(pts, 2 / math.sqrt(n)).isolated_count >= cn / 2
    assert hits == 50


def test_three_phase_p_one_has_no_nice_discs():
    for seed in range(10):
        g, trace = three_phase_generate(ModelParams(503, 1.0, seed), pick_c(503), 0.8)
        assert trace.nice_discs == ()
        assert nice_disc_count(trace, g) == 0


def test_trace_invariants():
    seen_nice = 0
    for seed in range(40):
        g, trace = three_phase_generate(ModelParams(503, 0.5, seed), pick_c(503), 1.1)
        assert trace.conditioning_ok
        check_trace(trace, g)
        assert len(trace.primary) == 5
        assert set(trace.primary).isdisjoint(trace.far)
        assert sorted(trace.disc_assignment) == list(range(10, 503))
        assert nice_disc_count(trace, g) == len(trace.nice_discs)
        seen_nice += bool(trace.nice_discs)
    assert seen_nice > 0


def test_conditioning_failure_is_an_outcome():
    # c = 1 at n = 30: every vertex is first-stage and 15 of them cannot all be isolated at radius 2/sqrt(30)
    g, trace = three_phase_generate(ModelParams(30, 0.5, 1), 1.0, 1.0)
    assert not trace.conditioning_ok
    assert trace.nice_discs == () and g.n == 30


def test_three_phase_deterministic():
    a = three_phase_generate(ModelParams(101, 0.5, 9), pick_c(101), 1.5)
    b = three_phase_generate(ModelParams(101, 0.5, 9), pick_c(101), 1.5)
    assert a[0] == b[0] and a[1] == b[1]


def test_three_phase_rejects_bad_c():
    with pytest.raises(InvalidInputError):
        three_phase_generate(ModelParams(100, 0.5, 0), 0.03, 1.0)  # cn = 3 is odd
    with pytest.raises(InvalidInputError):
        three_phase_generate(ModelParams(100, 0.5, 0), 0.02, 0.0)


def _hand_trace(offset, adjacent, lam=2.0, n=64):
    # centre 0 at (0.5, 0.5), occupant 1 straight above it, far-away vertex 2 joined to both
    pts = [[0.5, 0.5], [0.5, 0.5 + offset], [0.9, 0.9]]
    adj = np.zeros((3, 3), dtype=bool)
    adj[0, 2] = adj[2, 0] = adj[1, 2] = adj[2, 1] = True
    if adjacent:
        adj[0, 1] = adj[1, 0] = True
    g = EmbeddedGraph(ModelParams(3, 0.5, 0), pts, adj)
    trace = ThreePhaseTrace(
        n=n, c=0.02, lam=lam, conditioning_ok=True, primary=(0,), far=(), disc_assignment={1: 1, 2: 0},
        two_vertex_discs=(1,), nice_discs=(1,),
    )
    return g, trace


def test_niceness_rules():
    lam, n = 2.0, 64  # 1/(lam sqrt(n)) = 1/16 is exact in binary
    g, t = _hand_trace(1 / (2 * lam * math.sqrt(n)), adjacent=False)
    assert nice_disc_count(t, g) == 1
    g, t = _hand_trace(1 / (2 * lam * math.sqrt(n)), adjacent=True)
    assert nice_disc_count(t, g) == 0
    boundary = 1 / (lam * math.sqrt(n))
    assert boundary == 0.0625
    g, t = _hand_trace(boundary, adjacent=False)
    assert nice_disc_count(t, g) == 0


def test_verify_nice_implication_cases():
    g, t = _hand_trace(0.025, adjacent=False)
    assert verify_nice_implication(t, g) is True
    assert stretch_factor(g).value > t.lam
    empty = ThreePhaseTrace(n=100, c=0.02, lam=2.0, conditioning_ok=True)
    assert verify_nice_implication(empty, g) is True
    # negative control: a trace claiming a nice disc on a graph whose stretch is below lambda
    k3 = generate(ModelParams(3, 1.0, 0))
    fake = ThreePhaseTrace(n=100, c=0.02, lam=2.0, conditioning_ok=True, primary=(0,), disc_assignment={1: 1, 2: 0},
                           two_vertex_discs=(1,), nice_discs=(1,))
    assert verify_nice_implication(fake, k3) is False
    disconnected = generate(ModelParams(3, 0.0, 0))
    assert verify_nice_implication(fake, disconnected) is None


def test_nice_implies_stretch_above_lambda_small_run():
    checked = 0
    for seed in range(400):
        g, trace = three_phase_generate(ModelParams(101, 0.5, seed), pick_c(101), 1.2)
        if trace.nice_discs:
            res = verify_nice_implication(trace, g)
            if res is not None:
                assert res
                checked += 1
    assert checked > 5


def test_trace_json_round_trip():
    g, trace = three_phase_generate(ModelParams(203, 0.5, 4), pick_c(203), 1.5)
    doc = json.loads(trace.to_json())
    for key in ("c", "A", "disc_assignment", "two_vertex_discs", "nice_discs", "lambda", "conditioning_ok"):
        assert key in doc
    assert ThreePhaseTrace.from_dict(doc) == trace


def test_phase_one_cells_follow_areas():
    # the share of secondaries landing in primary discs matches the total disc area
    n = 10**4
    share = []
    expected = []
    for s in range(30):
        one = phase_one(ModelParams(n, 0.5, s), 0.0198)
        share.append(np.mean(one.cells > 0))
        r = 1 / math.sqrt(n)
        expected.append(99 * math.pi * r * r)
    # discs are at most pi r^2 each (less near the boundary)
    assert np.mean(share) <= np.mean(expected) * 1.05
    assert np.mean(share) >= np.mean(expected) * 0.7


def test_lemma3_two_vertex_discs_small_run():
    n = 10**4
    m = 99
    for s in range(100):
        one = phase_one(ModelParams(n, 0.5, s), 0.0198)
        assert one.conditioning_ok
        assert len(one.two_vertex_discs()) >= math.exp(-8) * m
