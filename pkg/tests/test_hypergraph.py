import math

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pyth2color.hypergraph import (
    bfs_levels,
    build,
    link,
    monochromatic_edges,
    remove_pendants,
    restore_coloring,
    vertex_distance,
    write_level_csv,
)
from pyth2color.cnf import decode_model, encode
from pyth2color.solver import solve
from pyth2color.verify import verify


def test_build_small():
    s = build([(3, 4, 5), (6, 8, 10)])
    assert s.vertices == (3, 4, 5, 6, 8, 10)
    assert s.edges == ((3, 4, 5), (6, 8, 10))
    assert s.linear


def test_build_empty():
    s = build([])
    assert s.vertices == () and s.edges == () and s.linear


def test_build_dedupes_and_detects_nonlinear():
    s = build([(1, 2, 3), (3, 2, 1), (1, 2, 4)])
    assert len(s) == 2
    assert not s.linear


@pytest.mark.parametrize("bound", [200, 2000])
def test_pyth_is_linear(pyth, bound):
    s = pyth(bound)
    assert s.linear
    if bound == 200:
        for i, e in enumerate(s.edges):
            for f in s.edges[i + 1 :]:
                assert len(set(e) & set(f)) <= 1


def test_link():
    s = build([(3, 4, 5), (5, 12, 13)])
    assert link(s, 5).pairs == {(3, 4), (12, 13)}


def test_link_fano_is_perfect_matching(fano):
    for v in fano.vertices:
        pairs = link(fano, v).pairs
        assert len(pairs) == 3
        covered = [x for p in pairs for x in p]
        assert sorted(covered) == [x for x in fano.vertices if x != v]


def test_link_isolated_and_unknown():
    s = build([(1, 2, 3)], vertices=[9])
    assert link(s, 9).pairs == frozenset()
    with pytest.raises(KeyError):
        link(s, 42)


def test_pendants_chain_fully_removed():
    s = build([(3, 4, 5), (6, 8, 10)])
    reduced, trace = remove_pendants(s)
    assert reduced.edges == ()
    assert trace.edges == [(3, 4, 5), (6, 8, 10)]
    assert trace.removed[0][1] == {3, 4, 5}


def test_pendants_fano_untouched(fano):
    reduced, trace = remove_pendants(fano)
    assert reduced.edges == fano.edges and len(trace) == 0


def _check_trace_replay(original, trace):
    edges = set(original.edges)
    for e, free in trace.removed:
        deg = {}
        for f in edges:
            for v in f:
                deg[v] = deg.get(v, 0) + 1
        assert e in edges
        assert free and all(deg[v] == 1 for v in free)
        assert all(deg[v] > 1 for v in e if v not in free)
        edges.remove(e)


@pytest.mark.parametrize("bound", [100, 300, 1000])
def test_pendant_removal_properties(pyth, bound):
    s = pyth(bound)
    reduced, trace = remove_pendants(s)
    assert len(reduced) < len(s)
    assert set(reduced.edges).isdisjoint(trace.edges)
    assert set(reduced.edges) | set(trace.edges) == set(s.edges)
    assert len(reduced) + len(trace) == len(s)
    assert all(reduced.degree(v) != 1 for v in reduced.vertices)
    _check_trace_replay(s, trace)
    again, trace2 = remove_pendants(reduced)
    assert again == reduced and len(trace2) == 0


@st.composite
def triple_lists(draw):
    n = draw(st.integers(3, 14))
    return draw(st.lists(st.tuples(*(st.integers(1, n),) * 3).filter(lambda t: len(set(t)) == 3), max_size=25))


@settings(max_examples=60, deadline=None)
@given(triple_lists())
def test_pendant_removal_random(ts):
    s = build(ts)
    reduced, trace = remove_pendants(s)
    assert set(reduced.edges) | set(trace.edges) == set(s.edges)
    assert len(reduced) + len(trace) == len(s)
    _check_trace_replay(s, trace)
    assert len(remove_pendants(reduced)[1]) == 0
    res = solve(encode(reduced)[0])
    full = solve(encode(s)[0])
    assert res.verdict == full.verdict
    if res.is_sat:
        col = decode_model(res.model, encode(reduced)[1]) if reduced.edges else {}
        restored = restore_coloring(trace, col, reduced)
        assert monochromatic_edges(s.edges, restored) == []


def test_restore_empty_trace_is_identity():
    _, trace = remove_pendants(build([]))
    assert restore_coloring(trace, {1: True}) == {1: True}


def test_restore_single_free_edge():
    _, trace = remove_pendants(build([(3, 4, 5)]))
    assert restore_coloring(trace, {}) == {3: False, 4: True, 5: True}


def test_restore_rejects_bad_reduced_coloring(fano):
    _, trace = remove_pendants(fano)
    with pytest.raises(ValueError):
        restore_coloring(trace, {v: True for v in fano.vertices}, fano)


@pytest.mark.parametrize("bound", [100, 500])
def test_solve_reduced_then_restore(pyth, bound):
    s = pyth(bound)
    reduced, trace = remove_pendants(s)
    doc, table = encode(reduced, bound)
    res = solve(doc)
    assert res.is_sat
    coloring = restore_coloring(trace, decode_model(res.model, table), reduced)
    assert verify(bound, coloring) == []


def test_bfs_levels_basic():
    s = build([(3, 4, 5)])
    assert bfs_levels(s, (3, 4, 5)).levels == (((3, 4, 5),),)
    s = build([(3, 4, 5), (5, 12, 13)])
    assert bfs_levels(s, (3, 4, 5)).levels == (((3, 4, 5),), ((5, 12, 13),))


def test_bfs_unreachable_and_bad_seed():
    s = build([(3, 4, 5), (6, 8, 10)])
    lv = bfs_levels(s, (3, 4, 5))
    assert lv.unreachable == ((6, 8, 10),)
    with pytest.raises(KeyError):
        bfs_levels(s, (5, 12, 13))


def _intersection_graph(s):
    g = nx.Graph()
    g.add_nodes_from(s.edges)
    for i, e in enumerate(s.edges):
        for f in s.edges[i + 1 :]:
            if set(e) & set(f):
                g.add_edge(e, f)
    return g


@pytest.mark.parametrize("bound", [300, 1000])
def test_bfs_levels_match_shortest_paths(pyth, bound):
    s, _ = remove_pendants(pyth(bound))
    lv = bfs_levels(s, s.edges[0])
    dist = nx.single_source_shortest_path_length(_intersection_graph(s), s.edges[0])
    assert lv.level_of() == dist
    assert set(lv.unreachable) == set(s.edges) - set(dist)
    levels = lv.levels
    for i in range(1, len(levels)):
        for t in levels[i]:
            assert any(set(t) & set(u) for u in levels[i - 1])
            for j in range(i - 1):
                assert not any(set(t) & set(u) for u in levels[j])


def test_level_csv(tmp_path):
    s = build([(3, 4, 5), (5, 12, 13), (13, 84, 85)])
    path = tmp_path / "levels.csv"
    write_level_csv(bfs_levels(s, (3, 4, 5)), path)
    assert path.read_text().splitlines() == ["level,count", "0,1", "1,1", "2,1"]


def test_vertex_distance():
    assert vertex_distance(build([(3, 4, 5)]), 3, 5) == 1
    s = build([(3, 4, 5), (5, 12, 13)])
    assert vertex_distance(s, 3, 13) == 2
    assert vertex_distance(s, 4, 4) == 0
    s = build([(3, 4, 5), (6, 8, 10)])
    assert vertex_distance(s, 3, 6) == math.inf
    with pytest.raises(KeyError):
        vertex_distance(s, 3, 7)


def test_vertex_distance_matches_incidence_graph(pyth):
    s = pyth(300)
    g = nx.Graph()
    for e in s.edges:
        for v in e:
            g.add_edge(("v", v), ("e", e))
    ref = nx.single_source_shortest_path_length(g, ("v", 5))
    for v in s.vertices[:60]:
        want = ref[("v", v)] // 2 if ("v", v) in ref else math.inf
        assert vertex_distance(s, 5, v) == want
