import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nbwalk.errors import (
    AttemptsExhausted,
    BadVertexId,
    DuplicateEdge,
    EdgeListFormatError,
    Infeasible,
    NotRegular,
    OddDegreeSum,
    SelfLoop,
    UnknownName,
)
from nbwalk.graph import (
    NAMED_GRAPHS,
    GraphGenSpec,
    bfs_distances,
    build_from_edge_list,
    far_vertex_set,
    format_edge_list,
    girth,
    named_graph,
    pairwise_distance,
    parse_edge_list,
    random_regular,
    read_edge_list,
    write_edge_list,
)

from oracles import floyd_warshall, min_cycle_bruteforce

small_specs = st.builds(
    lambda n2, d, seed: GraphGenSpec(n2 * 2, d, seed=seed),
    st.integers(3, 6),
    st.integers(3, 4),
    st.integers(0, 2**32),
)


def test_k4_from_all_pairs():
    g = build_from_edge_list(4, itertools.combinations(range(4), 2))
    assert (g.n, g.d) == (4, 3)


def test_path_is_not_regular():
    with pytest.raises(NotRegular):
        build_from_edge_list(3, [(0, 1), (1, 2)])


def test_petersen_by_degree_count(petersen):
    deg = np.zeros(10, dtype=int)
    for u, v in petersen.edges():
        deg[u] += 1
        deg[v] += 1
    assert set(deg) == {3}
    assert len(petersen.edges()) == 15


@pytest.mark.parametrize(
    "edges, exc",
    [
        ([(0, 0), (1, 2)], SelfLoop),
        ([(0, 1), (1, 0)], DuplicateEdge),
        ([(0, 5)], BadVertexId),
        ([(0, -1)], BadVertexId),
    ],
)
def test_build_rejects(edges, exc):
    with pytest.raises(exc):
        build_from_edge_list(4, edges)


@pytest.mark.parametrize("name, n", [("k4", 4), ("petersen", 10), ("k33", 6), ("q3", 8)])
def test_named(name, n):
    g = named_graph(name)
    assert (g.n, g.d) == (n, 3)
    assert np.all(np.diff(g.neighbors, axis=1) > 0)


def test_unknown_name():
    with pytest.raises(UnknownName):
        named_graph("c5")


def test_odd_degree_sum():
    with pytest.raises(OddDegreeSum):
        random_regular(GraphGenSpec(3, 3))


def test_random_regular_deterministic():
    a = random_regular(GraphGenSpec(10, 3, seed=7))
    b = random_regular(GraphGenSpec(10, 3, seed=7))
    assert a.edges() == b.edges()


def test_min_girth_constraint():
    g = random_regular(GraphGenSpec(50, 3, min_girth=6, seed=1))
    assert girth(g) >= 6
    assert min_cycle_bruteforce(g.n, g.edges()) >= 6


def test_attempts_exhausted():
    # K4 is the only 3-regular graph on 4 vertices and has girth 3
    with pytest.raises(AttemptsExhausted):
        random_regular(GraphGenSpec(4, 3, min_girth=4, max_attempts=20))


@pytest.mark.parametrize("name, expected", [("k4", 3), ("petersen", 5), ("k33", 4), ("q3", 4)])
def test_girth_named(name, expected):
    g = named_graph(name)
    assert girth(g) == expected
    assert min_cycle_bruteforce(g.n, g.edges()) == expected


def test_girth_of_cycle_and_disjoint_triangles():
    c7 = build_from_edge_list(7, [(i, (i + 1) % 7) for i in range(7)])
    assert girth(c7) == 7
    two = build_from_edge_list(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert girth(two) == 3
    assert pairwise_distance(two, 0, 4) == math.inf


@settings(max_examples=40, deadline=None)
@given(small_specs)
def test_girth_matches_cycle_enumeration(spec):
    g = random_regular(spec)
    assert girth(g) == min_cycle_bruteforce(g.n, g.edges())


@settings(max_examples=40, deadline=None)
@given(small_specs)
def test_generated_graph_is_simple_regular(spec):
    g = random_regular(spec)
    a = np.zeros((g.n, g.n), dtype=int)
    for u in range(g.n):
        for v in g.neighbors[u]:
            a[u, v] += 1
    assert np.array_equal(a, a.T)
    assert a.max() == 1 and np.trace(a) == 0
    assert set(a.sum(axis=1)) == {spec.d}


@settings(max_examples=30, deadline=None)
@given(small_specs)
def test_distances_match_floyd_warshall_and_form_a_metric(spec):
    g = random_regular(spec)
    fw = floyd_warshall(g.n, g.edges())
    for u in range(g.n):
        for v in range(g.n):
            assert pairwise_distance(g, u, v) == fw[u][v]
    for u, v, w in itertools.product(range(g.n), repeat=3):
        duv = pairwise_distance(g, u, v)
        assert duv == pairwise_distance(g, v, u)
        assert duv <= pairwise_distance(g, u, w) + pairwise_distance(g, w, v)


def test_distance_basics(k4, petersen):
    assert pairwise_distance(petersen, 3, 3) == 0
    assert pairwise_distance(k4, 0, 3) == 1
    assert pairwise_distance(petersen, 0, 2) == 2
    with pytest.raises(BadVertexId):
        pairwise_distance(k4, 0, 4)
    assert list(bfs_distances(k4, 0)) == [0, 1, 1, 1]


def test_far_vertex_set(k4, petersen):
    assert far_vertex_set(petersen, 1, 3, anchor=4) == [4]
    with pytest.raises(Infeasible):
        far_vertex_set(k4, 2, 2)
    pick = far_vertex_set(petersen, 2, 2, anchor=0)
    assert pick[0] == 0
    assert pairwise_distance(petersen, *pick) >= 2


@settings(max_examples=30, deadline=None)
@given(small_specs, st.integers(1, 4), st.integers(1, 3))
def test_far_vertex_set_separation(spec, r, dist):
    g = random_regular(spec)
    try:
        pick = far_vertex_set(g, r, dist)
    except Infeasible:
        return
    assert len(pick) == r and pick[0] == 0
    for a, b in itertools.combinations(pick, 2):
        assert pairwise_distance(g, a, b) >= dist


def test_edge_list_roundtrip(tmp_path, petersen):
    text = format_edge_list(petersen)
    lines = text.splitlines()
    assert lines[0] == "10 3"
    assert len(lines) == 16
    assert parse_edge_list(text) == petersen
    path = tmp_path / "g.txt"
    write_edge_list(petersen, path)
    assert read_edge_list(path) == petersen


@pytest.mark.parametrize(
    "text",
    [
        "4 3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3",  # missing final newline
        "4 3\n0 1\n0 2\n0 3\n1 2\n1 3\n3 2\n",  # u > v
        "4 3\n0 1\n0 2\n0 3\n1 2\n1 3\n",  # too few edges
        "4 2\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n",  # header degree wrong
        "4 3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 x\n",
        "",
    ],
)
def test_edge_list_rejects(text):
    with pytest.raises((EdgeListFormatError, NotRegular)):
        parse_edge_list(text)


@pytest.mark.parametrize("name", NAMED_GRAPHS)
def test_reverse_edge_involution(name):
    g = named_graph(name)
    rev = g.reverse
    assert np.array_equal(rev[rev], np.arange(g.n * g.d))
    tails = np.repeat(np.arange(g.n), g.d)
    assert np.array_equal(g.head[rev], tails)
