import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphband import graph
from graphband.graph import Graph, GraphFormatError, degree, laplacian, load_edge_list
from graphband.instances import random_connected_graph

from conftest import path_graph


def _write(tmp_path, text, name="g.edges"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_triangle_edge_list(tmp_path):
    g = load_edge_list(_write(tmp_path, "0 1\n1 2\n2 0\n"))
    assert g.n_vertices == 3
    assert g.n_edges == 3


def test_duplicates_collapse(tmp_path):
    g = load_edge_list(_write(tmp_path, "0 1\n1 0\n"))
    assert (g.n_vertices, g.n_edges) == (2, 1)


def test_header_allows_isolated_vertices(tmp_path):
    g = load_edge_list(_write(tmp_path, "# vertices 5\n# a comment\n0 1\n\n"))
    assert g.n_vertices == 5
    assert degree(g, 4) == 0


def test_one_based(tmp_path):
    g = load_edge_list(_write(tmp_path, "1 2\n2 3\n"), "one")
    assert g.edges.tolist() == [[0, 1], [1, 2]]


@pytest.mark.parametrize("text, exc, fragment", [
    ("0 1\n1 x\n", GraphFormatError, ":2:"),
    ("0 1 2\n", GraphFormatError, ":1:"),
    ("0 1\n3 3\n", GraphFormatError, "self-loop at vertex 3"),
    ("# vertices 3\n0 5\n", IndexError, "vertex id 5"),
])
def test_rejections(tmp_path, text, exc, fragment):
    with pytest.raises(exc, match=fragment):
        load_edge_list(_write(tmp_path, text))


def test_minnesota_counts_and_speed():
    t0 = time.perf_counter()
    g = graph.minnesota()
    elapsed = time.perf_counter() - t0
    assert g.n_vertices == 2640
    assert g.adjacency_nnz == 6604
    assert g.n_edges == 3302
    assert elapsed < 1.0


def test_minnesota_raw_has_two_components():
    g = graph.minnesota(largest_component_only=False)
    assert g.n_vertices == 2642
    labels = graph.connected_components(g)
    assert sorted(np.bincount(labels).tolist()) == [2, 2640]


def test_laplacian_small_cases(p2, triangle, star4):
    assert laplacian(p2).tolist() == [[1, -1], [-1, 1]]
    lt = laplacian(triangle)
    assert np.all(np.diag(lt) == 2)
    assert np.all(lt[~np.eye(3, dtype=bool)] == -1)
    # hand-assembled D - A for the star with center 0
    d = np.diag([3.0, 1, 1, 1])
    a = np.zeros((4, 4))
    a[0, 1:] = a[1:, 0] = 1
    np.testing.assert_array_equal(laplacian(star4), d - a)


def test_degree(triangle, star4):
    assert degree(triangle, 0) == 2
    assert degree(star4, 0) == 3
    with pytest.raises(IndexError):
        degree(star4, 4)


def test_degree_max_linear_scan(minn):
    counts = [0] * minn.n_vertices
    for u, v in minn.edges.tolist():
        counts[u] += 1
        counts[v] += 1
    assert max(degree(minn, v) for v in range(minn.n_vertices)) == max(counts)


def test_adjacency_symmetric_and_sorted():
    g = random_connected_graph(25, 3)
    for v in range(g.n_vertices):
        nb = g.neighbors(v).tolist()
        assert nb == sorted(nb)
        for w in nb:
            assert v in g.neighbors(w).tolist()


def _components_bruteforce(g):
    parent = list(range(g.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges.tolist():
        parent[find(u)] = find(v)
    return len({find(v) for v in range(g.n_vertices)})


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 30), p=st.floats(0.0, 0.4), seed=st.integers(0, 10**6))
def test_laplacian_properties(n, p, seed):
    r = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = r.random(iu.size) < p
    g = Graph.from_edges(n, list(zip(iu[keep].tolist(), ju[keep].tolist())))
    lap = laplacian(g)
    np.testing.assert_array_equal(lap, lap.T)
    np.testing.assert_allclose(lap.sum(axis=1), 0)
    ev = np.linalg.eigvalsh(lap)
    assert ev[0] >= -1e-9
    assert int(np.sum(np.abs(ev) < 1e-8)) == _components_bruteforce(g)
    assert int(graph.connected_components(g).max()) + 1 == _components_bruteforce(g)
    f = r.standard_normal(n)
    quad = sum((f[a] - f[b]) ** 2 for a, b in g.edges.tolist())
    assert f @ lap @ f == pytest.approx(quad, rel=1e-9, abs=1e-12)


def test_graph_is_immutable(triangle):
    with pytest.raises(ValueError):
        triangle.edges[0, 0] = 2
    with pytest.raises(AttributeError):
        triangle.n_vertices = 4


def test_largest_component_relabels():
    g = Graph.from_edges(6, [(0, 1), (2, 3), (3, 4), (4, 5)])
    sub, old = graph.largest_component(g)
    assert old.tolist() == [2, 3, 4, 5]
    assert sub.edges.tolist() == [[0, 1], [1, 2], [2, 3]]


def test_signal_roundtrip(tmp_path):
    x = np.array([0.5, -1.25, 3.0])
    graph.write_signal(tmp_path / "s.csv", x)
    np.testing.assert_array_equal(graph.read_full_signal(tmp_path / "s.csv", 3), x)
    (tmp_path / "bad.csv").write_text("vertex,value\n0,nan\n")
    with pytest.raises(GraphFormatError):
        graph.read_signal(tmp_path / "bad.csv")


def test_edge_list_roundtrip(tmp_path):
    g = path_graph(5)
    graph.write_edge_list(g, tmp_path / "p.edges")
    h = load_edge_list(tmp_path / "p.edges")
    assert h.fingerprint() == g.fingerprint()
