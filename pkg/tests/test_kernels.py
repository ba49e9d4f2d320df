"""Compiled and pure-Python kernels must agree, and both must match brute force."""
import networkx as nx
import numpy as np
import pytest

from graphband import _kernels
from graphband._kernels import _pykernels, available_backends
from graphband.instances import random_connected_graph

from conftest import to_networkx


def test_backend_selected():
    assert _kernels.BACKEND in available_backends()


def test_spt_depths_match_networkx(kernels):
    for seed in range(20):
        g = random_connected_graph(20, seed)
        labels = np.zeros(g.n_vertices, dtype=np.int64)
        order, parent, depth = kernels.spt(g.indptr, g.indices, labels, 0, 0)
        ref = nx.single_source_shortest_path_length(to_networkx(g), 0)
        assert dict(zip(order.tolist(), depth.tolist())) == ref
        # canonical parent: smallest-id neighbor one level closer
        d = dict(zip(order.tolist(), depth.tolist()))
        for v, p in zip(order.tolist(), parent.tolist()):
            if v == 0:
                assert p == -1
                continue
            assert p == min(w for w in g.neighbors(v).tolist() if d[w] == d[v] - 1)


def test_spt_respects_labels(kernels):
    g = random_connected_graph(15, 1)
    labels = np.where(np.arange(15) % 2 == 0, 7, 3).astype(np.int64)
    order, _, _ = kernels.spt(g.indptr, g.indices, labels, 7, 0)
    assert all(labels[v] == 7 for v in order.tolist())


def test_greedy_and_voronoi_cover(kernels):
    g = random_connected_graph(40, 5)
    owner = kernels.greedy_one_hop(g.indptr, g.indices)
    assert (owner >= 0).all()
    for v, o in enumerate(owner.tolist()):
        assert v == o or o in g.neighbors(v).tolist()
    owner, dist, parent = kernels.multi_source_bfs(g.indptr, g.indices, np.array([3, 17, 30]))
    assert (dist >= 0).all()


@pytest.mark.skipif("cython" not in available_backends(), reason="compiled kernels not built")
@pytest.mark.parametrize("seed", range(25))
def test_backends_agree(seed):
    c = available_backends()["cython"]
    py = _pykernels
    g = random_connected_graph(int(10 + seed * 3), seed)
    r = np.random.default_rng(seed)
    labels = r.integers(0, 3, g.n_vertices).astype(np.int64)
    root = int(r.integers(g.n_vertices))
    for a, b in zip(c.spt(g.indptr, g.indices, labels, labels[root], root),
                    py.spt(g.indptr, g.indices, labels, labels[root], root)):
        np.testing.assert_array_equal(a, b)
    assert c.spt_measures(g.indptr, g.indices, labels, labels[root], root) == \
        py.spt_measures(g.indptr, g.indices, labels, labels[root], root)
    np.testing.assert_array_equal(c.greedy_one_hop(g.indptr, g.indices), py.greedy_one_hop(g.indptr, g.indices))
    src = r.choice(g.n_vertices, size=max(1, g.n_vertices // 5), replace=False)
    for a, b in zip(c.multi_source_bfs(g.indptr, g.indices, src), py.multi_source_bfs(g.indptr, g.indices, src)):
        np.testing.assert_array_equal(a, b)


@pytest.mark.skipif("cython" not in available_backends(), reason="compiled kernels not built")
def test_backends_agree_on_minnesota(minn):
    c = available_backends()["cython"]
    np.testing.assert_array_equal(c.greedy_one_hop(minn.indptr, minn.indices),
                                  _pykernels.greedy_one_hop(minn.indptr, minn.indices))
    src = np.random.default_rng(0).choice(minn.n_vertices, 872, replace=False)
    for a, b in zip(c.multi_source_bfs(minn.indptr, minn.indices, src),
                    _pykernels.multi_source_bfs(minn.indptr, minn.indices, src)):
        np.testing.assert_array_equal(a, b)


def test_pure_python_override():
    import os
    import subprocess
    import sys

    env = dict(os.environ, GRAPHBAND_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import graphband._kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_benchmark_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--repeat", "1"])
    assert "multi_source_bfs" in capsys.readouterr().out
