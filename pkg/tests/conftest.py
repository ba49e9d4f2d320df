import numpy as np
import pytest

from graphband import graph, spectral
from graphband._kernels import available_backends
from graphband.graph import Graph


@pytest.fixture
def triangle():
    return Graph.from_edges(3, [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def p2():
    return Graph.from_edges(2, [(0, 1)])


@pytest.fixture
def star4():
    return Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def cycle4():
    return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


@pytest.fixture(scope="session")
def minn():
    return graph.minnesota()


@pytest.fixture(scope="session")
def minn_basis(minn):
    return spectral.eigendecompose(graph.laplacian(minn))


@pytest.fixture(params=sorted(available_backends()))
def kernels(request):
    return available_backends()[request.param]


def to_networkx(g):
    import networkx as nx

    h = nx.Graph()
    h.add_nodes_from(range(g.n_vertices))
    h.add_edges_from(g.edges.tolist())
    return h


def rng(seed=0):
    return np.random.default_rng(seed)


@pytest.fixture(scope="session")
def minn_onehop(minn, minn_basis):
    """One-hop partition of Minnesota at cutoff 0.25 with a unit-norm truth."""
    from graphband import localsets

    p = localsets.greedy_one_hop(minn)
    space = minn_basis.band(0.25)
    truth = spectral.generate_bandlimited(space, 0)
    return p, space, truth, localsets.measures(minn, p)


#: (number, description, passed) for each acceptance criterion run this session.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, text, ok in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {text}")
