"""Random test instances: connected graphs, partitions and bandlimited truths."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, laplacian
from .localsets import LocalMeasures, LocalSetPartition, measures, random_partition, random_sampling_set, voronoi_partition
from .spectral import BandlimitedSpace, SpectralBasis, eigendecompose


def random_connected_graph(n: int, seed, extra_edge_prob: float | None = None) -> Graph:
    """Random spanning tree plus independent extra edges.

    The tree attaches vertex ``i`` to a uniform earlier vertex after a random
    relabelling, so every output is connected.
    """
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    edges = [(int(perm[i]), int(perm[rng.integers(i)])) for i in range(1, n)]
    p = rng.uniform(0.05, 0.3) if extra_edge_prob is None else extra_edge_prob
    iu, ju = np.triu_indices(n, 1)
    mask = rng.random(iu.shape[0]) < p
    edges += list(zip(iu[mask].tolist(), ju[mask].tolist()))
    return Graph.from_edges(n, edges)


@dataclass(frozen=True, eq=False)
class Instance:
    graph: Graph
    basis: SpectralBasis
    partition: LocalSetPartition
    local: LocalMeasures
    space: BandlimitedSpace

    @property
    def omega(self) -> float:
        return self.space.cutoff


def random_instance(seed, n_range=(6, 30), fraction: float = 0.9, q_source: str = "tilde") -> Instance:
    """Connected graph, random valid partition and cutoff ``fraction / Q^2``.

    Half the partitions grow randomly from seeds, half are Voronoi cells of a
    random sampling set. When ``Q`` is zero (every cell a singleton) the cutoff
    is the largest eigenvalue, i.e. the full band.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    g = random_connected_graph(n, rng)
    k = int(rng.integers(1, max(2, n // 2) + 1))
    if rng.random() < 0.5:
        p = random_partition(g, k, rng)
    else:
        p = voronoi_partition(g, random_sampling_set(g, k, rng))
    local = measures(g, p)
    basis = eigendecompose(laplacian(g))
    q = local.Q_tilde_max if q_source == "tilde" else local.Q_max
    omega = fraction / q**2 if q > 0 else float(basis.eigenvalues[-1])
    return Instance(g, basis, p, local, basis.band(omega))
