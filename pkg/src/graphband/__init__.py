"""Local-set-based reconstruction of bandlimited graph signals.

Typical use::

    from graphband import graph, spectral, localsets, reconstruction

    g = graph.minnesota()
    basis = spectral.eigendecompose(graph.laplacian(g))
    space = basis.band(0.25)
    part = localsets.greedy_one_hop(g)
    f = spectral.generate_bandlimited(space, seed=0)
    cfg = reconstruction.ReconstructionConfig(method="ipr", track_truth=f)
    report = reconstruction.ipr(space, part, f[part.sampling_set.members], cfg, graph=g)
"""
__version__ = "0.1.0"

from .graph import Graph, degree, laplacian, load_edge_list, minnesota  # noqa: E402
from .localsets import (  # noqa: E402
    LocalMeasures,
    LocalSetPartition,
    SamplingSet,
    greedy_one_hop,
    measures,
    validate_partition,
    voronoi_partition,
)
from .reconstruction import ReconstructionConfig, ReconstructionReport, ilsr, ipr, iwr  # noqa: E402
from .spectral import BandlimitedSpace, SpectralBasis, eigendecompose  # noqa: E402

__all__ = [
    "BandlimitedSpace",
    "Graph",
    "LocalMeasures",
    "LocalSetPartition",
    "ReconstructionConfig",
    "ReconstructionReport",
    "SamplingSet",
    "SpectralBasis",
    "degree",
    "eigendecompose",
    "greedy_one_hop",
    "ilsr",
    "ipr",
    "iwr",
    "laplacian",
    "load_edge_list",
    "measures",
    "minnesota",
    "validate_partition",
    "voronoi_partition",
]
