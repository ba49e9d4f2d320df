"""Time the compiled and pure-Python graph kernels side by side.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Workloads run on the Minnesota road graph: greedy one-hop claiming, a
multi-source BFS from a random 872-vertex set, shortest-path-tree measures
for every Voronoi cell, and one whole-graph tree per vertex (the inner loop
of the eigenvalue lower bound).
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from graphband import graph, localsets
from graphband._kernels import available_backends


def workloads(g, kern):
    ip, ix = g.indptr, g.indices
    src = np.random.default_rng(0).choice(g.n_vertices, 872, replace=False)
    owner = kern.multi_source_bfs(ip, ix, src)[0]
    members = np.unique(owner)
    zeros = np.zeros(g.n_vertices, dtype=np.int64)
    roots = np.arange(0, g.n_vertices, 10)
    return {
        "greedy_one_hop": lambda: kern.greedy_one_hop(ip, ix),
        "multi_source_bfs": lambda: kern.multi_source_bfs(ip, ix, src),
        "cell_measures": lambda: [kern.spt_measures(ip, ix, owner, u, u) for u in members.tolist()],
        "whole_graph_trees/10": lambda: [kern.spt_measures(ip, ix, zeros, 0, r) for r in roots.tolist()],
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    g = graph.minnesota()
    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels are not built; only the pure-Python backend is timed")
    # both backends must agree before timing means anything
    ref = localsets.greedy_one_hop(g).owner
    for kern in backends.values():
        np.testing.assert_array_equal(kern.greedy_one_hop(g.indptr, g.indices), ref)
    results = {}
    for name, kern in sorted(backends.items()):
        for label, fn in workloads(g, kern).items():
            t = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            results[(label, name)] = t
    labels = list(workloads(g, backends["python"]))
    names = sorted(backends)
    print(f"{'workload':<24}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label in labels:
        row = f"{label:<24}" + "".join(f"{results[(label, n)] * 1e3:>10.2f}ms" for n in names)
        if len(names) > 1:
            row += f"{results[(label, 'python')] / results[(label, 'cython')]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
