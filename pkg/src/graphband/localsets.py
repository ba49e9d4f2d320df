"""Sampling sets, local-set partitions and their local measures.

A local-set partition assigns every vertex to exactly one sampled vertex
(its owner) such that each cell contains its owner and induces a connected
subgraph. Per cell we measure

* ``K``: the largest subtree hanging off the owner in the cell's canonical
  shortest-path tree (the maximal multiple number),
* ``K_tilde = |cell| - deg_cell(owner)``, a cheap upper bound on ``K``,
* ``R``: the largest distance from the owner inside the cell.

Shortest-path trees are BFS trees where each vertex takes the smallest-id
parent among its neighbors one level closer to the root.
"""
from __future__ import annotations

import csv
import itertools
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import _kernels
from .graph import Graph, GraphFormatError

#: Guard band for the strict contraction condition ``omega < 1 / q**2``.
CONDITION_GUARD = 1e-12


class PartitionError(ValueError):
    pass


class CoverageError(PartitionError):
    """A vertex cannot be reached from any sampled vertex."""


class GuaranteeVoidWarning(UserWarning):
    """The cutoff violates the contraction condition; bounds do not apply."""


@dataclass(frozen=True, eq=False)
class SamplingSet:
    """Sorted, nonempty set of sampled vertex ids.

    Restricting a signal with :meth:`sample` is the downsampling operator.
    """

    members: np.ndarray

    def __post_init__(self):
        m = np.unique(np.asarray(self.members, dtype=np.int64))
        if m.size == 0:
            raise ValueError("sampling set must be nonempty")
        if m[0] < 0:
            raise IndexError(f"negative vertex id {m[0]}")
        m.setflags(write=False)
        object.__setattr__(self, "members", m)

    def __len__(self) -> int:
        return int(self.members.shape[0])

    def __iter__(self):
        return iter(self.members.tolist())

    def __contains__(self, v) -> bool:
        i = np.searchsorted(self.members, v)
        return bool(i < len(self.members) and self.members[i] == v)

    def check(self, g: Graph) -> None:
        if self.members[-1] >= g.n_vertices:
            raise IndexError(f"vertex id {self.members[-1]} out of range for {g.n_vertices} vertices")

    def sample(self, f) -> np.ndarray:
        return np.asarray(f, dtype=float)[self.members]

    def embed(self, values, n: int) -> np.ndarray:
        """Zero-filled length-``n`` signal carrying ``values`` on the members."""
        out = np.zeros(n)
        out[self.members] = values
        return out


@dataclass(frozen=True, eq=False)
class LocalSetPartition:
    """A family of vertex cells keyed by their sampled owner.

    Construction does not enforce the local-set axioms so that invalid inputs
    can be reported by :func:`validate_partition`; the algorithms require a
    valid partition and check it.
    """

    n_vertices: int
    cells: dict = field(repr=False)

    @classmethod
    def from_owner(cls, owner) -> LocalSetPartition:
        owner = np.asarray(owner, dtype=np.int64)
        if owner.size and owner.min() < 0:
            raise PartitionError(f"vertex {int(np.argmin(owner))} has no owner")
        order = np.argsort(owner, kind="stable")
        keys, starts = np.unique(owner[order], return_index=True)
        groups = np.split(order, starts[1:])
        return cls(len(owner), {int(k): np.sort(v) for k, v in zip(keys, groups)})

    @classmethod
    def from_cells(cls, n_vertices: int, cells) -> LocalSetPartition:
        return cls(int(n_vertices), {int(u): np.unique(np.asarray(list(c), dtype=np.int64))
                                     for u, c in dict(cells).items()})

    @cached_property
    def sampling_set(self) -> SamplingSet:
        return SamplingSet(np.array(sorted(self.cells), dtype=np.int64))

    @cached_property
    def owner(self) -> np.ndarray:
        """``cell_of`` as an array; -1 for uncovered vertices.

        Only meaningful for disjoint cells.
        """
        out = np.full(self.n_vertices, -1, dtype=np.int64)
        for u, c in self.cells.items():
            out[c] = u
        out.setflags(write=False)
        return out

    @cached_property
    def sizes(self) -> np.ndarray:
        """Cell sizes aligned with ``sampling_set.members``."""
        return np.array([len(self.cells[u]) for u in self.sampling_set], dtype=np.int64)

    def cell(self, u: int) -> np.ndarray:
        return self.cells[u]

    def indicator_matrix(self) -> np.ndarray:
        """``n x |S|`` 0/1 matrix whose columns are the cell indicators."""
        col = np.searchsorted(self.sampling_set.members, self.owner)
        m = np.zeros((self.n_vertices, len(self.sampling_set)))
        m[np.arange(self.n_vertices), col] = 1.0
        return m


# -- validation ---------------------------------------------------------------

class Violation(NamedTuple):
    kind: str  # disjointness | cover | membership | connectivity | range
    cell: int | None
    vertices: tuple


@dataclass
class ValidationReport:
    violations: list

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid

    def describe(self) -> str:
        if self.valid:
            return "valid partition"
        return "\n".join(f"{v.kind}: cell {v.cell}: vertices {list(v.vertices)}" for v in self.violations)


def validate_partition(g: Graph, p: LocalSetPartition) -> ValidationReport:
    """List every violated local-set axiom; an empty report means valid."""
    out = []
    n = g.n_vertices
    seen = np.zeros(n, dtype=np.int64)
    for u, c in sorted(p.cells.items()):
        bad = c[(c < 0) | (c >= n)]
        if bad.size or not 0 <= u < n:
            out.append(Violation("range", u, tuple(bad.tolist()) or (u,)))
            continue
        seen[c] += 1
        if u not in set(c.tolist()):
            out.append(Violation("membership", u, (u,)))
    overlap = np.flatnonzero(seen > 1)
    if overlap.size:
        for u, c in sorted(p.cells.items()):
            hit = np.intersect1d(c, overlap)
            if hit.size:
                out.append(Violation("disjointness", u, tuple(hit.tolist())))
    missing = np.flatnonzero(seen == 0)
    if missing.size:
        out.append(Violation("cover", None, tuple(missing.tolist())))
    for u, c in sorted(p.cells.items()):
        if not 0 <= u < n or c.size == 0 or c.min() < 0 or c.max() >= n:
            continue
        labels = np.full(n, -1, dtype=np.int64)
        labels[c] = 0
        start = u if labels[u] == 0 else int(c[0])
        order, _, _ = _kernels.spt(g.indptr, g.indices, labels, 0, start)
        if len(order) != len(c):
            unreached = np.setdiff1d(c, order)
            out.append(Violation("connectivity", u, tuple(unreached.tolist())))
    return ValidationReport(out)


def require_valid(g: Graph, p: LocalSetPartition) -> None:
    report = validate_partition(g, p)
    if not report.valid:
        raise PartitionError("invalid local-set partition:\n" + report.describe())


# -- per-cell measures ----------------------------------------------------------

@dataclass(frozen=True)
class ShortestPathTree:
    root: int
    parent: dict
    depth: dict

    @property
    def height(self) -> int:
        return max(self.depth.values())

    def children(self, v: int) -> list:
        return sorted(w for w, p in self.parent.items() if p == v)


def _cell_labels(g: Graph, cell, root: int) -> np.ndarray:
    cell = np.unique(np.asarray(list(cell) if not isinstance(cell, np.ndarray) else cell, dtype=np.int64))
    if root not in set(cell.tolist()):
        raise PartitionError(f"root {root} is not in the cell")
    labels = np.full(g.n_vertices, -1, dtype=np.int64)
    labels[cell] = 0
    return labels


def shortest_path_tree(g: Graph, cell, root: int) -> ShortestPathTree:
    """Canonical BFS tree of the subgraph induced by ``cell``, rooted at ``root``.

    Raises:
        PartitionError: the induced subgraph is disconnected or ``root`` is
            not in ``cell``.
    """
    labels = _cell_labels(g, cell, root)
    order, parent, depth = _kernels.spt(g.indptr, g.indices, labels, 0, root)
    if len(order) != int((labels == 0).sum()):
        raise PartitionError(f"cell rooted at {root} induces a disconnected subgraph")
    o = order.tolist()
    return ShortestPathTree(root, dict(zip(o, parent.tolist())), dict(zip(o, depth.tolist())))


def _kr(g: Graph, labels: np.ndarray, label: int, root: int, size: int) -> tuple[int, int]:
    k, r, reached = _kernels.spt_measures(g.indptr, g.indices, labels, label, root)
    if reached != size:
        raise PartitionError(f"cell rooted at {root} induces a disconnected subgraph")
    return k, r


def maximal_multiple_number(g: Graph, cell, root: int) -> int:
    labels = _cell_labels(g, cell, root)
    return _kr(g, labels, 0, root, int((labels == 0).sum()))[0]


def radius(g: Graph, cell, root: int) -> int:
    labels = _cell_labels(g, cell, root)
    return _kr(g, labels, 0, root, int((labels == 0).sum()))[1]


def k_tilde(g: Graph, cell, root: int) -> int:
    """``|cell| - deg_cell(root)``; 0 for a singleton cell."""
    labels = _cell_labels(g, cell, root)
    size = int((labels == 0).sum())
    if size == 1:
        return 0
    return size - int((labels[g.neighbors(root)] == 0).sum())


def k_range_over_trees(g: Graph, cell, root: int, max_size: int = 12) -> tuple[int, int]:
    """Min and max of ``K`` over every shortest-path tree of a small cell.

    Enumerates all parent choices among equal-depth candidates, so it is
    exponential; refused above ``max_size`` vertices.
    """
    tree = shortest_path_tree(g, cell, root)
    if len(tree.depth) > max_size:
        raise ValueError(f"cell has {len(tree.depth)} vertices; enumeration limited to {max_size}")
    depth = tree.depth
    verts = [v for v in depth if v != root]
    if not verts:
        return 0, 0
    cands = [[w for w in g.neighbors(v).tolist() if depth.get(w, -2) == depth[v] - 1] for v in verts]
    best_lo, best_hi = math.inf, -1
    for choice in itertools.product(*cands):
        parent = dict(zip(verts, choice))
        # every vertex's branch is the depth-1 ancestor it descends from
        branch = {}
        for v in sorted(verts, key=depth.__getitem__):
            p = parent[v]
            branch[v] = v if p == root else branch[p]
        counts = {}
        for b in branch.values():
            counts[b] = counts.get(b, 0) + 1
        k = max(counts.values())
        best_lo, best_hi = min(best_lo, k), max(best_hi, k)
    return int(best_lo), int(best_hi)


@dataclass(frozen=True, eq=False)
class LocalMeasures:
    """Per-cell measures aligned with ``members`` plus the global maxima."""

    members: np.ndarray
    size: np.ndarray
    K: np.ndarray
    K_tilde: np.ndarray
    R: np.ndarray

    @property
    def N_max(self) -> int:
        return int(self.size.max())

    @property
    def Q_max(self) -> float:
        return float(np.sqrt(np.max(self.K * self.R)))

    @property
    def Q_tilde_max(self) -> float:
        return float(np.sqrt(np.max(self.K_tilde * self.R)))

    def argmax_Q(self) -> int:
        """Sampled vertex attaining ``Q_max`` (smallest id on ties)."""
        return int(self.members[int(np.argmax(self.K * self.R))])

    def as_dict(self) -> dict:
        return {
            "n_cells": int(len(self.members)),
            "N_max": self.N_max,
            "Q_max": self.Q_max,
            "Q_tilde_max": self.Q_tilde_max,
            "K_max": int(self.K.max()),
            "K_tilde_max": int(self.K_tilde.max()),
            "R_max": int(self.R.max()),
        }


def measures(g: Graph, p: LocalSetPartition) -> LocalMeasures:
    require_valid(g, p)
    owner = np.ascontiguousarray(p.owner)
    members = p.sampling_set.members
    sizes = p.sizes
    ks, rs, kts = [], [], []
    deg_in = np.zeros(g.n_vertices, dtype=np.int64)
    # degree of each owner inside its own cell
    src = np.repeat(np.arange(g.n_vertices), g.degrees())
    same = owner[src] == owner[g.indices]
    np.add.at(deg_in, src[same], 1)
    for u, size in zip(members.tolist(), sizes.tolist()):
        if size == 1:
            ks.append(0)
            rs.append(0)
            kts.append(0)
            continue
        k, r = _kr(g, owner, u, u, size)
        ks.append(k)
        rs.append(r)
        kts.append(size - int(deg_in[u]))
    arr = lambda x: np.asarray(x, dtype=np.int64)  # noqa: E731
    return LocalMeasures(members, sizes, arr(ks), arr(kts), arr(rs))


class GammaValue(NamedTuple):
    gamma: float
    guaranteed: bool


def condition_holds(q_max: float, omega: float) -> bool:
    """Strict contraction condition ``omega < 1 / q_max**2`` with a guard band."""
    if q_max == 0:
        return math.isfinite(omega)
    return omega < 1.0 / q_max**2 - CONDITION_GUARD


def gamma(q_max: float, omega: float, warn: bool = True) -> GammaValue:
    """Decay factor ``q_max * sqrt(omega)``; flagged void when the condition fails."""
    if omega < 0:
        raise ValueError("omega must be nonnegative")
    g = 0.0 if q_max == 0 else float(q_max) * math.sqrt(omega)
    ok = condition_holds(q_max, omega)
    if not ok and warn:
        warnings.warn(
            f"omega={omega:g} violates omega < 1/Q^2 for Q={q_max:g} (gamma={g:.4g}); "
            "convergence guarantee void",
            GuaranteeVoidWarning,
            stacklevel=2,
        )
    return GammaValue(g, ok)


# -- sampling-set builders ------------------------------------------------------

def greedy_one_hop(g: Graph) -> LocalSetPartition:
    """One-hop sampling set and local sets by repeated max-degree claiming."""
    return LocalSetPartition.from_owner(_kernels.greedy_one_hop(g.indptr, g.indices))


def voronoi_partition(g: Graph, s: SamplingSet) -> LocalSetPartition:
    """Assign every vertex to a nearest sampled vertex via multi-source BFS.

    Vertices inherit the cell of their BFS parent, which keeps cells connected;
    equal-distance ties go to the smaller sampled id.

    Raises:
        CoverageError: some vertex is unreachable from every sampled vertex.
    """
    s.check(g)
    owner, _, _ = _kernels.multi_source_bfs(g.indptr, g.indices, s.members)
    lost = np.flatnonzero(owner < 0)
    if lost.size:
        raise CoverageError(f"vertex {int(lost[0])} is unreachable from the sampling set "
                            f"({lost.size} unreachable in total)")
    return LocalSetPartition.from_owner(owner)


def random_sampling_set(g: Graph, k: int, seed) -> SamplingSet:
    """``k`` distinct vertices drawn uniformly without replacement."""
    if not 1 <= k <= g.n_vertices:
        raise ValueError(f"k must be in [1, {g.n_vertices}], got {k}")
    rng = np.random.default_rng(seed)
    return SamplingSet(rng.choice(g.n_vertices, size=k, replace=False))


def random_partition(g: Graph, k: int, seed) -> LocalSetPartition:
    """Random valid partition of a connected graph into ``k`` cells.

    Cells grow from random seeds by attaching, one at a time, a random
    unassigned vertex adjacent to an assigned one. Unlike the Voronoi
    assignment this produces elongated and irregular cells.
    """
    rng = np.random.default_rng(seed)
    n = g.n_vertices
    owner = np.full(n, -1, dtype=np.int64)
    seeds = rng.choice(n, size=k, replace=False)
    owner[seeds] = seeds
    frontier = {}
    for s in seeds.tolist():
        for w in g.neighbors(s).tolist():
            if owner[w] == -1:
                frontier.setdefault(w, []).append(s)
    while frontier:
        keys = sorted(frontier)
        v = keys[int(rng.integers(len(keys)))]
        opts = frontier.pop(v)
        o = int(owner[opts[int(rng.integers(len(opts)))]])
        owner[v] = o
        for w in g.neighbors(v).tolist():
            if owner[w] == -1:
                frontier.setdefault(w, []).append(v)
    if (owner < 0).any():
        raise CoverageError("graph is disconnected; random partition does not cover it")
    return LocalSetPartition.from_owner(owner)


# -- files ------------------------------------------------------------------------

def write_partition(p: LocalSetPartition, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["vertex", "owner"])
        for v, o in enumerate(p.owner.tolist()):
            w.writerow([v, o])


def read_partition(path, n_vertices: int | None = None) -> LocalSetPartition:
    rows = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["vertex", "owner"]:
            raise GraphFormatError(f"{path}: expected header 'vertex,owner'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append((int(row[0]), int(row[1])))
            except (ValueError, IndexError):
                raise GraphFormatError(f"{path}:{lineno}: malformed row {row!r}") from None
    n = n_vertices if n_vertices is not None else 1 + max((max(r) for r in rows), default=-1)
    cells = {}
    for v, o in rows:
        cells.setdefault(o, []).append(v)
    return LocalSetPartition.from_cells(n, cells)


def write_sampling_set(s: SamplingSet, path) -> None:
    Path(path).write_text("".join(f"{v}\n" for v in s), encoding="utf-8")


def read_sampling_set(path) -> SamplingSet:
    ids = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            ids.append(int(line))
        except ValueError:
            raise GraphFormatError(f"{path}:{lineno}: expected a vertex id, got {line!r}") from None
    return SamplingSet(np.asarray(ids, dtype=np.int64))
