"""Undirected simple graphs, edge-list ingestion and the combinatorial Laplacian."""
from __future__ import annotations

import csv
import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

_HEADER = re.compile(r"^#\s*vertices\s+(\d+)\s*$", re.IGNORECASE)

#: Dense Laplacians are assembled only up to this many vertices.
DENSE_LIMIT = 5000


class GraphFormatError(ValueError):
    """Raised for malformed edge lists and signal files."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected, unweighted simple graph on vertices ``0..n_vertices-1``.

    ``edges`` holds each undirected edge once as a row ``(u, v)`` with
    ``u < v``, sorted lexicographically. Adjacency is kept in CSR form with
    sorted neighbor lists. Instances are immutable.
    """

    n_vertices: int
    edges: np.ndarray
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(cls, n_vertices: int, edges) -> Graph:
        n = int(n_vertices)
        if n < 0:
            raise ValueError("n_vertices must be nonnegative")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if e.size:
            loops = e[:, 0] == e[:, 1]
            if loops.any():
                v = int(e[loops][0, 0])
                raise ValueError(f"self-loop at vertex {v}")
            if e.min() < 0 or e.max() >= n:
                bad = int(e[(e < 0) | (e >= n)][0])
                raise IndexError(f"vertex id {bad} out of range for {n} vertices")
            e = np.sort(e, axis=1)
            e = np.unique(e, axis=0)
        both = np.concatenate([e, e[:, ::-1]]) if e.size else e
        order = np.lexsort((both[:, 1], both[:, 0])) if e.size else np.array([], dtype=np.int64)
        both = both[order]
        counts = np.bincount(both[:, 0], minlength=n) if e.size else np.zeros(n, dtype=np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = both[:, 1].astype(np.int64) if e.size else np.zeros(0, dtype=np.int64)
        return cls(n, _readonly(e), _readonly(indptr), _readonly(np.ascontiguousarray(indices)))

    @property
    def n_edges(self) -> int:
        """Number of undirected edges."""
        return int(self.edges.shape[0])

    @property
    def adjacency_nnz(self) -> int:
        """Nonzeros of the adjacency matrix, i.e. each edge counted in both directions."""
        return 2 * self.n_edges

    def neighbors(self, v: int) -> np.ndarray:
        self._check(v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n_vertices:
            raise IndexError(f"vertex id {v} out of range for {self.n_vertices} vertices")

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n_vertices, self.n_vertices))
        if self.n_edges:
            a[self.edges[:, 0], self.edges[:, 1]] = 1.0
            a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return a

    def induced_subgraph(self, vertices) -> tuple[Graph, np.ndarray]:
        """Subgraph on ``vertices`` relabelled ``0..k-1`` in ascending id order.

        Returns the subgraph and the array mapping new ids to old ids.
        """
        keep = np.unique(np.asarray(vertices, dtype=np.int64))
        new_id = np.full(self.n_vertices, -1, dtype=np.int64)
        new_id[keep] = np.arange(len(keep))
        e = new_id[self.edges] if self.n_edges else self.edges
        e = e[(e >= 0).all(axis=1)] if self.n_edges else e
        return Graph.from_edges(len(keep), e), keep

    def fingerprint(self) -> str:
        """SHA-256 over the vertex count and canonical edge array."""
        h = hashlib.sha256()
        h.update(str(self.n_vertices).encode())
        h.update(np.ascontiguousarray(self.edges, dtype="<i8").tobytes())
        return h.hexdigest()


def degree(g: Graph, v: int) -> int:
    """Number of neighbors of ``v``."""
    g._check(v)
    return int(g.indptr[v + 1] - g.indptr[v])


def laplacian(g: Graph) -> np.ndarray:
    """Dense combinatorial Laplacian ``D - A``."""
    if g.n_vertices > DENSE_LIMIT:
        raise ValueError(f"dense Laplacian limited to {DENSE_LIMIT} vertices, got {g.n_vertices}")
    lap = -g.adjacency_matrix()
    lap[np.diag_indices(g.n_vertices)] = g.degrees()
    return lap


def connected_components(g: Graph) -> np.ndarray:
    """Component label per vertex; labels are numbered by smallest member id."""
    from ._kernels import multi_source_bfs

    labels = np.full(g.n_vertices, -1, dtype=np.int64)
    comp = 0
    for v in range(g.n_vertices):
        if labels[v] != -1:
            continue
        owner, _, _ = multi_source_bfs(g.indptr, g.indices, [v])
        labels[owner == v] = comp
        comp += 1
    return labels


def is_connected(g: Graph) -> bool:
    return g.n_vertices > 0 and int(connected_components(g).max()) == 0


def largest_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the largest connected component (smallest label on ties)."""
    labels = connected_components(g)
    sizes = np.bincount(labels)
    return g.induced_subgraph(np.flatnonzero(labels == int(np.argmax(sizes))))


def parse_edge_list(lines, source: str = "<edges>", one_based: bool = False) -> Graph:
    n_declared = None
    pairs = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER.match(line)
            if m:
                n_declared = int(m.group(1))
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError(f"{source}:{lineno}: expected two vertex ids, got {line!r}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(f"{source}:{lineno}: non-integer vertex id in {line!r}") from None
        if one_based:
            u, v = u - 1, v - 1
        if u == v:
            raise GraphFormatError(f"{source}:{lineno}: self-loop at vertex {u}")
        if u < 0 or v < 0 or (n_declared is not None and max(u, v) >= n_declared):
            bad = u if (u < 0 or (n_declared is not None and u >= n_declared)) else v
            raise IndexError(f"{source}:{lineno}: vertex id {bad} out of range")
        pairs.append((u, v))
    if n_declared is None:
        n_declared = 1 + max((max(p) for p in pairs), default=-1)
    return Graph.from_edges(n_declared, pairs)


def load_edge_list(path, zero_or_one_based: str | bool = "zero") -> Graph:
    """Read a whitespace-separated edge list.

    Lines starting with ``#`` are comments, except a ``# vertices <N>`` header
    which fixes the vertex count (allowing trailing isolated vertices).
    Without the header the vertex count is ``max id + 1``. Duplicate edges are
    collapsed; self-loops are rejected.

    Args:
        path: edge-list file.
        zero_or_one_based: ``"zero"`` (default) or ``"one"``; ``True`` means one-based.
    """
    one_based = zero_or_one_based in (True, "one", "1", 1)
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return parse_edge_list(fh, source=str(path), one_based=one_based)


def write_edge_list(g: Graph, path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(f"# vertices {g.n_vertices}\n")
        for u, v in g.edges.tolist():
            fh.write(f"{u} {v}\n")


def minnesota(largest_component_only: bool = True) -> Graph:
    """Minnesota road network bundled with the package.

    The raw file has 2642 vertices in two components; the default returns the
    2640-vertex component used in the experiments.
    """
    ref = resources.files("graphband") / "data" / "minnesota.edges"
    with ref.open("r", encoding="utf-8") as fh:
        g = parse_edge_list(fh, source="minnesota.edges")
    if largest_component_only:
        g, _ = largest_component(g)
    return g


def minnesota_path() -> Path:
    return Path(str(resources.files("graphband") / "data" / "minnesota.edges"))


# -- signals -----------------------------------------------------------------

def read_signal(path, n_vertices: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``vertex,value`` CSV. Returns ``(vertices, values)`` in file order."""
    verts, vals = [], []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["vertex", "value"]:
            raise GraphFormatError(f"{path}: expected header 'vertex,value'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                verts.append(int(row[0]))
                vals.append(float(row[1]))
            except (ValueError, IndexError):
                raise GraphFormatError(f"{path}:{lineno}: malformed row {row!r}") from None
    v = np.asarray(verts, dtype=np.int64)
    x = np.asarray(vals, dtype=float)
    if not np.all(np.isfinite(x)):
        raise GraphFormatError(f"{path}: non-finite signal value")
    if n_vertices is not None and v.size and (v.min() < 0 or v.max() >= n_vertices):
        raise IndexError(f"{path}: vertex id out of range for {n_vertices} vertices")
    if len(np.unique(v)) != len(v):
        raise GraphFormatError(f"{path}: duplicate vertex rows")
    return v, x


def read_full_signal(path, n_vertices: int) -> np.ndarray:
    """Read a signal that must define every vertex exactly once."""
    v, x = read_signal(path, n_vertices)
    if len(v) != n_vertices:
        raise GraphFormatError(f"{path}: expected {n_vertices} rows, got {len(v)}")
    out = np.empty(n_vertices)
    out[v] = x
    return out


def write_signal(path, values, vertices=None) -> None:
    values = np.asarray(values, dtype=float)
    vertices = np.arange(len(values)) if vertices is None else np.asarray(vertices)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["vertex", "value"])
        for v, x in zip(vertices.tolist(), values.tolist()):
            w.writerow([v, repr(x)])
