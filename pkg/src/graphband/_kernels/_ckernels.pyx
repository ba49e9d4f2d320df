# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph traversal kernels; same contract as ``_pykernels``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t idx_t


def _as_idx(a):
    return np.ascontiguousarray(a, dtype=np.int64)


cdef Py_ssize_t _bfs(const idx_t[::1] indptr, const idx_t[::1] indices,
                     const idx_t[::1] labels, idx_t label, idx_t root,
                     idx_t[::1] order, idx_t[::1] parent, idx_t[::1] depth) nogil:
    # parent/depth are indexed by vertex id and must be preset to -1
    cdef Py_ssize_t head = 0, tail = 1, j
    cdef idx_t u, w, du
    order[0] = root
    parent[root] = -1
    depth[root] = 0
    while head < tail:
        u = order[head]
        head += 1
        du = depth[u] + 1
        for j in range(indptr[u], indptr[u + 1]):
            w = indices[j]
            if labels[w] != label:
                continue
            if depth[w] == -1:
                depth[w] = du
                parent[w] = u
                order[tail] = w
                tail += 1
            elif depth[w] == du and u < parent[w]:
                parent[w] = u
    return tail


def spt(indptr, indices, labels, idx_t label, idx_t root):
    cdef const idx_t[::1] ip = _as_idx(indptr), ix = _as_idx(indices), lb = _as_idx(labels)
    cdef Py_ssize_t n = ip.shape[0] - 1
    order_arr = np.empty(n, dtype=np.int64)
    parent_arr = np.full(n, -1, dtype=np.int64)
    depth_arr = np.full(n, -1, dtype=np.int64)
    cdef idx_t[::1] order = order_arr, parent = parent_arr, depth = depth_arr
    cdef Py_ssize_t m
    with nogil:
        m = _bfs(ip, ix, lb, label, root, order, parent, depth)
    visited = order_arr[:m]
    return visited, parent_arr[visited], depth_arr[visited]


def spt_measures(indptr, indices, labels, idx_t label, idx_t root):
    cdef const idx_t[::1] ip = _as_idx(indptr), ix = _as_idx(indices), lb = _as_idx(labels)
    cdef Py_ssize_t n = ip.shape[0] - 1
    cdef idx_t[::1] order = np.empty(n, dtype=np.int64)
    cdef idx_t[::1] parent = np.full(n, -1, dtype=np.int64)
    cdef idx_t[::1] depth = np.full(n, -1, dtype=np.int64)
    cdef idx_t[::1] size = np.zeros(n, dtype=np.int64)
    cdef Py_ssize_t m, i
    cdef idx_t v, p, k_max = 0
    with nogil:
        m = _bfs(ip, ix, lb, label, root, order, parent, depth)
        for i in range(m):
            size[order[i]] = 1
        for i in range(m - 1, 0, -1):
            v = order[i]
            p = parent[v]
            if p == root:
                if size[v] > k_max:
                    k_max = size[v]
            else:
                size[p] += size[v]
    return int(k_max), int(depth[order[m - 1]]), int(m)


def greedy_one_hop(indptr, indices):
    cdef const idx_t[::1] ip = _as_idx(indptr), ix = _as_idx(indices)
    cdef Py_ssize_t n = ip.shape[0] - 1
    cdef idx_t[::1] deg = np.empty(n, dtype=np.int64)
    owner_arr = np.full(n, -1, dtype=np.int64)
    cdef idx_t[::1] owner = owner_arr
    cdef idx_t[::1] cell = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t v, j, jj, c, ncell, remaining = n
    cdef idx_t u, w, best
    with nogil:
        for v in range(n):
            deg[v] = ip[v + 1] - ip[v]
        while remaining > 0:
            u = -1
            best = -1
            for v in range(n):
                if owner[v] == -1 and deg[v] > best:
                    best = deg[v]
                    u = v
            ncell = 0
            cell[ncell] = u
            ncell += 1
            owner[u] = u
            for j in range(ip[u], ip[u + 1]):
                w = ix[j]
                if owner[w] == -1:
                    owner[w] = u
                    cell[ncell] = w
                    ncell += 1
            remaining -= ncell
            for c in range(ncell):
                v = cell[c]
                for jj in range(ip[v], ip[v + 1]):
                    w = ix[jj]
                    if owner[w] == -1:
                        deg[w] -= 1
    return owner_arr


def multi_source_bfs(indptr, indices, sources):
    cdef const idx_t[::1] ip = _as_idx(indptr), ix = _as_idx(indices)
    cdef Py_ssize_t n = ip.shape[0] - 1
    owner_arr = np.full(n, -1, dtype=np.int64)
    dist_arr = np.full(n, -1, dtype=np.int64)
    parent_arr = np.full(n, -1, dtype=np.int64)
    cdef idx_t[::1] owner = owner_arr, dist = dist_arr, parent = parent_arr
    src = np.unique(_as_idx(sources))
    cdef idx_t[::1] frontier = np.empty(n, dtype=np.int64)
    cdef idx_t[::1] nxt = np.empty(n, dtype=np.int64)
    cdef idx_t[::1] s = src
    cdef Py_ssize_t nf = s.shape[0], nn, i, j
    cdef idx_t u, w, ou, level = 0
    for i in range(nf):
        frontier[i] = s[i]
        owner[s[i]] = s[i]
        dist[s[i]] = 0
    while nf > 0:
        nn = 0
        with nogil:
            for i in range(nf):
                u = frontier[i]
                ou = owner[u]
                for j in range(ip[u], ip[u + 1]):
                    w = ix[j]
                    if dist[w] == -1:
                        dist[w] = level + 1
                        owner[w] = ou
                        parent[w] = u
                        nxt[nn] = w
                        nn += 1
                    elif dist[w] == level + 1 and (ou < owner[w] or (ou == owner[w] and u < parent[w])):
                        owner[w] = ou
                        parent[w] = u
        # the (owner, parent) rule makes the result independent of frontier order
        frontier, nxt = nxt, frontier
        nf = nn
        level += 1
    return owner_arr, dist_arr, parent_arr
