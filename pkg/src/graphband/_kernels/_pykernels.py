"""Pure-Python graph traversal kernels.

Reference implementation of the combinatorial hot loops. The compiled
module ``_ckernels`` exposes the same four functions with identical
semantics; tests run both and compare outputs element-wise.

All kernels take the graph in CSR form (``indptr``, ``indices``) with
each neighbor list sorted ascending. Ties are broken by smallest vertex id.
"""
import heapq

import numpy as np


def spt(indptr, indices, labels, label, root):
    """Canonical BFS shortest-path tree of the subgraph ``labels == label``.

    Returns ``(order, parent, depth)`` aligned arrays over the vertices reached
    from ``root``, in BFS visit order. Among equal-depth candidates the parent
    is the one with the smallest id; the root has parent -1.
    """
    indptr = indptr.tolist()
    indices = indices.tolist()
    labels = labels.tolist()
    parent = {root: -1}
    depth = {root: 0}
    order = [root]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        du = depth[u] + 1
        for w in indices[indptr[u]:indptr[u + 1]]:
            if labels[w] != label:
                continue
            dw = depth.get(w)
            if dw is None:
                depth[w] = du
                parent[w] = u
                order.append(w)
            elif dw == du and u < parent[w]:
                parent[w] = u
    return (
        np.array(order, dtype=np.int64),
        np.array([parent[v] for v in order], dtype=np.int64),
        np.array([depth[v] for v in order], dtype=np.int64),
    )


def spt_measures(indptr, indices, labels, label, root):
    """Return ``(K, R, n_reached)`` for the canonical tree rooted at ``root``.

    K is the largest subtree hanging off the root, R the tree height.
    """
    order, parent, depth = spt(indptr, indices, labels, label, root)
    n = len(order)
    if n == 1:
        return 0, 0, 1
    pos = {v: i for i, v in enumerate(order.tolist())}
    size = [1] * n
    par = parent.tolist()
    k_max = 0
    for i in range(n - 1, 0, -1):
        p = par[i]
        if p == root:
            if size[i] > k_max:
                k_max = size[i]
        else:
            size[pos[p]] += size[i]
    return k_max, int(depth[-1]), n


def greedy_one_hop(indptr, indices):
    """Greedy one-hop cover. Returns ``owner`` with owner[v] the claiming vertex.

    Repeatedly claims the alive vertex of largest residual degree (smallest id
    on ties) together with its alive neighbors, then deletes them.
    """
    indptr = indptr.tolist()
    indices = indices.tolist()
    n = len(indptr) - 1
    deg = [indptr[v + 1] - indptr[v] for v in range(n)]
    owner = [-1] * n
    heap = [(-deg[v], v) for v in range(n)]
    heapq.heapify(heap)
    while heap:
        d, u = heapq.heappop(heap)
        if owner[u] != -1 or -d != deg[u]:
            continue
        cell = [u] + [w for w in indices[indptr[u]:indptr[u + 1]] if owner[w] == -1]
        for v in cell:
            owner[v] = u
        for v in cell:
            for w in indices[indptr[v]:indptr[v + 1]]:
                if owner[w] == -1:
                    deg[w] -= 1
                    heapq.heappush(heap, (-deg[w], w))
    return np.array(owner, dtype=np.int64)


def multi_source_bfs(indptr, indices, sources):
    """Level-synchronous BFS from all ``sources`` at once.

    Returns ``(owner, dist, parent)``; unreached vertices carry -1 in all three.
    A vertex at level d+1 inherits the owner of its parent, chosen among level-d
    neighbors by smallest ``(owner, parent id)``.
    """
    indptr = indptr.tolist()
    indices = indices.tolist()
    n = len(indptr) - 1
    owner = [-1] * n
    dist = [-1] * n
    parent = [-1] * n
    frontier = sorted(set(int(s) for s in sources))
    for s in frontier:
        owner[s] = s
        dist[s] = 0
    level = 0
    while frontier:
        nxt = []
        for u in frontier:
            ou = owner[u]
            for w in indices[indptr[u]:indptr[u + 1]]:
                if dist[w] == -1:
                    dist[w] = level + 1
                    owner[w] = ou
                    parent[w] = u
                    nxt.append(w)
                elif dist[w] == level + 1 and (ou, u) < (owner[w], parent[w]):
                    owner[w] = ou
                    parent[w] = u
        nxt.sort()
        frontier = nxt
        level += 1
    return (
        np.array(owner, dtype=np.int64),
        np.array(dist, dtype=np.int64),
        np.array(parent, dtype=np.int64),
    )
