"""Path enumeration kernels over a CSR adjacency.

Both implementations run the same explicit-stack depth-first search and
return ``(edges, offsets)``: path ``i`` is ``edges[offsets[i]:offsets[i+1]]``,
a sequence of edge indices.  Setting ``ADFD_DISABLE_NUMBA=1`` selects the
pure Python version; it is also used when numba cannot be imported.
"""

from __future__ import annotations

import importlib.util
import os
import threading

import numpy as np

DISABLED = os.environ.get("ADFD_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")
# numba is imported lazily; importing it costs more than most analyses
HAVE_NUMBA = importlib.util.find_spec("numba") is not None


def walk_paths_py(indptr, edge_ids, edge_tgt, n_nodes, n_edges, src, tgt, element_unique):
    indptr = indptr.tolist()
    edge_ids = edge_ids.tolist()
    edge_tgt = edge_tgt.tolist()
    on_path = [False] * n_nodes
    used = [False] * n_edges
    nodes = [src]
    ptrs = [indptr[src]]
    edges: list = []
    on_path[src] = True
    out: list = []
    offsets = [0]
    while nodes:
        u = nodes[-1]
        k = ptrs[-1]
        if k >= indptr[u + 1]:
            nodes.pop()
            ptrs.pop()
            on_path[u] = False
            if edges:
                used[edges.pop()] = False
            continue
        ptrs[-1] = k + 1
        e = edge_ids[k]
        v = edge_tgt[k]
        if element_unique:
            if on_path[v]:
                continue
        elif used[e]:
            continue
        if v == tgt:
            out.extend(edges)
            out.append(e)
            offsets.append(len(out))
            continue
        edges.append(e)
        used[e] = True
        nodes.append(v)
        ptrs.append(indptr[v])
        on_path[v] = True
    return np.asarray(out, dtype=np.int64), np.asarray(offsets, dtype=np.int64)


def _walk_paths_nb(indptr, edge_ids, edge_tgt, n_nodes, n_edges, src, tgt, element_unique):
    depth_cap = n_edges + 2
    nodes = np.empty(depth_cap, np.int64)
    ptrs = np.empty(depth_cap, np.int64)
    edges = np.empty(depth_cap, np.int64)
    on_path = np.zeros(n_nodes, np.bool_)
    used = np.zeros(max(n_edges, 1), np.bool_)
    out = np.empty(64, np.int64)
    n_out = 0
    offsets = np.empty(16, np.int64)
    offsets[0] = 0
    n_paths = 0

    depth = 0
    nodes[0] = src
    ptrs[0] = indptr[src]
    on_path[src] = True
    while depth >= 0:
        u = nodes[depth]
        k = ptrs[depth]
        if k >= indptr[u + 1]:
            on_path[u] = False
            if depth > 0:
                used[edges[depth - 1]] = False
            depth -= 1
            continue
        ptrs[depth] = k + 1
        e = edge_ids[k]
        v = edge_tgt[k]
        if element_unique:
            if on_path[v]:
                continue
        elif used[e]:
            continue
        if v == tgt:
            need = n_out + depth + 1
            if need > out.shape[0]:
                cap = out.shape[0]
                while cap < need:
                    cap *= 2
                grown = np.empty(cap, np.int64)
                grown[:n_out] = out[:n_out]
                out = grown
            for j in range(depth):
                out[n_out + j] = edges[j]
            out[n_out + depth] = e
            n_out = need
            n_paths += 1
            if n_paths + 1 > offsets.shape[0]:
                grown_off = np.empty(offsets.shape[0] * 2, np.int64)
                grown_off[:n_paths] = offsets[:n_paths]
                offsets = grown_off
            offsets[n_paths] = n_out
            continue
        edges[depth] = e
        used[e] = True
        depth += 1
        nodes[depth] = v
        ptrs[depth] = indptr[v]
        on_path[v] = True
    return out[:n_out].copy(), offsets[: n_paths + 1].copy()


_lock = threading.Lock()
_compiled = None


def _numba_kernel():
    global _compiled
    if _compiled is None:
        with _lock:
            if _compiled is None:
                from numba import njit

                kernel = njit(cache=True, nogil=True)(_walk_paths_nb)
                # compile eagerly so concurrent callers never race the JIT
                empty = np.zeros(2, np.int64)
                kernel(empty, np.zeros(0, np.int64), np.zeros(0, np.int64), 1, 0, 0, 0, True)
                _compiled = kernel
    return _compiled


def numba_available() -> bool:
    return HAVE_NUMBA and not DISABLED


def walk_paths(indptr, edge_ids, edge_tgt, n_nodes, n_edges, src, tgt, element_unique, use_numba=None):
    if use_numba is None:
        use_numba = numba_available()
    if use_numba:
        return _numba_kernel()(indptr, edge_ids, edge_tgt, n_nodes, n_edges, src, tgt, element_unique)
    return walk_paths_py(indptr, edge_ids, edge_tgt, n_nodes, n_edges, src, tgt, element_unique)
