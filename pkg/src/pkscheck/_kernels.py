"""Graph kernels over CSR adjacency arrays.

Each kernel is written once in a numba-compatible subset of Python. With
numba available the kernels are compiled with ``@njit``; the same source also
runs as plain Python on lists, which is what small graphs use because JIT
dispatch costs more than it saves there.

Environment:
  PKSCHECK_DISABLE_NUMBA=1   never use the compiled kernels
  PKSCHECK_JIT_THRESHOLD=N   node count from which compiled kernels are used
                             (default 2048)
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

JIT_DISABLED = os.environ.get("PKSCHECK_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")
JIT_THRESHOLD = int(os.environ.get("PKSCHECK_JIT_THRESHOLD", "2048"))
HAVE_NUMBA = numba is not None and not JIT_DISABLED


def _nested_dfs(indptr, indices, accepting, initial, n):
    # outer/inner DFS of Courcoubetis-Vardi-Wolper-Yannakakis with explicit stacks
    outer_seen = np.zeros(n, dtype=np.bool_)
    inner_seen = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    pos = np.empty(n, dtype=np.int64)
    istack = np.empty(n, dtype=np.int64)
    ipos = np.empty(n, dtype=np.int64)
    empty = np.empty(0, dtype=np.int64)
    for r in range(len(initial)):
        root = initial[r]
        if outer_seen[root]:
            continue
        outer_seen[root] = True
        sp = 0
        stack[0] = root
        pos[0] = indptr[root]
        sp = 1
        while sp > 0:
            v = stack[sp - 1]
            if pos[sp - 1] < indptr[v + 1]:
                w = indices[pos[sp - 1]]
                pos[sp - 1] += 1
                if not outer_seen[w]:
                    outer_seen[w] = True
                    stack[sp] = w
                    pos[sp] = indptr[w]
                    sp += 1
                continue
            if accepting[v] and not inner_seen[v]:
                inner_seen[v] = True
                istack[0] = v
                ipos[0] = indptr[v]
                isp = 1
                while isp > 0:
                    u = istack[isp - 1]
                    if ipos[isp - 1] < indptr[u + 1]:
                        x = indices[ipos[isp - 1]]
                        ipos[isp - 1] += 1
                        if x == v:
                            prefix = stack[:sp].copy()
                            cycle = np.empty(isp, dtype=np.int64)
                            for j in range(1, isp):
                                cycle[j - 1] = istack[j]
                            cycle[isp - 1] = v
                            return prefix, cycle
                        if not inner_seen[x]:
                            inner_seen[x] = True
                            istack[isp] = x
                            ipos[isp] = indptr[x]
                            isp += 1
                        continue
                    isp -= 1
            sp -= 1
    return empty, empty


def _tarjan(indptr, indices, n):
    # returns component id per node; ids are assigned in reverse topological order
    index = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=np.bool_)
    comp = np.full(n, -1, dtype=np.int64)
    sstack = np.empty(n, dtype=np.int64)
    cstack = np.empty(n, dtype=np.int64)
    cpos = np.empty(n, dtype=np.int64)
    counter = 0
    ncomp = 0
    ssp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = counter
        low[root] = counter
        counter += 1
        sstack[ssp] = root
        ssp += 1
        on_stack[root] = True
        cstack[0] = root
        cpos[0] = indptr[root]
        csp = 1
        while csp > 0:
            v = cstack[csp - 1]
            if cpos[csp - 1] < indptr[v + 1]:
                w = indices[cpos[csp - 1]]
                cpos[csp - 1] += 1
                if index[w] == -1:
                    index[w] = counter
                    low[w] = counter
                    counter += 1
                    sstack[ssp] = w
                    ssp += 1
                    on_stack[w] = True
                    cstack[csp] = w
                    cpos[csp] = indptr[w]
                    csp += 1
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            csp -= 1
            if csp > 0:
                parent = cstack[csp - 1]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                while True:
                    ssp -= 1
                    w = sstack[ssp]
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


if HAVE_NUMBA:
    _nested_dfs_jit = numba.njit(cache=True)(_nested_dfs)
    _tarjan_jit = numba.njit(cache=True)(_tarjan)
else:  # pragma: no cover
    _nested_dfs_jit = None
    _tarjan_jit = None


def _as_arrays(indptr, indices):
    return np.ascontiguousarray(indptr, dtype=np.int64), np.ascontiguousarray(indices, dtype=np.int64)


def nested_dfs(indptr, indices, accepting, initial, *, jit: bool | None = None):
    """Accepting lasso as (prefix, cycle) index arrays, both empty if none.

    ``prefix`` runs from an initial node to the seed (inclusive); ``cycle``
    continues from the seed's successor and ends with the seed.
    """
    indptr, indices = _as_arrays(indptr, indices)
    n = len(indptr) - 1
    accepting = np.ascontiguousarray(accepting, dtype=np.bool_)
    initial = np.ascontiguousarray(initial, dtype=np.int64)
    if _use_jit(jit, n):
        return _nested_dfs_jit(indptr, indices, accepting, initial, n)
    return _nested_dfs(indptr, indices, accepting, initial, n)


def tarjan(indptr, indices, *, jit: bool | None = None):
    """Component id per node, numbered in reverse topological order."""
    indptr, indices = _as_arrays(indptr, indices)
    n = len(indptr) - 1
    if _use_jit(jit, n):
        return _tarjan_jit(indptr, indices, n)
    return _tarjan(indptr, indices, n)


def _use_jit(jit, n) -> bool:
    if jit is None:
        return HAVE_NUMBA and n >= JIT_THRESHOLD
    if jit and not HAVE_NUMBA:
        raise RuntimeError("compiled kernels requested but numba is disabled or unavailable")
    return jit
