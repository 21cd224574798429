"""Numba kernels for the walk simulation and the edge-weight computation.

Both kernels parallelize over independent units (walks, edges) with
per-thread accumulators merged by exact integer addition or disjoint
writes, so results do not depend on the thread count.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange, get_thread_id, set_num_threads, config

_U = np.uint64
_PHI64 = _U(0x9E3779B97F4A7C15)
_MIX1 = _U(0xBF58476D1CE4E5B9)
_MIX2 = _U(0x94D049BB133111EB)


def max_threads() -> int:
    return int(config.NUMBA_NUM_THREADS)


def set_threads(n: int) -> None:
    set_num_threads(max(1, min(int(n), max_threads())))


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> _U(30))) * _MIX1
    z = (z ^ (z >> _U(27))) * _MIX2
    return z ^ (z >> _U(31))


_REJECT_CAP = 64


@njit(parallel=True, cache=True)
def _walk_counts(indptr, nbr, nbr_edge, n, m, kappa, rho, seed, nthreads):
    counts = np.zeros((nthreads, m), dtype=np.int64)
    # generation stamps instead of clearing: slot is "visited" in walk t
    # iff stamp[e] == t
    stamp = np.full((nthreads, m), -1, dtype=np.int64)
    seed_base = _mix64(_U(seed))
    for t in prange(rho):
        tid = get_thread_id()
        state = _mix64(seed_base + _U(t))
        state = state + _PHI64
        v = np.int64(_mix64(state) % _U(n))
        for _hop in range(kappa):
            lo = indptr[v]
            hi = indptr[v + 1]
            deg = hi - lo
            if deg == 0:
                break
            # rejection sampling is uniform over the unvisited incident
            # edges; fall back to scan-and-pick after too many rejects
            chosen = np.int64(-1)
            for _try in range(_REJECT_CAP):
                state = state + _PHI64
                s = lo + np.int64(_mix64(state) % _U(deg))
                if stamp[tid, nbr_edge[s]] != t:
                    chosen = s
                    break
            if chosen < 0:
                avail = 0
                for s in range(lo, hi):
                    if stamp[tid, nbr_edge[s]] != t:
                        avail += 1
                if avail == 0:
                    break
                state = state + _PHI64
                pick = np.int64(_mix64(state) % _U(avail))
                for s in range(lo, hi):
                    if stamp[tid, nbr_edge[s]] != t:
                        if pick == 0:
                            chosen = s
                            break
                        pick -= 1
            e = nbr_edge[chosen]
            stamp[tid, e] = t
            counts[tid, e] += 1
            v = nbr[chosen]
    total = np.zeros(m, dtype=np.int64)
    for tid in range(nthreads):
        for e in range(m):
            total[e] += counts[tid, e]
    return total


def walk_counts(indptr, nbr, nbr_edge, n, m, kappa, rho, seed, nthreads):
    return _walk_counts(
        indptr.astype(np.int64),
        nbr.astype(np.int64),
        nbr_edge.astype(np.int64),
        np.int64(n),
        np.int64(m),
        np.int64(kappa),
        np.int64(rho),
        np.int64(seed & ((1 << 64) - 1)),
        np.int64(nthreads),
    )


@njit(parallel=True, cache=True)
def _edge_weights(indptr, nbr, nbr_edge, eu, ev, vals, n, out):
    for e in prange(eu.shape[0]):
        i = eu[e]
        j = ev[e]
        a, a_end = indptr[i], indptr[i + 1]
        b, b_end = indptr[j], indptr[j + 1]
        s_i = 0.0
        c_i = 0
        s_j = 0.0
        c_j = 0
        s_cn = 0.0
        c_cn = 0
        # merge the two sorted neighbor lists; n is the sentinel
        while a < a_end or b < b_end:
            ka = nbr[a] if a < a_end else n
            kb = nbr[b] if b < b_end else n
            if ka < kb:
                if ka != j:
                    x = vals[nbr_edge[a]]
                    s_i += x * x
                    c_i += 1
                a += 1
            elif kb < ka:
                if kb != i:
                    x = vals[nbr_edge[b]]
                    s_j += x * x
                    c_j += 1
                b += 1
            else:
                d = vals[nbr_edge[a]] - vals[nbr_edge[b]]
                s_cn += d * d
                c_cn += 1
                a += 1
                b += 1
        total = 0.0
        if c_i > 0:
            total += s_i / c_i
        if c_j > 0:
            total += s_j / c_j
        if c_cn > 0:
            total += s_cn / c_cn
        w = 1.0 - math.sqrt(total)
        if w < 0.0:
            w = 0.0
        elif w > 1.0:
            w = 1.0
        out[e] = w


def edge_weights(indptr, nbr, nbr_edge, edges, vals, n):
    out = np.empty(len(edges), dtype=np.float64)
    _edge_weights(
        indptr.astype(np.int64),
        nbr.astype(np.int64),
        nbr_edge.astype(np.int64),
        edges[:, 0].astype(np.int64),
        edges[:, 1].astype(np.int64),
        vals.astype(np.float64),
        np.int64(n),
        out,
    )
    return out
