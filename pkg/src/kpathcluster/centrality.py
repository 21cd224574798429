"""Edge centrality from bounded-length, non-repeating random message walks.

An edge's centrality is the probability that a message performing a random
walk of at most ``kappa`` hops, never reusing an edge and starting from a
uniformly random vertex, travels across that edge.  The Monte-Carlo
estimator (`erw_kpath`) simulates ``rho`` independent walks; the exhaustive
enumerator (`exact_kpath_centrality`) computes the same quantity in closed
form on small graphs and serves as the verification oracle.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import Graph

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1
_PHI64 = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

DEFAULT_KAPPA = 20
DEFAULT_RHO_MULTIPLIER = 100
_MAX_RHO = 2**31 - 1


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


class WalkRng:
    """SplitMix64 stream; stream ``t`` of a run is derived from (seed, t).

    Walk-level derivation keeps results independent of how walks are
    scheduled across workers.
    """

    __slots__ = ("_state",)

    def __init__(self, state: int):
        self._state = state & _MASK64

    @classmethod
    def for_walk(cls, seed: int, walk_index: int) -> "WalkRng":
        return cls(_mix64(_mix64(seed) + walk_index))

    def next_u64(self) -> int:
        self._state = (self._state + _PHI64) & _MASK64
        return _mix64(self._state)

    def randrange(self, k: int) -> int:
        if k <= 0:
            raise ValueError("k must be positive")
        return self.next_u64() % k


@dataclass(frozen=True)
class WalkTrace:
    """One simulated walk: start vertex and the edge ids in traversal order."""

    start: int
    edges: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True, eq=False)
class EdgeCentralities:
    """Per-edge centrality values in [0, 1], aligned with Graph edge ids.

    ``rho == 0`` marks exact (enumerated) values rather than Monte-Carlo
    estimates.
    """

    values: np.ndarray
    kappa: int
    rho: int
    seed: int | None


_REJECT_CAP = 64


def simulate_walk(g: Graph, start: int, kappa: int, rng) -> WalkTrace:
    """Random walk from ``start``: at each hop pick uniformly among incident
    edges not yet used by this walk; stop after ``kappa`` hops or when stuck.

    ``rng`` needs a ``randrange(k)`` method (``random.Random`` works).
    An isolated start vertex yields an empty trace.  The unvisited edge is
    selected by rejection sampling over all incident slots (with a scan
    fallback), mirroring the compiled kernel draw for draw.
    """
    g._check_vertex(start)
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    visited: set[int] = set()
    trace: list[int] = []
    v = start
    indptr, nbr, nbr_edge = g.indptr, g.nbr, g.nbr_edge
    for _ in range(kappa):
        lo, hi = int(indptr[v]), int(indptr[v + 1])
        deg = hi - lo
        if deg == 0:
            break
        slot = -1
        for _try in range(_REJECT_CAP):
            s = lo + rng.randrange(deg)
            if int(nbr_edge[s]) not in visited:
                slot = s
                break
        if slot < 0:
            candidates = [
                s for s in range(lo, hi) if int(nbr_edge[s]) not in visited
            ]
            if not candidates:
                break
            slot = candidates[rng.randrange(len(candidates))]
        eid = int(nbr_edge[slot])
        visited.add(eid)
        trace.append(eid)
        v = int(nbr[slot])
    return WalkTrace(start=start, edges=tuple(trace))


def _erw_kpath_python(g: Graph, kappa: int, rho: int, seed: int) -> np.ndarray:
    counts = np.zeros(g.m, dtype=np.int64)
    for t in range(rho):
        rng = WalkRng.for_walk(seed, t)
        start = rng.randrange(g.n)
        for eid in simulate_walk(g, start, kappa, rng).edges:
            counts[eid] += 1
    return counts


try:  # compiled walk kernel; the pure-Python path stays as fallback/oracle
    from ._kernels import walk_counts as _walk_counts_numba
    from ._kernels import max_threads as _kernel_max_threads
    from ._kernels import set_threads as _kernel_set_threads

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False
    logger.warning("compiled kernels unavailable; falling back to pure Python")


def resolve_workers(workers: int | None) -> int:
    """Clamp a requested worker count to what the runtime can provide."""
    available = _kernel_max_threads() if _HAVE_NUMBA else 1
    if workers is None:
        workers = os.cpu_count() or 1
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return min(workers, available)


def erw_kpath(
    g: Graph,
    kappa: int,
    rho: int,
    seed: int,
    workers: int | None = None,
) -> EdgeCentralities:
    """Estimate edge centralities with ``rho`` independent random walks.

    Each walk starts at a uniformly drawn vertex and contributes 0 or 1 to
    every edge; values are traversal counts divided by ``rho``.  Walks that
    dead-end before ``kappa`` hops still count as complete iterations.
    Results are bit-identical for a fixed (graph, kappa, rho, seed)
    regardless of ``workers``.
    """
    if g.m == 0:
        raise ValueError("graph has no edges")
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    if not 1 <= rho <= _MAX_RHO:
        raise ValueError(f"rho must be in [1, {_MAX_RHO}]")
    nworkers = resolve_workers(workers)
    if _HAVE_NUMBA:
        _kernel_set_threads(nworkers)
        counts = _walk_counts_numba(
            g.indptr, g.nbr, g.nbr_edge, g.n, g.m, kappa, rho, seed, nworkers
        )
    else:
        counts = _erw_kpath_python(g, kappa, rho, seed)
    values = counts.astype(np.float64) / rho
    return EdgeCentralities(values=values, kappa=kappa, rho=rho, seed=seed)


def default_rho(g: Graph, multiplier: float = DEFAULT_RHO_MULTIPLIER) -> int:
    """Iteration count scaled with the edge count (multiplier * |E|)."""
    return max(1, min(_MAX_RHO, int(round(multiplier * g.m))))


def exact_kpath_centrality(
    g: Graph, kappa: int, max_vertices: int = 12
) -> EdgeCentralities:
    """Exact expected centralities by exhaustive walk-tree enumeration.

    Sums, over every start vertex and every realizable walk prefix, the
    probability of traversing each edge; this is the limit `erw_kpath`
    converges to.  Exponential in the worst case, hence the vertex cap.
    """
    if g.m == 0:
        raise ValueError("graph has no edges")
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    if g.n > max_vertices:
        raise ValueError(
            f"graph too large for exhaustive enumeration (n={g.n} > "
            f"{max_vertices}); use the Monte-Carlo estimator erw_kpath instead"
        )

    acc = [Fraction(0) for _ in range(g.m)]
    adjacency = [g.neighbors(v) for v in range(g.n)]

    def expand(v: int, depth: int, prob: Fraction, visited: int) -> None:
        if depth == kappa:
            return
        options = [(w, e) for w, e in adjacency[v] if not (visited >> e) & 1]
        if not options:
            return
        p = prob / len(options)
        for w, e in options:
            acc[e] += p
            expand(w, depth + 1, p, visited | (1 << e))

    for s in range(g.n):
        expand(s, 0, Fraction(1), 0)

    values = np.array([float(a / g.n) for a in acc], dtype=np.float64)
    return EdgeCentralities(values=values, kappa=kappa, rho=0, seed=None)


def export_centralities(g: Graph, cent: EdgeCentralities) -> str:
    """TSV "i TAB j TAB value" rows with 12 significant digits, sorted by (i, j)."""
    if len(cent.values) != g.m:
        raise ValueError("centralities do not match the graph edge set")
    lines = []
    for e in range(g.m):
        i, j = g.edges[e]
        lines.append(f"{g.labels[i]}\t{g.labels[j]}\t{cent.values[e]:.12g}\n")
    return "".join(lines)
