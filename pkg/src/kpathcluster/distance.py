"""Structural-equivalence edge weights derived from edge centralities.

Two connected vertices are close when third parties reach them with
similar probabilities.  The per-edge dissimilarity aggregates squared
centrality differences over three neighbor groups (private to i, private
to j, shared), each averaged by its size; the edge weight is the clamped
complement ``1 - sigma``, so tightly equivalent endpoints get weight 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .centrality import EdgeCentralities

try:
    from ._kernels import edge_weights as _edge_weights_numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


@dataclass(frozen=True, eq=False)
class EdgeWeights:
    """Per-edge weights in [0, 1] aligned with Graph edge ids.

    ``kappa``/``rho``/``seed`` record the centrality run the weights came
    from.
    """

    values: np.ndarray
    kappa: int
    rho: int
    seed: int | None


def sigma_full(
    g: Graph,
    cent: EdgeCentralities,
    i: int,
    j: int,
    degree_normalized: bool = True,
) -> float:
    """Reference dissimilarity between any two vertices, summed over all of V.

    For every vertex k, compares the centrality of edges k-i and k-j
    (0 when the edge is absent), dividing each squared difference by
    deg(k) unless ``degree_normalized`` is False.  Quadratic and intended
    as the verification oracle, not for production use.
    """
    _validate(g, cent)
    g._check_vertex(i)
    g._check_vertex(j)
    if i == j:
        raise ValueError("vertices must be distinct")
    vals = cent.values
    total = 0.0
    for k in range(g.n):
        deg = g.degree(k)
        if deg == 0:
            continue
        ei = g.edge_id(k, i) if k != i else None
        ej = g.edge_id(k, j) if k != j else None
        li = vals[ei] if ei is not None else 0.0
        lj = vals[ej] if ej is not None else 0.0
        d = li - lj
        if d == 0.0:
            continue
        total += d * d / deg if degree_normalized else d * d
    return math.sqrt(total)


def _sigma_grouped(g: Graph, vals: np.ndarray, i: int, j: int) -> float:
    """Pure-Python mirror of the compiled weight kernel (one edge)."""
    ni = {k: e for k, e in g.neighbors(i)}
    nj = {k: e for k, e in g.neighbors(j)}
    common = (set(ni) & set(nj)) - {i, j}
    only_i = set(ni) - common - {i, j}
    only_j = set(nj) - common - {i, j}
    total = 0.0
    if only_i:
        total += sum(float(vals[ni[k]]) ** 2 for k in only_i) / len(only_i)
    if only_j:
        total += sum(float(vals[nj[k]]) ** 2 for k in only_j) / len(only_j)
    if common:
        total += sum(
            (float(vals[ni[k]]) - float(vals[nj[k]])) ** 2 for k in common
        ) / len(common)
    return math.sqrt(total)


def _weight_from_sigma(sigma: float) -> float:
    return min(1.0, max(0.0, 1.0 - sigma))


def edge_distances(g: Graph, cent: EdgeCentralities) -> EdgeWeights:
    """Weight every edge of the graph by endpoint structural equivalence.

    Output is defined exactly on the edge set; weights are symmetric and
    clamped to [0, 1].
    """
    _validate(g, cent)
    if g.m == 0:
        raise ValueError("graph has no edges")
    if _HAVE_NUMBA:
        values = _edge_weights_numba(
            g.indptr, g.nbr, g.nbr_edge, g.edges, cent.values, g.n
        )
    else:
        values = np.array(
            [
                _weight_from_sigma(_sigma_grouped(g, cent.values, int(i), int(j)))
                for i, j in g.edges
            ],
            dtype=np.float64,
        )
    return EdgeWeights(
        values=values, kappa=cent.kappa, rho=cent.rho, seed=cent.seed
    )


def export_weights(g: Graph, weights: EdgeWeights) -> str:
    """TSV "i TAB j TAB weight" rows, 12 significant digits, sorted by (i, j)."""
    if len(weights.values) != g.m:
        raise ValueError("weights do not match the graph edge set")
    lines = []
    for e in range(g.m):
        i, j = g.edges[e]
        lines.append(f"{g.labels[i]}\t{g.labels[j]}\t{weights.values[e]:.12g}\n")
    return "".join(lines)


def _validate(g: Graph, cent: EdgeCentralities) -> None:
    if len(cent.values) != g.m:
        raise ValueError("centralities must cover every edge of the graph")
