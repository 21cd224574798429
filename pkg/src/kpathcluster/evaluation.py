"""Partition agreement scoring and synthetic benchmark graphs."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .graph import Graph, Partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Cross-tabulation of two partitions: counts[i, j] = |A_i intersect B_j|."""

    counts: np.ndarray

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape


def confusion_matrix(a: Partition, b: Partition) -> ConfusionMatrix:
    if a.n != b.n:
        raise ValueError("partitions must cover the same vertex set")
    counts = np.zeros((a.num_communities, b.num_communities), dtype=np.int64)
    np.add.at(counts, (a.assignment, b.assignment), 1)
    return ConfusionMatrix(counts)


def nmi(a: Partition, b: Partition) -> float:
    """Normalized mutual information between two partitions.

    1.0 for identical partitions (up to relabeling), 0.0 for independent
    ones.  Natural logarithm; 0*log(0) terms are treated as 0.
    """
    if a.n == 0:
        raise ValueError("partitions must be non-empty")
    cm = confusion_matrix(a, b)
    counts = cm.counts.astype(np.float64)
    n = float(cm.total)
    rows = cm.row_sums.astype(np.float64)
    cols = cm.col_sums.astype(np.float64)

    denominator = float(
        np.sum(rows * np.log(rows / n)) + np.sum(cols * np.log(cols / n))
    )
    if denominator == 0.0:
        # both partitions are single-cluster <=> identical
        one_per_row = (cm.counts > 0).sum(axis=1) == 1
        one_per_col = (cm.counts > 0).sum(axis=0) == 1
        return 1.0 if one_per_row.all() and one_per_col.all() else 0.0

    nz = counts > 0
    ratio = counts[nz] * n / np.outer(rows, cols)[nz]
    numerator = -2.0 * float(np.sum(counts[nz] * np.log(ratio)))
    return numerator / denominator


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of a planted-partition random graph.

    ``q`` communities of near-equal size; intra-community vertex pairs get
    an edge with probability ``p_in``, inter-community pairs with ``p_out``.
    """

    n: int
    q: int
    p_in: float
    p_out: float
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 1 <= self.q <= self.n:
            raise ValueError("q must be in [1, n]")
        if not (0.0 <= self.p_out <= self.p_in <= 1.0):
            raise ValueError("probabilities must satisfy 0 <= p_out <= p_in <= 1")

    def community_sizes(self) -> list[int]:
        base, rem = divmod(self.n, self.q)
        return [base + 1 if c < rem else base for c in range(self.q)]


def planted_probabilities(
    n: int, q: int, mean_degree: float, external_fraction: float
) -> tuple[float, float]:
    """Edge probabilities that hit a target mean degree and the target
    fraction of a vertex's edges leaving its community."""
    if not 0.0 <= external_fraction <= 1.0:
        raise ValueError("external_fraction must be in [0, 1]")
    size = n / q
    internal_degree = mean_degree * (1.0 - external_fraction)
    external_degree = mean_degree * external_fraction
    p_in = internal_degree / max(size - 1.0, 1.0)
    p_out = external_degree / max(n - size, 1.0)
    return min(p_in, 1.0), min(p_out, 1.0)


def planted_partition(spec: SyntheticSpec) -> tuple[Graph, Partition]:
    """Sample a planted-partition graph plus its ground-truth partition.

    Deterministic per seed.  Vertices are labeled "0".."n-1"; community
    blocks are contiguous id ranges.  Isolated vertices are allowed (they
    are reported via logging).
    """
    sizes = spec.community_sizes()
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    truth = np.repeat(np.arange(spec.q), sizes)
    rng = np.random.default_rng(spec.seed)

    chunks: list[np.ndarray] = []
    for a in range(spec.q):
        lo = int(offsets[a])
        size = sizes[a]
        if size >= 2:
            iu, ju = np.triu_indices(size, k=1)
            mask = rng.random(len(iu)) < spec.p_in
            if mask.any():
                chunks.append(np.stack([iu[mask] + lo, ju[mask] + lo], axis=1))
        for b in range(a + 1, spec.q):
            lo_b = int(offsets[b])
            size_b = sizes[b]
            hits = np.flatnonzero(rng.random(size * size_b) < spec.p_out)
            if len(hits):
                chunks.append(
                    np.stack([hits // size_b + lo, hits % size_b + lo_b], axis=1)
                )

    pairs = (
        np.concatenate(chunks, axis=0)
        if chunks
        else np.empty((0, 2), dtype=np.int64)
    )
    labels = [str(i) for i in range(spec.n)]
    g = Graph.from_edges(labels, pairs)
    isolated = int((g.degrees() == 0).sum())
    if isolated:
        logger.info("planted graph has %d isolated vertex(es)", isolated)
    return g, Partition(truth)


def realized_edge_counts(g: Graph, truth: Partition) -> tuple[int, int]:
    """(intra, inter) edge counts of a graph under a reference partition."""
    asg = truth.assignment
    same = asg[g.edges[:, 0]] == asg[g.edges[:, 1]]
    return int(same.sum()), int((~same).sum())
