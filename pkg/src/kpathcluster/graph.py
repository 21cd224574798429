"""Compact undirected graph storage, edge-list ingestion, and partition I/O."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class EdgeListParseError(ValueError):
    """A line of an edge-list file could not be interpreted."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph over dense vertex ids 0..n-1 in CSR form.

    Instances are immutable after construction and safe to share across
    worker threads.  ``edges[e]`` holds the endpoints of edge ``e`` with
    ``edges[e, 0] < edges[e, 1]``; each edge id appears in the adjacency
    of both endpoints.  ``labels[v]`` is the original vertex label.
    """

    n: int
    m: int
    indptr: np.ndarray
    nbr: np.ndarray
    nbr_edge: np.ndarray
    edges: np.ndarray
    labels: tuple[str, ...]
    directed_input: bool = False
    duplicates_dropped: int = 0
    self_loops_dropped: int = 0

    @classmethod
    def from_edges(
        cls,
        labels: Sequence[str],
        pairs: Iterable[tuple[int, int]],
        directed_input: bool = False,
    ) -> "Graph":
        """Build a graph from dense-id endpoint pairs.

        Self-loops and duplicate edges (in either orientation) are dropped
        and counted.  Edge ids are assigned in sorted ``(i, j)`` order.
        """
        n = len(labels)
        raw = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        if raw.size and (raw.min() < 0 or raw.max() >= n):
            raise ValueError("endpoint out of range for the given label table")

        loops = raw[:, 0] == raw[:, 1]
        n_loops = int(loops.sum())
        raw = raw[~loops]
        lo = np.minimum(raw[:, 0], raw[:, 1])
        hi = np.maximum(raw[:, 0], raw[:, 1])
        canon = np.stack([lo, hi], axis=1)
        uniq = np.unique(canon, axis=0) if len(canon) else canon
        n_dup = len(canon) - len(uniq)
        m = len(uniq)

        # paired arcs, adjacency sorted by (vertex, neighbor)
        arcs_src = np.concatenate([uniq[:, 0], uniq[:, 1]])
        arcs_dst = np.concatenate([uniq[:, 1], uniq[:, 0]])
        arc_eid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((arcs_dst, arcs_src))
        nbr = arcs_dst[order]
        nbr_edge = arc_eid[order]
        counts = np.bincount(arcs_src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])

        return cls(
            n=n,
            m=m,
            indptr=indptr,
            nbr=nbr,
            nbr_edge=nbr_edge,
            edges=uniq,
            labels=tuple(str(x) for x in labels),
            directed_input=directed_input,
            duplicates_dropped=n_dup,
            self_loops_dropped=n_loops,
        )

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> list[tuple[int, int]]:
        """Return ``(neighbor, edge id)`` pairs of ``v``, sorted by neighbor."""
        self._check_vertex(v)
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return [(int(w), int(e)) for w, e in zip(self.nbr[lo:hi], self.nbr_edge[lo:hi])]

    def edge_id(self, u: int, v: int) -> int | None:
        """Edge id of the edge ``u``-``v``, or None when absent."""
        self._check_vertex(u)
        self._check_vertex(v)
        lo, hi = self.indptr[u], self.indptr[u + 1]
        pos = lo + np.searchsorted(self.nbr[lo:hi], v)
        if pos < hi and self.nbr[pos] == v:
            return int(self.nbr_edge[pos])
        return None

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range (n={self.n})")


@dataclass(frozen=True, eq=False)
class Partition:
    """Hard assignment of vertices 0..n-1 to dense community ids 0..q-1."""

    assignment: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.assignment, dtype=np.int64)
        object.__setattr__(self, "assignment", arr)
        if arr.ndim != 1:
            raise ValueError("assignment must be one-dimensional")
        if len(arr):
            ids = np.unique(arr)
            if ids[0] != 0 or ids[-1] != len(ids) - 1:
                raise ValueError("community ids must be dense 0..q-1 with no empty id")

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        """Renumber arbitrary community labels densely in first-appearance order."""
        arr = np.asarray(labels, dtype=np.int64)
        seen: dict[int, int] = {}
        out = np.empty(len(arr), dtype=np.int64)
        for i, c in enumerate(arr):
            out[i] = seen.setdefault(int(c), len(seen))
        return cls(out)

    @classmethod
    def from_communities(cls, groups: Iterable[Iterable[int]], n: int) -> "Partition":
        out = np.full(n, -1, dtype=np.int64)
        for cid, members in enumerate(groups):
            for v in members:
                out[v] = cid
        if (out < 0).any():
            raise ValueError("every vertex needs a community")
        return cls(out)

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def num_communities(self) -> int:
        return int(self.assignment.max()) + 1 if len(self.assignment) else 0

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.num_communities)

    def communities(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_communities)]
        for v, c in enumerate(self.assignment):
            out[c].append(v)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and np.array_equal(
            self.assignment, other.assignment
        )


def _iter_lines(text) -> Iterator[str]:
    if isinstance(text, str):
        yield from text.splitlines()
    else:
        for line in text:
            yield line.rstrip("\n")


def parse_edge_list(text, directed: bool = False) -> Graph:
    """Parse whitespace-separated "i j" pairs into a Graph.

    Lines starting with '#' are comments; blank lines are ignored. Vertices
    are renumbered densely in first-appearance order and the original tokens
    kept as labels.  Directed input is symmetrized (with a warning); "a b"
    and "b a" then denote the same undirected edge.  Duplicate edges and
    self-loops are dropped and counted on the returned graph.
    """
    label_ids: dict[str, int] = {}
    pairs: list[tuple[int, int]] = []
    saw_data = False
    for lineno, line in enumerate(_iter_lines(text), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise EdgeListParseError(
                f"expected two tokens, got {len(tokens)}", lineno
            )
        try:
            int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListParseError(
                f"non-integer vertex token in {tokens!r}", lineno
            ) from None
        saw_data = True
        u = label_ids.setdefault(tokens[0], len(label_ids))
        v = label_ids.setdefault(tokens[1], len(label_ids))
        pairs.append((u, v))
    if not saw_data:
        raise EdgeListParseError("no edges found in input", 0)

    if directed:
        logger.warning(
            "directed input symmetrized: reciprocal arcs collapse to one edge"
        )
    g = Graph.from_edges(list(label_ids), pairs, directed_input=directed)
    if g.duplicates_dropped or g.self_loops_dropped:
        logger.info(
            "dropped %d duplicate edge(s) and %d self-loop(s) during ingestion",
            g.duplicates_dropped,
            g.self_loops_dropped,
        )
    return g


def _label_sort_key(label: str):
    # numeric labels sort numerically, everything else lexically after them
    try:
        return (0, int(label), label)
    except ValueError:
        return (1, 0, label)


def write_partition(p: Partition, labels: Sequence[str]) -> str:
    """Serialize a partition as "label TAB community" lines sorted by label."""
    if len(labels) != p.n:
        raise ValueError("label table size must match partition size")
    rows = sorted(
        ((str(labels[v]), int(p.assignment[v])) for v in range(p.n)),
        key=lambda row: _label_sort_key(row[0]),
    )
    return "".join(f"{label}\t{cid}\n" for label, cid in rows)


def read_partition(text) -> dict[str, int]:
    """Parse write_partition output back into a label -> community map."""
    out: dict[str, int] = {}
    for lineno, line in enumerate(_iter_lines(text), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split("\t")
        if len(tokens) != 2:
            raise EdgeListParseError("expected 'label<TAB>community'", lineno)
        try:
            out[tokens[0]] = int(tokens[1])
        except ValueError:
            raise EdgeListParseError(
                f"non-integer community id {tokens[1]!r}", lineno
            ) from None
    return out


def write_edge_list(g: Graph) -> str:
    """Serialize the edge set as "label_i TAB label_j" lines, one per edge."""
    lines = []
    for i, j in g.edges:
        lines.append(f"{g.labels[i]}\t{g.labels[j]}\n")
    return "".join(lines)
