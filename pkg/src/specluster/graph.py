"""Undirected simple graphs: CSR adjacency, edge-list files, degrees.

Node indices are 0-based.  Edge-list files hold one edge per line as two
whitespace-separated integers; lines starting with '#' are comments.
Graphs are immutable after construction and safe to share across workers.
"""

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import EdgeListParseError, SpeclusterError


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph.

    edges is an (m, 2) array with each pair stored once as (i, j), i < j, in
    lexicographic order.  adjacency is symmetric CSR with sorted neighbor
    lists and an all-zero diagonal.  degrees[i] counts stored neighbors.
    """

    n: int
    edges: np.ndarray
    adjacency: sparse.csr_array
    degrees: np.ndarray

    @property
    def num_edges(self):
        return self.edges.shape[0]

    @property
    def mean_degree(self):
        return 2.0 * self.num_edges / self.n

    def neighbors(self, i):
        lo, hi = self.adjacency.indptr[i], self.adjacency.indptr[i + 1]
        return self.adjacency.indices[lo:hi]


def build_graph(n, edges):
    """Build a Graph from an array of node pairs.

    Pairs are canonicalized to (min, max) and sorted.  Self loops or
    duplicate pairs are rejected; use load_edge_list for lenient ingestion.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size and edges.min() < 0:
        raise SpeclusterError("negative node index in edge list")
    if edges.size and edges.max() >= n:
        raise SpeclusterError(f"node index {edges.max()} out of range for n={n}")
    if np.any(edges[:, 0] == edges[:, 1]):
        raise SpeclusterError("self loop in edge list")
    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    order = np.lexsort((hi, lo))
    edges = np.column_stack([lo[order], hi[order]])
    if edges.shape[0] > 1:
        dup = np.all(edges[1:] == edges[:-1], axis=1)
        if np.any(dup):
            raise SpeclusterError("duplicate edge in edge list")

    m = edges.shape[0]
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    data = np.ones(2 * m, dtype=np.float64)
    adj = sparse.coo_array((data, (rows, cols)), shape=(n, n)).tocsr()
    adj.sort_indices()
    degrees = np.diff(adj.indptr).astype(np.int64)
    return Graph(n=int(n), edges=edges, adjacency=adj, degrees=degrees)


def load_edge_list(path, n_hint=None):
    """Read an edge-list file.

    Duplicate pairs and self loops are dropped with a counted warning.
    n is max index + 1, or n_hint if that is larger.  A file with no valid
    edges is an error, as is any malformed line (reported with its number).
    """
    path = Path(path)
    pairs = []
    n_dupes = 0
    n_loops = 0
    max_index = -1
    seen = set()
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgeListParseError(path, lineno, f"expected 2 fields, got {len(parts)}")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(path, lineno, f"non-integer field in {parts!r}") from None
            if a < 0 or b < 0:
                raise EdgeListParseError(path, lineno, "negative node index")
            max_index = max(max_index, a, b)
            if a == b:
                n_loops += 1
                continue
            key = (a, b) if a < b else (b, a)
            if key in seen:
                n_dupes += 1
                continue
            seen.add(key)
            pairs.append(key)
    if not pairs:
        raise SpeclusterError(f"{path}: no edges found")
    if n_dupes or n_loops:
        warnings.warn(
            f"{path}: dropped {n_dupes} duplicate edge(s) and {n_loops} self loop(s)",
            stacklevel=2,
        )
    edges = np.asarray(pairs, dtype=np.int64)
    n = max_index + 1
    if n_hint is not None:
        n = max(n, int(n_hint))
    return build_graph(n, edges)


def save_edge_list(g, path):
    """Write the canonical (sorted) edge list; inverse of load_edge_list."""
    with open(path, "w") as fh:
        for a, b in g.edges:
            fh.write(f"{a} {b}\n")


def degree_extremes(g):
    """Minimum and maximum node degree of the sample graph."""
    if g.n < 1:
        raise SpeclusterError("empty graph")
    return int(g.degrees.min()), int(g.degrees.max())
