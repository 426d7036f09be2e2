"""Immutable CSR container for simple undirected graphs.

Vertex ids are 32-bit integers.  Neighbor lists are sorted ascending, the
structure is symmetric, and loops and duplicate edges are rejected at
construction, so every kernel downstream can rely on those invariants.
"""

from __future__ import annotations

import numpy as np


class SparseGraph:
    """Undirected graph in compressed sparse row form.

    Attributes:
        n: number of vertices.
        offsets: int64 array of length n + 1.
        neighbors: int32 array of length 2m, row-sorted ascending.
        meta: small dict of provenance hints (q, kind, seed); optional.
    """

    __slots__ = ("n", "offsets", "neighbors", "meta", "_rows")

    def __init__(self, n, offsets, neighbors, meta=None):
        self.n = int(n)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.neighbors = np.ascontiguousarray(neighbors, dtype=np.int32)
        self.meta = dict(meta) if meta else {}
        self._rows = None
        self.offsets.flags.writeable = False
        self.neighbors.flags.writeable = False

    @classmethod
    def from_pairs(cls, n, u, v, meta=None):
        """Build from undirected edge endpoints with u != v.

        Rejects loops and duplicate edges.  Edges may arrive in any order
        and any orientation.
        """
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if u.shape != v.shape:
            raise ValueError("endpoint arrays differ in length")
        if u.size and (u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n):
            raise ValueError("vertex id out of range")
        if np.any(u == v):
            raise ValueError("self-loop in edge list")
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        codes = lo * n + hi
        codes_sorted = np.sort(codes)
        if codes_sorted.size > 1 and np.any(codes_sorted[1:] == codes_sorted[:-1]):
            i = int(np.flatnonzero(codes_sorted[1:] == codes_sorted[:-1])[0])
            c = int(codes_sorted[i])
            raise ValueError("duplicate edge (%d, %d)" % (c // n, c % n))
        directed = np.concatenate([u * n + v, v * n + u])
        directed.sort()
        neighbors = (directed % n).astype(np.int32)
        offsets = np.searchsorted(directed, np.arange(n + 1, dtype=np.int64) * n)
        return cls(n, offsets, neighbors, meta)

    @property
    def m(self) -> int:
        return self.neighbors.size // 2

    def degrees(self):
        return np.diff(self.offsets)

    def neighbors_of(self, v):
        return self.neighbors[self.offsets[v] : self.offsets[v + 1]]

    def has_edge(self, u, v) -> bool:
        row = self.neighbors_of(u)
        i = np.searchsorted(row, v)
        return bool(i < row.size and row[i] == v)

    def edge_codes(self):
        """Sorted int64 codes u * n + v over undirected edges with u < v."""
        rows = self._row_index()
        fwd = rows < self.neighbors
        return rows[fwd].astype(np.int64) * self.n + self.neighbors[fwd]

    def edge_array(self):
        """(m, 2) array of undirected edges sorted by (u, v)."""
        codes = self.edge_codes()
        out = np.empty((codes.size, 2), dtype=np.int64)
        out[:, 0] = codes // self.n
        out[:, 1] = codes % self.n
        return out

    def _row_index(self):
        if self._rows is None:
            rows = np.repeat(
                np.arange(self.n, dtype=np.int32), np.diff(self.offsets)
            )
            rows.flags.writeable = False
            self._rows = rows
        return self._rows

    def validate(self):
        """Recheck every structural invariant; raises ValueError on failure."""
        if self.offsets.size != self.n + 1:
            raise ValueError("offset array has wrong length")
        if self.offsets[0] != 0 or self.offsets[-1] != self.neighbors.size:
            raise ValueError("offset array endpoints are wrong")
        if np.any(np.diff(self.offsets) < 0):
            raise ValueError("offsets not monotone")
        if self.neighbors.size:
            if self.neighbors.min() < 0 or self.neighbors.max() >= self.n:
                raise ValueError("neighbor id out of range")
        rows = self._row_index()
        if np.any(rows == self.neighbors):
            raise ValueError("self-loop present")
        d = rows.astype(np.int64) * self.n + self.neighbors
        order_break = np.flatnonzero(d[1:] <= d[:-1])
        boundary = np.cumsum(np.diff(self.offsets))[:-1] - 1
        bad = np.setdiff1d(order_break, boundary, assume_unique=False)
        if bad.size:
            raise ValueError("neighbor list not sorted or duplicated")
        rev = self.neighbors.astype(np.int64) * self.n + rows
        if not np.array_equal(np.sort(rev), d):
            raise ValueError("adjacency not symmetric")

    def __eq__(self, other):
        return (
            isinstance(other, SparseGraph)
            and self.n == other.n
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.neighbors, other.neighbors)
        )

    def __repr__(self):
        kind = self.meta.get("kind", "graph")
        return "SparseGraph(%s, n=%d, m=%d)" % (kind, self.n, self.m)


def gather_slices(offsets, data, verts):
    """Concatenate data[offsets[v]:offsets[v+1]] over verts, preserving order.

    Returns (flat, lengths).  Pure numpy, no per-vertex Python loop.
    """
    verts = np.asarray(verts, dtype=np.int64)
    starts = offsets[verts]
    lens = offsets[verts + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return data[:0], lens
    idx = np.repeat(starts - np.concatenate(([0], np.cumsum(lens)[:-1])), lens)
    idx += np.arange(total, dtype=np.int64)
    return data[idx], lens


def count_edges_inside(g: SparseGraph, verts) -> int:
    """Number of edges of g with both endpoints in verts."""
    verts = np.asarray(verts, dtype=np.int64)
    if verts.size == 0:
        return 0
    mask = np.zeros(g.n, dtype=bool)
    mask[verts] = True
    flat, _ = gather_slices(g.offsets, g.neighbors, verts)
    inside = int(np.count_nonzero(mask[flat]))
    assert inside % 2 == 0
    return inside // 2


def bipartite_coloring(g: SparseGraph):
    """Two-color g by BFS.  Returns (is_bipartite, colors or None)."""
    color = np.full(g.n, -1, dtype=np.int8)
    for start in range(g.n):
        if color[start] >= 0:
            continue
        color[start] = 0
        frontier = np.array([start], dtype=np.int64)
        while frontier.size:
            # all frontier vertices sit in one BFS layer, hence one color
            layer_color = int(color[frontier[0]])
            flat, _ = gather_slices(g.offsets, g.neighbors, frontier)
            if np.any(color[flat] == layer_color):
                return False, None
            nxt = np.unique(flat[color[flat] == -1])
            color[nxt] = 1 - layer_color
            frontier = nxt
    return True, color


def connected_components(g: SparseGraph) -> int:
    """Number of connected components."""
    seen = np.zeros(g.n, dtype=bool)
    comps = 0
    for start in range(g.n):
        if seen[start]:
            continue
        comps += 1
        seen[start] = True
        frontier = np.array([start], dtype=np.int64)
        while frontier.size:
            flat, _ = gather_slices(g.offsets, g.neighbors, frontier)
            fresh = ~seen[flat]
            nxt = np.unique(flat[fresh])
            seen[nxt] = True
            frontier = nxt
    return comps
