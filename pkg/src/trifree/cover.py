"""Clique covers and the graphs derived from a quadrangle.

The base graph is the union of one clique per line of W(q); it equals the
collinearity graph, is q(q+1)-regular, and every edge lies in exactly one
clique because two points share at most one line.  The incidence graph
puts points and lines on opposite sides of a bipartition; as a generalized
quadrangle incidence graph it has girth 8, which is the structural source
of the cover guarantees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .certify import _owner_of_codes, iter_wedge_batches
from .errors import CoverViolation
from .geometry import Quadrangle
from .graphs import SparseGraph


@dataclass
class CliqueCover:
    """A family of cliques covering every edge of the base graph once.

    Attributes:
        n: number of vertices.
        cliques: list of sorted int32 member arrays.
    Derived pair table (lazy): for every unordered pair inside a clique,
    sorted by code u * n + v, the owning clique and both slot positions.
    """

    n: int
    cliques: list

    _pair_cache: Optional[tuple] = field(default=None, repr=False, compare=False)
    _incidence_cache: Optional[tuple] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.cliques = [np.asarray(c, dtype=np.int32) for c in self.cliques]
        for c in self.cliques:
            if c.size and (c.min() < 0 or c.max() >= self.n):
                raise CoverViolation("clique member out of range")
            if np.any(c[1:] <= c[:-1]):
                raise CoverViolation("clique not sorted or has repeats")

    @property
    def sizes(self):
        return np.array([c.size for c in self.cliques], dtype=np.int64)

    @property
    def offsets(self):
        return np.concatenate(([0], np.cumsum(self.sizes)))

    @property
    def flat_members(self):
        if not self.cliques:
            return np.zeros(0, dtype=np.int32)
        return np.concatenate(self.cliques)

    # -- pair table ----------------------------------------------------------

    def _pairs(self):
        if self._pair_cache is None:
            self._pair_cache = _build_pair_table(self)
        return self._pair_cache

    @property
    def pair_codes(self):
        return self._pairs()[0]

    @property
    def pair_owner(self):
        return self._pairs()[1]

    @property
    def pair_flat_u(self):
        """Index into flat_members of the smaller endpoint of each pair."""
        return self._pairs()[2]

    @property
    def pair_flat_v(self):
        return self._pairs()[3]

    def owner_of(self, u: int, v: int) -> int:
        """The clique covering edge (u, v); -1 if no clique contains both."""
        lo, hi = (u, v) if u < v else (v, u)
        owners, _, found = _owner_of_codes(
            self, np.array([lo * self.n + hi], dtype=np.int64)
        )
        return int(owners[0]) if found[0] else -1

    # -- vertex incidence table ----------------------------------------------

    def vertex_incidences(self):
        """CSR over vertices: positions in flat_members per vertex.

        Returns (offsets, flat_pos) where flat_pos slices give, per vertex,
        the indices into flat_members (equivalently into a flat sign array)
        of every (clique, slot) incidence of that vertex.
        """
        if self._incidence_cache is None:
            members = self.flat_members.astype(np.int64)
            order = np.argsort(members, kind="stable")
            counts = np.bincount(members, minlength=self.n)
            offsets = np.concatenate(([0], np.cumsum(counts)))
            self._incidence_cache = (offsets, order.astype(np.int64))
        return self._incidence_cache

    def incidence_cliques(self):
        """Clique id per entry of flat_members."""
        return np.repeat(
            np.arange(len(self.cliques), dtype=np.int64), self.sizes
        )


def _build_pair_table(cover: CliqueCover):
    sizes = cover.sizes
    if sizes.size == 0 or int(sizes.max()) < 2:
        empty64 = np.zeros(0, dtype=np.int64)
        return empty64, empty64.copy(), empty64.copy(), empty64.copy()
    offsets = cover.offsets
    n = cover.n
    chunks_code, chunks_owner, chunks_fu, chunks_fv = [], [], [], []
    for width in np.unique(sizes):
        if width < 2:
            continue
        which = np.flatnonzero(sizes == width)
        iu, iv = np.triu_indices(int(width), k=1)
        for lo in range(0, which.size, 4096):
            ids = which[lo : lo + 4096]
            base = offsets[ids][:, None]
            fu = (base + iu[None, :]).ravel()
            fv = (base + iv[None, :]).ravel()
            u = cover.flat_members[fu].astype(np.int64)
            v = cover.flat_members[fv].astype(np.int64)
            chunks_code.append(u * n + v)
            chunks_owner.append(np.repeat(ids, iu.size))
            chunks_fu.append(fu)
            chunks_fv.append(fv)
    codes = np.concatenate(chunks_code)
    owner = np.concatenate(chunks_owner)
    fu = np.concatenate(chunks_fu)
    fv = np.concatenate(chunks_fv)
    order = np.argsort(codes, kind="stable")
    codes = codes[order]
    dup = np.flatnonzero(codes[1:] == codes[:-1])
    if dup.size:
        i = int(dup[0])
        c = int(codes[i])
        o = owner[order]
        raise CoverViolation(
            "pair (%d, %d) lies in cliques %d and %d"
            % (c // n, c % n, int(o[i]), int(o[i + 1])),
            witness={"pair": (c // n, c % n), "cliques": (int(o[i]), int(o[i + 1]))},
        )
    return codes, owner[order], fu[order], fv[order]


def cover_from_lines(quad: Quadrangle) -> CliqueCover:
    """One clique per totally isotropic line, in line id order."""
    cliques = [quad.line_points[i] for i in range(quad.n_lines)]
    return CliqueCover(quad.n_points, cliques)


def build_base_graph(quad: Quadrangle):
    """The clique-union (collinearity) graph of W(q) plus its cover.

    Returns (graph, cover).  The graph is q(q+1)-regular on
    n = q^3 + q^2 + q + 1 vertices with n * q(q+1) / 2 edges; a
    CoverViolation from the pair table means two lines share two points.
    """
    q = quad.q
    cover = cover_from_lines(quad)
    codes = cover.pair_codes
    g = SparseGraph.from_pairs(
        quad.n_points,
        codes // quad.n_points,
        codes % quad.n_points,
        meta={"q": q, "kind": "base"},
    )
    assert g.m == quad.n_points * q * (q + 1) // 2
    assert np.all(g.degrees() == q * (q + 1))
    return g, cover


def build_incidence_graph(quad: Quadrangle) -> SparseGraph:
    """Bipartite point-line incidence graph: lines sit at ids n..2n-1."""
    n = quad.n_points
    lines = np.repeat(np.arange(quad.n_lines, dtype=np.int64) + n, quad.q + 1)
    points = quad.line_points.ravel().astype(np.int64)
    g = SparseGraph.from_pairs(
        2 * n, points, lines, meta={"q": quad.q, "kind": "incidence"}
    )
    assert np.all(g.degrees() == quad.q + 1)
    return g


# -- cover file round trip ---------------------------------------------------

COVER_HEADER = "PQCOVER v1"


def save_cover_file(path, cover: CliqueCover):
    from .io import atomic_write_text

    lines = [COVER_HEADER]
    lines.extend(" ".join(str(int(x)) for x in c) for c in cover.cliques)
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_cover_file(path, n: Optional[int] = None, check_triangles=True) -> CliqueCover:
    """Parse and validate a clique cover.

    Runs the unique-ownership check (via the pair table) and, by default,
    the no-straddling-triangle check before accepting the cover.  Raises
    FormatError for malformed input and CoverViolation for a structurally
    invalid cover.
    """
    from .errors import FormatError

    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    rows = text.splitlines()
    if not rows or rows[0] != COVER_HEADER:
        raise FormatError("missing '%s' header" % COVER_HEADER)
    cliques = []
    top = -1
    for lineno, row in enumerate(rows[1:], start=2):
        if not row.strip():
            raise FormatError("blank clique on line %d" % lineno)
        try:
            ids = [int(tok) for tok in row.split()]
        except ValueError:
            raise FormatError("non-integer token on line %d" % lineno) from None
        if any(x < 0 for x in ids):
            raise FormatError("negative vertex id on line %d" % lineno)
        if any(b <= a for a, b in zip(ids, ids[1:])):
            raise FormatError("clique not strictly sorted on line %d" % lineno)
        top = max(top, ids[-1])
        cliques.append(ids)
    if n is None:
        n = top + 1
    cover = CliqueCover(n, cliques)
    cover._pairs()  # unique ownership, raises CoverViolation on overlap
    if check_triangles:
        _reject_straddling_triangles(cover)
    return cover


def _reject_straddling_triangles(cover: CliqueCover):
    """CoverViolation if a base-graph triangle spans multiple cliques."""
    codes = cover.pair_codes
    if codes.size == 0:
        return
    g = SparseGraph.from_pairs(cover.n, codes // cover.n, codes % cover.n)
    for u, v_rep, w_cand, hit in iter_wedge_batches(g):
        if not np.any(hit):
            continue
        v = v_rep[hit].astype(np.int64)
        w = w_cand[hit].astype(np.int64)
        o1, _, _ = _owner_of_codes(cover, np.int64(u) * cover.n + v)
        o2, _, _ = _owner_of_codes(cover, np.int64(u) * cover.n + w)
        o3, _, _ = _owner_of_codes(cover, v * np.int64(cover.n) + w)
        bad = (o1 != o2) | (o2 != o3)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise CoverViolation(
                "triangle (%d, %d, %d) spans cliques" % (u, int(v[i]), int(w[i])),
                witness={
                    "triangle": (int(u), int(v[i]), int(w[i])),
                    "cliques": (int(o1[i]), int(o2[i]), int(o3[i])),
                },
            )
