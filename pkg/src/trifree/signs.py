"""Per-clique random bipartitions driven by a counter-based hash.

Each (clique i, slot j) incidence gets an independent fair sign:

    z = seed XOR (i * 0xA24BAED4963EE407) XOR (j * 0x9FB21C651E98DF25)
    sign = +1  iff bit 0 of mix64(z) is 0

with everything in 64-bit wrapping arithmetic and mix64 the finalizer

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

Slot j is the position of a vertex within its clique's sorted member
list.  Because the sign depends only on (seed, i, j), the assignment is
reproducible bit-for-bit regardless of evaluation order, chunking, or
thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cover import CliqueCover
from .graphs import SparseGraph

MIX_MUL_1 = 0xBF58476D1CE4E5B9
MIX_MUL_2 = 0x94D049BB133111EB
CLIQUE_SALT = 0xA24BAED4963EE407
SLOT_SALT = 0x9FB21C651E98DF25
_MASK = (1 << 64) - 1


def mix64(z: int) -> int:
    """The 64-bit finalizer above, on plain Python integers."""
    z &= _MASK
    z ^= z >> 30
    z = (z * MIX_MUL_1) & _MASK
    z ^= z >> 27
    z = (z * MIX_MUL_2) & _MASK
    z ^= z >> 31
    return z


def mix64_arr(z):
    """Vectorized mix64 on a uint64 array."""
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(MIX_MUL_1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(MIX_MUL_2)
    z ^= z >> np.uint64(31)
    return z


def sign_of(seed: int, clique: int, slot: int) -> int:
    """The sign of one (clique, slot) incidence, scalar reference path."""
    z = (seed ^ (clique * CLIQUE_SALT) ^ (slot * SLOT_SALT)) & _MASK
    return 1 if mix64(z) & 1 == 0 else -1


@dataclass
class SignAssignment:
    """Signs for every (clique, slot) incidence of a cover.

    flat[k] is the sign of slot k of the flattened clique member list,
    so it aligns with cover.flat_members and cover.offsets.
    """

    seed: int
    flat: np.ndarray

    def for_clique(self, cover: CliqueCover, i: int):
        o = cover.offsets
        return self.flat[o[i] : o[i + 1]]

    def classes(self, cover: CliqueCover, i: int):
        """(plus_members, minus_members) of clique i."""
        members = cover.cliques[i]
        s = self.for_clique(cover, i)
        return members[s > 0], members[s < 0]

    def split_edges_per_clique(self, cover: CliqueCover):
        """|A_i| * |B_i| per clique: the opposite-sign pair counts."""
        o = cover.offsets
        cum = np.concatenate(([0], np.cumsum(self.flat > 0)))
        plus = cum[o[1:]] - cum[o[:-1]]
        return plus * (cover.sizes - plus)

    def split_edge_total(self, cover: CliqueCover) -> int:
        return int(self.split_edges_per_clique(cover).sum())


def assign_signs(cover: CliqueCover, seed: int) -> SignAssignment:
    """Deterministic signs for every incidence of the cover."""
    sizes = cover.sizes
    i = np.repeat(np.arange(len(cover.cliques), dtype=np.uint64), sizes)
    total = int(sizes.sum())
    offsets = cover.offsets
    j = np.arange(total, dtype=np.uint64) - np.repeat(
        offsets[:-1].astype(np.uint64), sizes
    )
    z = np.uint64(seed & _MASK) ^ (i * np.uint64(CLIQUE_SALT))
    z ^= j * np.uint64(SLOT_SALT)
    bits = mix64_arr(z) & np.uint64(1)
    flat = np.where(bits == 0, 1, -1).astype(np.int8)
    flat.flags.writeable = False
    return SignAssignment(seed=seed, flat=flat)


def build_split_graph(cover: CliqueCover, signs: SignAssignment) -> SparseGraph:
    """Union over cliques of the complete bipartite graph between classes.

    Keeps exactly the in-clique pairs whose endpoints carry opposite
    signs.  Every kept pair is unique because the cover owns each pair
    once, so the result is a simple graph.
    """
    su = signs.flat[cover.pair_flat_u]
    sv = signs.flat[cover.pair_flat_v]
    keep = su != sv
    codes = cover.pair_codes[keep]
    return SparseGraph.from_pairs(
        cover.n,
        codes // cover.n,
        codes % cover.n,
        meta={"kind": "split", "seed": signs.seed},
    )


@dataclass
class SubsetStats:
    """Exact per-subset counts for a vertex set X.

    member_counts[i] and sign_sums[i] are t_i = |clique_i intersect X| and
    the within-X sign sum of clique_i, over cliques meeting X only.
    quad_form is Q = sum_i (sign_sum_i^2 - t_i), and the counts satisfy
    the exact integer identities

        4 * split_edges = 2 * base_edges - quad_form
        frobenius_sq    = 2 * base_edges
        operator_norm   = max_i (t_i - 1) <= q.
    """

    size: int
    base_edges: int
    split_edges: int
    cliques_met: int
    members_total: int
    quad_form: int
    frobenius_sq: int
    operator_norm: int
    clique_ids: np.ndarray
    member_counts: np.ndarray
    sign_sums: np.ndarray


def subset_stats(X, cover: CliqueCover, signs: SignAssignment) -> SubsetStats:
    """Clique-side statistics of a vertex subset, all exact integers."""
    X = np.unique(np.asarray(X, dtype=np.int64))
    if X.size and (X[0] < 0 or X[-1] >= cover.n):
        raise ValueError("vertex id out of range")
    inc_offsets, flat_pos = cover.vertex_incidences()
    clique_of = cover.incidence_cliques()

    from .graphs import gather_slices

    pos, _ = gather_slices(inc_offsets, flat_pos, X)
    cl = clique_of[pos]
    sg = signs.flat[pos].astype(np.int64)
    order = np.argsort(cl, kind="stable")
    cl, sg = cl[order], sg[order]
    boundaries = np.concatenate(
        ([0], np.flatnonzero(cl[1:] != cl[:-1]) + 1)
    ) if cl.size else np.zeros(0, dtype=np.int64)
    if cl.size:
        ids = cl[boundaries]
        t = np.diff(np.concatenate((boundaries, [cl.size])))
        sums = np.add.reduceat(sg, boundaries)
    else:
        ids = np.zeros(0, dtype=np.int64)
        t = np.zeros(0, dtype=np.int64)
        sums = np.zeros(0, dtype=np.int64)

    t2 = int((t * t).sum())
    tt = int(t.sum())
    s2 = int((sums * sums).sum())
    base_edges = (t2 - tt) // 2
    quad_form = s2 - tt
    split_edges = (t2 - s2) // 4
    stats = SubsetStats(
        size=int(X.size),
        base_edges=base_edges,
        split_edges=split_edges,
        cliques_met=int(ids.size),
        members_total=tt,
        quad_form=quad_form,
        frobenius_sq=t2 - tt,
        operator_norm=int(t.max() - 1) if t.size else 0,
        clique_ids=ids,
        member_counts=t,
        sign_sums=sums,
    )
    assert 4 * stats.split_edges == 2 * stats.base_edges - stats.quad_form
    return stats
