"""The symplectic generalized quadrangle W(q).

Points are the points of projective 3-space PG(3, q), normalized so the
first nonzero coordinate is 1 and enumerated in lexicographic coordinate
order.  Lines are the totally isotropic lines of the alternating form

    B(x, y) = x0*y1 - x1*y0 + x2*y3 - x3*y2

(indices 0-based; in characteristic 2 the minus signs are plus signs).
Each point lies on q + 1 lines and each line carries q + 1 points, and
the point-line geometry satisfies the generalized quadrangle axiom: for
a point P off a line L, exactly one point of L is collinear with P.
Consequently no three lines pairwise meet in three distinct points, the
fact the downstream triangle-freeness argument consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certify import Certificate
from .gf import GF


def projective_size(q: int) -> int:
    """Number of points of PG(3, q), which equals the number of lines of W(q)."""
    return q**3 + q**2 + q + 1


def symplectic_form(gf: GF, x, y) -> int:
    """B(x, y) for a pair of coordinate 4-tuples."""
    t1 = gf.sub(gf.mul(x[0], y[1]), gf.mul(x[1], y[0]))
    t2 = gf.sub(gf.mul(x[2], y[3]), gf.mul(x[3], y[2]))
    return gf.add(t1, t2)


def form_arr(gf: GF, x, y):
    """Vectorized B over trailing-axis-4 coordinate arrays."""
    x = np.asarray(x)
    y = np.asarray(y)
    t1 = gf.sub_arr(
        gf.mul_arr(x[..., 0], y[..., 1]), gf.mul_arr(x[..., 1], y[..., 0])
    )
    t2 = gf.sub_arr(
        gf.mul_arr(x[..., 2], y[..., 3]), gf.mul_arr(x[..., 3], y[..., 2])
    )
    return gf.add_arr(t1, t2)


def encode_coords(coords, q: int):
    """Pack coordinate rows into int64 codes; order-isomorphic to lex order."""
    c = np.asarray(coords, dtype=np.int64)
    return ((c[..., 0] * q + c[..., 1]) * q + c[..., 2]) * q + c[..., 3]


def enumerate_points(gf: GF):
    """All normalized points of PG(3, q) in lexicographic coordinate order."""
    q = gf.q
    blocks = []
    blocks.append(np.array([[0, 0, 0, 1]], dtype=np.int16))
    b = np.zeros((q, 4), dtype=np.int16)
    b[:, 2] = 1
    b[:, 3] = np.arange(q)
    blocks.append(b)
    free = np.indices((q, q)).reshape(2, -1).T.astype(np.int16)
    b = np.zeros((q * q, 4), dtype=np.int16)
    b[:, 1] = 1
    b[:, 2:] = free
    blocks.append(b)
    free = np.indices((q, q, q)).reshape(3, -1).T.astype(np.int16)
    b = np.zeros((q**3, 4), dtype=np.int16)
    b[:, 0] = 1
    b[:, 1:] = free
    blocks.append(b)
    coords = np.concatenate(blocks)
    assert coords.shape == (projective_size(q), 4)
    return coords


_PIVOT_PATTERNS = (
    # (pivot columns, free positions in row 1, free positions in row 2)
    ((0, 1), (2, 3), (2, 3)),
    ((0, 2), (1, 3), (3,)),
    ((0, 3), (1, 2), ()),
    ((1, 2), (3,), (3,)),
    ((1, 3), (2,), ()),
    ((2, 3), (), ()),
)


def _candidate_bases(q: int):
    """All reduced-echelon bases of 2-dimensional subspaces of F^4.

    Yields (row1, row2) coordinate arrays per pivot pattern.  Every line
    of PG(3, q) appears exactly once across all patterns.
    """
    for (c1, c2), free1, free2 in _PIVOT_PATTERNS:
        nfree = len(free1) + len(free2)
        combos = (
            np.indices((q,) * nfree).reshape(nfree, -1).T.astype(np.int16)
            if nfree
            else np.zeros((1, 0), dtype=np.int16)
        )
        count = combos.shape[0]
        r1 = np.zeros((count, 4), dtype=np.int16)
        r2 = np.zeros((count, 4), dtype=np.int16)
        r1[:, c1] = 1
        r2[:, c2] = 1
        for i, col in enumerate(free1):
            r1[:, col] = combos[:, i]
        for i, col in enumerate(free2):
            r2[:, col] = combos[:, len(free1) + i]
        yield r1, r2


@dataclass
class Quadrangle:
    """W(q) with all incidences materialized.

    Attributes:
        gf: the coordinate field.
        coords: (n, 4) normalized point coordinates, lexicographic order.
        line_points: (n, q + 1) point ids per line, each row sorted.
        line_basis: (n, 2, 4) reduced-echelon spanning pair per line;
            rows of line i are sorted by this basis lexicographically.
        point_lines: (n, q + 1) line ids through each point, rows sorted.
    """

    gf: GF
    coords: np.ndarray
    line_points: np.ndarray
    line_basis: np.ndarray
    point_lines: np.ndarray

    @property
    def q(self) -> int:
        return self.gf.q

    @property
    def n_points(self) -> int:
        return self.coords.shape[0]

    @property
    def n_lines(self) -> int:
        return self.line_points.shape[0]

    def point_index(self, coord) -> int:
        code = int(encode_coords(np.asarray(coord), self.q))
        codes = encode_coords(self.coords, self.q)
        i = int(np.searchsorted(codes, code))
        if i == len(codes) or codes[i] != code:
            raise KeyError("not a normalized point: %r" % (coord,))
        return i


def build_quadrangle(q: int) -> Quadrangle:
    """Enumerate W(q) and materialize point-line incidence both ways."""
    gf = GF(q)
    coords = enumerate_points(gf)
    n = coords.shape[0]
    point_codes = encode_coords(coords, q)
    assert np.all(point_codes[1:] > point_codes[:-1])

    bases1, bases2 = [], []
    for r1, r2 in _candidate_bases(q):
        iso = form_arr(gf, r1, r2) == 0
        bases1.append(r1[iso])
        bases2.append(r2[iso])
    r1 = np.concatenate(bases1)
    r2 = np.concatenate(bases2)
    assert r1.shape[0] == n, "isotropic line count must equal point count"

    order = np.lexsort((encode_coords(r2, q), encode_coords(r1, q)))
    r1, r2 = r1[order], r2[order]

    # points of span{r1, r2}: r2 itself plus r1 + t*r2 over all t; each is
    # already normalized because r2 vanishes at r1's pivot column
    t = np.arange(q, dtype=np.int16)
    mixed = gf.add_arr(
        r1[:, None, :], gf.mul_arr(t[None, :, None], r2[:, None, :])
    )
    pts = np.concatenate([r2[:, None, :], mixed], axis=1)
    ids = np.searchsorted(point_codes, encode_coords(pts, q))
    assert np.array_equal(point_codes[ids], encode_coords(pts, q))
    line_points = np.sort(ids, axis=1).astype(np.int32)

    line_basis = np.stack([r1, r2], axis=1)

    flat_pts = line_points.ravel().astype(np.int64)
    flat_lines = np.repeat(np.arange(n, dtype=np.int64), q + 1)
    counts = np.bincount(flat_pts, minlength=n)
    assert np.all(counts == q + 1), "every point must lie on q + 1 lines"
    order = np.lexsort((flat_lines, flat_pts))
    point_lines = flat_lines[order].reshape(n, q + 1).astype(np.int32)

    for arr in (coords, line_points, line_basis, point_lines):
        arr.flags.writeable = False
    return Quadrangle(gf, coords, line_points, line_basis, point_lines)


# -- certification -----------------------------------------------------------

def _pair_slots(width: int):
    iu, iv = np.triu_indices(width, k=1)
    return iu, iv


def _within_line_pairs(quad: Quadrangle, chunk: int = 4096):
    """Yield (u, v) arrays over all unordered point pairs inside lines."""
    iu, iv = _pair_slots(quad.q + 1)
    for lo in range(0, quad.n_lines, chunk):
        rows = quad.line_points[lo : lo + chunk].astype(np.int64)
        yield rows[:, iu].ravel(), rows[:, iv].ravel()


def certify_gq(
    quad: Quadrangle,
    mode: str = "auto",
    samples: int = 100_000,
    seed: int = 1,
) -> Certificate:
    """Certify that the enumerated geometry is a generalized quadrangle.

    Checks, in order:
      counts      n points and n lines with n = q^3 + q^2 + q + 1;
      regularity  q + 1 points per line and lines per point;
      isotropy    B vanishes on every pair inside every line (exhaustive
                  at every q; this is cheap);
      uniqueness  no two lines share two points (exhaustive at every q);
      perp count  each point has exactly q^2 + q points y != P with
                  B(P, y) = 0 (exhaustive for small q, sampled roots
                  otherwise);
      axiom       for non-incident (P, L), exactly one point of L is
                  collinear with P;
      triangles   no three lines pairwise meet in three distinct points.

    In exhaustive mode (auto for q <= 8) the axiom and triangle checks
    cover every configuration, with collinearity taken directly from the
    enumerated lines.  In sampled mode they draw `samples` random
    configurations and decide collinearity through the form: uniqueness,
    regularity and isotropy force |N(P)| = q^2 + q collinear points all
    lying in the perp of P, and the perp-count check pins the perp size
    to the same number, so B(P, y) = 0 with y != P is equivalent to
    collinearity.
    """
    q, n = quad.q, quad.n_points
    if mode == "auto":
        mode = "exhaustive" if q <= 8 else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise ValueError("unknown mode %r" % mode)
    gf = quad.gf
    stats = {"mode": mode, "points": n, "lines": quad.n_lines, "q": q}

    def fail(witness):
        return Certificate("gq-axioms", False, witness, stats)

    # counts and regularity
    if quad.n_points != projective_size(q) or quad.n_lines != projective_size(q):
        return fail({"check": "counts"})
    if quad.line_points.shape[1] != q + 1 or quad.point_lines.shape[1] != q + 1:
        return fail({"check": "regularity"})
    counts = np.bincount(quad.line_points.ravel(), minlength=n)
    if not np.all(counts == q + 1):
        v = int(np.flatnonzero(counts != q + 1)[0])
        return fail({"check": "regularity", "point": v})

    # isotropy and pair uniqueness, exhaustively over all in-line pairs
    pair_codes = []
    checked_pairs = 0
    for u, v in _within_line_pairs(quad):
        b = form_arr(gf, quad.coords[u], quad.coords[v])
        if np.any(b != 0):
            i = int(np.flatnonzero(b != 0)[0])
            return fail(
                {"check": "isotropy", "pair": (int(u[i]), int(v[i]))}
            )
        if np.any(u == v):
            i = int(np.flatnonzero(u == v)[0])
            return fail({"check": "repeated-point", "point": int(u[i])})
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        pair_codes.append(lo * n + hi)
        checked_pairs += int(u.size)
    stats["pairs_checked"] = checked_pairs
    codes = np.concatenate(pair_codes)
    codes.sort()
    dup = np.flatnonzero(codes[1:] == codes[:-1])
    if dup.size:
        c = int(codes[int(dup[0])])
        return fail({"check": "pair-uniqueness", "pair": (c // n, c % n)})

    rng = np.random.default_rng(seed)

    # perp counts: zeros of B(P, .) among all points, diagonal included
    if mode == "exhaustive":
        roots = np.arange(n)
    else:
        roots = np.unique(rng.integers(0, n, size=min(256, n)))
    for lo in range(0, roots.size, 64):
        batch = roots[lo : lo + 64]
        bvals = form_arr(
            gf, quad.coords[batch][:, None, :], quad.coords[None, :, :]
        )
        perp_sizes = np.count_nonzero(bvals == 0, axis=1)
        if not np.all(perp_sizes == q * q + q + 1):
            i = int(np.flatnonzero(perp_sizes != q * q + q + 1)[0])
            return fail({"check": "perp-count", "point": int(batch[i])})
    stats["perp_roots"] = int(roots.size)

    if mode == "exhaustive":
        adj = np.zeros((n, n), dtype=np.float64)
        u = codes // n
        v = codes % n
        adj[u, v] = 1.0
        adj[v, u] = 1.0
        inc = np.zeros((n, quad.n_lines), dtype=np.float64)
        inc[
            quad.line_points.ravel(),
            np.repeat(np.arange(quad.n_lines), q + 1),
        ] = 1.0
        coll_count = adj @ inc
        want = np.where(inc > 0, float(q), 1.0)
        if not np.array_equal(coll_count, want):
            p, l = np.unravel_index(
                int(np.argmax(coll_count != want)), coll_count.shape
            )
            return fail(
                {
                    "check": "gq-axiom",
                    "point": int(p),
                    "line": int(l),
                    "collinear_points": int(coll_count[p, l]),
                }
            )
        stats["axiom_pairs"] = int(n * quad.n_lines - n * (q + 1))

        tri = float((adj @ adj * adj).sum()) / 6.0
        expected = quad.n_lines * (q + 1) * q * (q - 1) // 6
        stats["triangles"] = int(tri)
        if tri != expected:
            return fail(_line_triangle_witness(quad, codes))
    else:
        # GQ axiom on sampled non-incident pairs, collinearity via the form
        p_ids = rng.integers(0, n, size=samples)
        l_ids = rng.integers(0, quad.n_lines, size=samples)
        on_line = (quad.line_points[l_ids] == p_ids[:, None]).any(axis=1)
        p_ids, l_ids = p_ids[~on_line], l_ids[~on_line]
        b = form_arr(
            gf,
            quad.coords[p_ids][:, None, :],
            quad.coords[quad.line_points[l_ids]],
        )
        coll = np.count_nonzero(b == 0, axis=1)
        if np.any(coll != 1):
            i = int(np.flatnonzero(coll != 1)[0])
            return fail(
                {
                    "check": "gq-axiom",
                    "point": int(p_ids[i]),
                    "line": int(l_ids[i]),
                    "collinear_points": int(coll[i]),
                }
            )
        stats["axiom_pairs"] = int(p_ids.size)

        # sampled line triangles: u on L1, v on L2, both lines through x,
        # u and v off x; collinearity of u and v would close a triangle
        x = rng.integers(0, n, size=samples)
        through = quad.point_lines[x]
        pick = rng.random((samples, 2))
        l1 = through[np.arange(samples), (pick[:, 0] * (q + 1)).astype(int)]
        l2 = through[np.arange(samples), (pick[:, 1] * (q + 1)).astype(int)]
        keep = l1 != l2
        x, l1, l2 = x[keep], l1[keep], l2[keep]
        u = _random_point_off(quad, l1, x, rng)
        v = _random_point_off(quad, l2, x, rng)
        b = form_arr(gf, quad.coords[u], quad.coords[v])
        if np.any(b == 0):
            i = int(np.flatnonzero(b == 0)[0])
            return fail(
                {
                    "check": "line-triangle",
                    "lines": (int(l1[i]), int(l2[i])),
                    "points": (int(x[i]), int(u[i]), int(v[i])),
                }
            )
        stats["triangle_samples"] = int(x.size)

    return Certificate("gq-axioms", True, None, stats)


def _random_point_off(quad, lines, off_points, rng):
    """One random point per line distinct from the given incident point."""
    rows = quad.line_points[lines]
    k = rows.shape[1]
    choice = rng.integers(0, k - 1, size=rows.shape[0])
    pos_off = np.argmax(rows == off_points[:, None], axis=1)
    choice = np.where(choice >= pos_off, choice + 1, choice)
    return rows[np.arange(rows.shape[0]), choice]


def _line_triangle_witness(quad, codes):
    """Locate a concrete triangle of lines after a count mismatch."""
    n = quad.n_points
    owner = {}
    iu, iv = _pair_slots(quad.q + 1)
    for lid in range(quad.n_lines):
        row = quad.line_points[lid].astype(np.int64)
        for a, b in zip(row[iu], row[iv]):
            owner.setdefault((int(min(a, b)), int(max(a, b))), lid)
    neigh = {}
    for a, b in ((c // n, c % n) for c in codes.tolist()):
        neigh.setdefault(int(a), set()).add(int(b))
        neigh.setdefault(int(b), set()).add(int(a))
    for a in sorted(neigh):
        for b in sorted(x for x in neigh[a] if x > a):
            for c in sorted(neigh[a] & neigh[b]):
                if c <= b:
                    continue
                lines = {
                    owner[(a, b)],
                    owner[(min(a, c), max(a, c))],
                    owner[(min(b, c), max(b, c))],
                }
                if len(lines) > 1:
                    return {
                        "check": "line-triangle",
                        "points": (a, b, c),
                        "lines": tuple(sorted(lines)),
                    }
    return {"check": "line-triangle", "points": None}
