"""Eigenvalue computations and spectral spot checks.

Both solvers are implemented here rather than delegated, so tolerance
semantics are explicit and identical everywhere the package runs: a
two-sided Jacobi rotation scheme for dense symmetric matrices, and a
Lanczos iteration with full reorthogonalization for extreme eigenpairs
of large sparse adjacency matrices.  numpy supplies array plumbing only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NoConvergence, SizeLimit, TheoremViolation
from .graphs import SparseGraph, bipartite_coloring, connected_components, \
    count_edges_inside

DENSE_LIMIT = 2000


def _round_robin_rounds(n: int):
    """Round-robin pairing: n-1 rounds of disjoint pairs covering all pairs."""
    ids = list(range(n)) if n % 2 == 0 else list(range(n)) + [-1]
    m = len(ids)
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = ids[i], ids[m - 1 - i]
            if a >= 0 and b >= 0:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps), np.array(qs)))
        ids = [ids[0], ids[-1]] + ids[1:-1]
    return rounds


def jacobi_eigh(a, tol: float = 1e-13, max_sweeps: int = 60):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Disjoint pairs rotate in batches (round-robin ordering), which keeps
    the per-sweep work in whole-array numpy operations.  Returns
    (eigenvalues descending, eigenvectors as columns).  Converged when
    the off-diagonal Frobenius mass drops below tol * ||A||_F.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    if not np.allclose(a, a.T, atol=0, rtol=0, equal_nan=False):
        raise ValueError("matrix is not symmetric")
    v = np.eye(n)
    norm = np.linalg.norm(a)
    if norm == 0 or n == 1:
        w = np.diag(a).copy()
        order = np.argsort(-w)
        return w[order], v[:, order]
    rounds = _round_robin_rounds(n)
    for _ in range(max_sweeps):
        off = np.sqrt(max(norm**2 - (np.diag(a) ** 2).sum(), 0.0))
        if off <= tol * norm:
            break
        for ps, qs in rounds:
            apq = a[ps, qs]
            live = np.abs(apq) > 1e-300
            if not np.any(live):
                continue
            p, q = ps[live], qs[live]
            apq = apq[live]
            app, aqq = a[p, p], a[q, q]
            tau = (aqq - app) / (2.0 * apq)
            t = np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(tau == 0, 1.0, t)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            cp = a[:, p].copy()
            cq = a[:, q].copy()
            a[:, p] = c * cp - s * cq
            a[:, q] = s * cp + c * cq
            rp = a[p, :].copy()
            rq = a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            vp = v[:, p].copy()
            vq = v[:, q].copy()
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
    else:
        raise NoConvergence("jacobi sweeps exhausted at off=%.3e" % off)
    w = np.diag(a).copy()
    order = np.argsort(-w)
    return w[order], v[:, order]


def adjacency_matvec(g: SparseGraph, x):
    """A @ x for the 0/1 adjacency, exact for integer input dtypes."""
    x = np.asarray(x)
    gathered = x[g.neighbors]
    out = np.zeros(g.n, dtype=gathered.dtype)
    starts = g.offsets[:-1]
    lens = np.diff(g.offsets)
    nonempty = lens > 0
    seg = np.add.reduceat(gathered, starts[nonempty]) if np.any(nonempty) else []
    out[nonempty] = seg
    return out


def dense_adjacency(g: SparseGraph):
    if g.n > DENSE_LIMIT:
        raise SizeLimit("dense path limited to %d vertices" % DENSE_LIMIT)
    a = np.zeros((g.n, g.n), dtype=np.float64)
    rows = np.repeat(np.arange(g.n), np.diff(g.offsets))
    a[rows, g.neighbors] = 1.0
    return a


@dataclass
class SpectralReport:
    """Eigenvalues with residual norms and derived regular-graph facts.

    eigenvalues are sorted descending.  For the dense method the list is
    the full spectrum; for lanczos it contains the certified extreme Ritz
    values.  lam is the largest non-principal magnitude, where for a
    connected regular bipartite graph the trivial -d eigenvalue counts as
    principal alongside +d.
    """

    method: str
    eigenvalues: list
    residuals: list
    n: int
    d: Optional[int] = None
    lam: Optional[float] = None
    iterations: int = 0
    stats: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "method": self.method,
            "n": self.n,
            "d": self.d,
            "lambda": self.lam,
            "iterations": self.iterations,
            "eigenvalues": list(map(float, self.eigenvalues)),
            "residuals": list(map(float, self.residuals)),
            "stats": self.stats,
        }


def _regular_degree(g: SparseGraph):
    d = g.degrees()
    if d.size and np.all(d == d[0]):
        return int(d[0])
    return None


def _principal_mask(eigenvalues, d, bipartite):
    """Mark one +d (and for bipartite graphs one -d) entry as principal."""
    w = np.asarray(eigenvalues)
    mask = np.zeros(w.size, dtype=bool)
    if d is None or w.size == 0:
        mask[int(np.argmax(w))] = True
        return mask
    mask[int(np.argmin(np.abs(w - d)))] = True
    if bipartite:
        js = np.argsort(np.abs(w + d))
        j = int(js[0]) if not mask[int(js[0])] else int(js[1]) if w.size > 1 else None
        if j is not None and abs(w[j] + d) < 1e-6 * max(1.0, d):
            mask[j] = True
    return mask


def dense_spectrum(g: SparseGraph) -> SpectralReport:
    """Full spectrum by the in-repo Jacobi solver; n is capped at 2000.

    Residuals are ||A v - w v||_2 per eigenpair, computed against the
    original matrix.
    """
    a = dense_adjacency(g)
    w, v = jacobi_eigh(a)
    r = a @ v - v * w[None, :]
    residuals = np.linalg.norm(r, axis=0)
    d = _regular_degree(g)
    bip = False
    if d is not None and connected_components(g) == 1:
        bip = bipartite_coloring(g)[0]
    mask = _principal_mask(w, d, bip)
    lam = float(np.abs(w[~mask]).max()) if np.any(~mask) else None
    return SpectralReport(
        method="dense",
        eigenvalues=w.tolist(),
        residuals=residuals.tolist(),
        n=g.n,
        d=d,
        lam=lam,
        stats={"bipartite": bip},
    )


def extreme_eigs(
    g: SparseGraph,
    k: int = 2,
    tol: float = 1e-8,
    max_iter: Optional[int] = None,
    seed: int = 7,
) -> SpectralReport:
    """k algebraically largest and k smallest eigenpairs by Lanczos.

    Full reorthogonalization at every step; residuals are explicit
    ||A y - theta y||_2 of the returned Ritz pairs, certified <= tol.
    Raises NoConvergence once the iteration cap (default 10 k sqrt(n))
    is exhausted.
    """
    if not 1 <= k <= 8:
        raise ValueError("k must be between 1 and 8")
    n = g.n
    if max_iter is None:
        max_iter = max(2 * k + 2, int(10 * k * np.sqrt(n)))
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n)
    v0 /= np.linalg.norm(v0)
    vs = [v0]
    alphas, betas = [], []
    scale = max(1.0, float(g.degrees().max()) if n else 1.0)
    exhausted = False
    it = 0
    while True:
        it += 1
        if it > max_iter:
            raise NoConvergence(
                "lanczos did not reach tol=%.1e within %d iterations"
                % (tol, max_iter)
            )
        vj = vs[-1]
        w = adjacency_matvec(g, vj)
        if len(vs) > 1:
            w = w - betas[-1] * vs[-2]
        alphas.append(float(w @ vj))
        w = w - alphas[-1] * vj
        basis = np.stack(vs, axis=1)
        w -= basis @ (basis.T @ w)
        w -= basis @ (basis.T @ w)
        beta = float(np.linalg.norm(w))
        m = len(alphas)
        if beta <= 1e-12 * scale or m >= n:
            exhausted = True
        done = exhausted
        if not done and m >= 2 * k:
            tmat = np.diag(alphas)
            idx = np.arange(m - 1)
            tmat[idx, idx + 1] = betas
            tmat[idx + 1, idx] = betas
            theta, svecs = jacobi_eigh(tmat)
            bounds = beta * np.abs(svecs[-1, :])
            sel = list(range(min(k, m))) + list(range(max(0, m - k), m))
            done = bool(np.all(bounds[sorted(set(sel))] <= tol))
        if done:
            break
        betas.append(beta)
        vs.append(w / beta)

    m = len(alphas)
    tmat = np.diag(alphas)
    if m > 1:
        idx = np.arange(m - 1)
        tmat[idx, idx + 1] = betas[: m - 1]
        tmat[idx + 1, idx] = betas[: m - 1]
    theta, svecs = jacobi_eigh(tmat)
    sel = sorted(set(list(range(min(k, m))) + list(range(max(0, m - k), m))))
    basis = np.stack(vs[:m], axis=1)
    ritz_vecs = basis @ svecs[:, sel]
    ritz_vals = theta[sel]
    residuals = []
    for col, val in zip(ritz_vecs.T, ritz_vals):
        col = col / np.linalg.norm(col)
        residuals.append(float(np.linalg.norm(adjacency_matvec(g, col) - val * col)))
    if not exhausted and any(r > tol for r in residuals):
        raise NoConvergence("ritz residuals above tol after convergence test")

    d = _regular_degree(g)
    bip = False
    if d is not None and connected_components(g) == 1:
        bip = bipartite_coloring(g)[0]
    mask = _principal_mask(ritz_vals, d, bip)
    lam = float(np.abs(ritz_vals[~mask]).max()) if np.any(~mask) else None
    return SpectralReport(
        method="lanczos",
        eigenvalues=list(map(float, ritz_vals)),
        residuals=residuals,
        n=n,
        d=d,
        lam=lam,
        iterations=m,
        stats={"bipartite": bip, "krylov_exhausted": exhausted},
    )


def verify_ndl(g: SparseGraph, d: int, lambda_bound: float, tol: float = 1e-6) -> bool:
    """Check exact d-regularity and |non-principal spectrum| <= bound + tol.

    Uses the dense solver for small graphs and Lanczos extremes above
    that.  For a connected bipartite regular graph the forced -d
    eigenvalue is treated as principal, matching the convention that its
    non-trivial spectrum starts at the second largest magnitude.
    """
    ones = np.ones(g.n, dtype=np.int64)
    if not np.array_equal(adjacency_matvec(g, ones), d * ones):
        return False
    connected = connected_components(g) == 1
    bip = bipartite_coloring(g)[0] if connected else False
    if g.n <= 600:
        w = np.asarray(dense_spectrum(g).eigenvalues)
        mask = _principal_mask(w, d, bip)
        if abs(w[int(np.argmax(w))] - d) > tol:
            return False
        return bool(np.all(np.abs(w[~mask]) <= lambda_bound + tol))
    rep = extreme_eigs(g, k=2, tol=min(tol * 1e-2, 1e-8))
    w = np.sort(np.asarray(rep.eigenvalues))[::-1]
    if abs(w[0] - d) > tol:
        return False
    if w.size > 1 and w[1] > lambda_bound + tol:
        return False
    low = w[-1]
    if bip:
        if abs(low + d) > tol:
            return False
        if w.size > 1 and -w[-2] > lambda_bound + tol:
            return False
    elif -low > lambda_bound + tol:
        return False
    return True


def mixing_check(g: SparseGraph, sets, q: Optional[int] = None):
    """Assert the expander-mixing edge bound on every sampled set.

    For the q(q+1)-regular base graph with second eigenvalue q + 1,
    every vertex set X satisfies

        | e(X) - q/(q^2+1) * C(|X|, 2) |  <=  (q + 1) |X|.

    Edge counts come from adjacency; the comparison is exact integer
    arithmetic.  A violation raises TheoremViolation: it means a bug in
    the construction or the counting, never a statistical fluctuation.
    """
    if q is None:
        d = _regular_degree(g)
        if d is None:
            raise ValueError("graph is not regular; pass q explicitly")
        q = int((np.sqrt(4 * d + 1) - 1) / 2 + 0.5)
        if q * (q + 1) != d:
            raise ValueError("degree %d is not of the form q(q+1)" % d)
    den = q * q + 1
    max_ratio = 0.0
    checked = 0
    for X in sets:
        X = np.unique(np.asarray(X, dtype=np.int64))
        if X.size == 0:
            continue
        e = count_edges_inside(g, X)
        size = int(X.size)
        lhs = abs(e * den * 2 - q * size * (size - 1))
        rhs = 2 * (q + 1) * size * den
        if lhs > rhs:
            raise TheoremViolation(
                "mixing bound violated on |X|=%d with e=%d" % (size, e),
                witness={"size": size, "edges": e},
            )
        checked += 1
        if rhs:
            max_ratio = max(max_ratio, lhs / rhs)
    return {"checked": checked, "max_ratio": max_ratio, "q": q}
