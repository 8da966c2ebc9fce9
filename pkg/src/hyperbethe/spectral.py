"""Bethe Hessian spectral clustering for non-uniform hypergraphs.

The operator is

    B_eta = I - sum_k (k-1)/((1-eta)(eta+k-1)) D_k
              + sum_k   eta/((1-eta)(eta+k-1)) A_k

with D_k the order-k degree diagonal and A_k the order-k co-membership
matrix.  At eta equal to the bulk radius of the non-backtracking spectrum,
sum_k sqrt(d_k (k-1)), its negative eigenvalues count the detectable
communities and their eigenvectors embed the nodes for k-means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .hypergraph import Hypergraph, Partition
from .sparsesym import SparseSymMatrix


class SpectralError(RuntimeError):
    pass


class EigenConvergenceError(SpectralError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


@dataclass(frozen=True)
class BetheHessian:
    eta: float
    matrix: SparseSymMatrix

    @property
    def n(self):
        return self.matrix.n


@dataclass(frozen=True)
class SpectralConfig:
    eta: float | None = None  # override for the degree-based default
    neg_tol: float = 1e-8  # negative-eigenvalue tolerance, relative to max |diag|
    eig_tol: float = 1e-8  # residual tolerance for the iterative eigensolver
    kmeans_restarts: int = 20
    kmeans_iters: int = 300
    row_normalize: bool = False  # normalize embedding rows before k-means
    seed: int = 0


@dataclass(frozen=True)
class SpectralResult:
    eta: float
    eigenvalues: np.ndarray  # ascending, as many as were extracted
    num_negative: int
    embedding: np.ndarray  # n x k, unit-norm sign-fixed columns
    partition: Partition

    def to_dict(self):
        return {
            "eta": float(self.eta),
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "num_negative": int(self.num_negative),
            "labels": [int(x) for x in self.partition.labels],
            "q": int(self.partition.q),
        }


def bulk_radius(h: Hypergraph, tol=1e-9):
    """Degree-based regularization: sum_k sqrt(d_k (k-1)).

    This is the bulk radius of the non-backtracking spectrum; the operator
    is only informative for eta > 1, so sparser hypergraphs are rejected.
    """
    if h.m < 1:
        raise SpectralError("hypergraph has no hyperedges")
    stats = h.degree_stats()
    eta = sum(math.sqrt(dk * (k - 1)) for k, dk in stats.per_order.items())
    if eta <= 1.0 + tol:
        raise SpectralError(
            f"bulk radius {eta:.6g} <= 1: too sparse for the Bethe Hessian "
            "(mean degrees leave no spectral gap)"
        )
    return eta


def _check_poles(eta, orders):
    poles = [1.0] + [1.0 - k for k in orders]
    for p in poles:
        if abs(eta - p) < 1e-9:
            raise SpectralError(f"eta = {eta:g} hits a pole of the operator")


def bethe_hessian(h: Hypergraph, eta) -> BetheHessian:
    """Assemble the operator at a given regularization value."""
    _check_poles(eta, h.orders)
    n = h.n
    diag = np.ones(n)
    off = None
    for k in h.orders:
        denom = (1.0 - eta) * (eta + k - 1.0)
        proj = h.projection(k)
        diag -= (k - 1.0) / denom * proj.degree_diag
        term = (eta / denom) * proj.comat
        off = term if off is None else off + term
    full = sp.diags(diag, format="csr")
    if off is not None:
        full = full + off.tocsr()
    return BetheHessian(float(eta), SparseSymMatrix.from_scipy(full))


def lowest_eigenpairs(mat: SparseSymMatrix, k, *, tol=1e-8, seed=0, maxiter=None):
    """k algebraically smallest eigenpairs of a symmetric sparse matrix.

    Dense solve below a size cutoff, Lanczos (ARPACK) above it with a seeded
    start vector for determinism.  Residuals are verified against
    tol * ||B||_inf; failure raises EigenConvergenceError carrying them.
    """
    n = mat.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    if n <= 600 or k >= n - 1:
        w, v = np.linalg.eigh(mat.to_dense())
        w, v = w[:k], v[:, :k]
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(n)
        csr = mat.to_csr()
        try:
            w, v = spla.eigsh(
                csr, k=k, which="SA", v0=v0, maxiter=maxiter, tol=0
            )
        except spla.ArpackNoConvergence as exc:
            raise EigenConvergenceError(
                f"eigensolver did not converge ({len(exc.eigenvalues)}/{k} pairs)",
                residuals=exc.eigenvalues,
            ) from exc
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    norm = float(abs(mat.to_csr()).sum(axis=1).max()) or 1.0
    res = np.linalg.norm(mat.to_csr() @ v - v * w, axis=0)
    if np.any(res > max(tol, 1e-12) * norm):
        raise EigenConvergenceError(
            f"residuals {res.max():g} exceed {tol:g} * ||B|| = {tol * norm:g}",
            residuals=res,
        )
    return w, _fix_signs(v)


def _fix_signs(v):
    """Make the largest-magnitude entry of each column positive."""
    v = v.copy()
    idx = np.argmax(np.abs(v), axis=0)
    flip = v[idx, np.arange(v.shape[1])] < 0
    v[:, flip] *= -1.0
    return v


def negative_tolerance(B: BetheHessian, neg_tol=1e-8):
    return neg_tol * float(np.abs(B.matrix.diag).max() or 1.0)


def count_negative_eigenvalues(B: BetheHessian, neg_tol=1e-8, seed=0):
    """Number of eigenvalues below -neg_tol * max|B_ii|.

    Small matrices use the full dense spectrum; large ones extract batches
    of smallest eigenvalues until a nonnegative one appears.
    """
    thr = -negative_tolerance(B, neg_tol)
    n = B.n
    if n <= 600:
        w = np.linalg.eigvalsh(B.matrix.to_dense())
        return int(np.sum(w < thr))
    k = 8
    while True:
        k = min(k, n - 1)
        w, _ = lowest_eigenpairs(B.matrix, k, seed=seed)
        count = int(np.sum(w < thr))
        if count < k or k == n - 1:
            return count
        k *= 2


def kmeans(points, k, *, restarts=20, max_iter=300, seed=0):
    """Plain k-means with k-means++ seeding and best-objective restarts."""
    X = np.asarray(points, dtype=float)
    n = X.shape[0]
    if k < 1 or k > n:
        raise ValueError(f"k must be in [1, {n}]")
    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(restarts):
        centers = _kmeanspp(X, k, rng)
        labels = None
        for _ in range(max_iter):
            d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_labels = d2.argmin(axis=1)
            if labels is not None and np.array_equal(new_labels, labels):
                break
            labels = new_labels
            for c in range(k):
                mask = labels == c
                if mask.any():
                    centers[c] = X[mask].mean(axis=0)
                else:
                    # re-seed an empty cluster at the farthest point
                    centers[c] = X[d2.min(axis=1).argmax()]
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        inertia = d2[np.arange(n), labels].sum()
        if inertia < best_inertia:
            best_inertia, best_labels = inertia, labels
    return best_labels


def _kmeanspp(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d2 / total)
        centers[c] = X[idx]
        d2 = np.minimum(d2, ((X - centers[c]) ** 2).sum(axis=1))
    return centers


def spectral_cluster(h: Hypergraph, num_communities=None, config: SpectralConfig = None) -> SpectralResult:
    """Full pipeline: regularization, operator, eigenvectors, k-means labels.

    With num_communities=None the community count is the number of negative
    eigenvalues (error if zero).  A fixed num_communities always takes that
    many smallest eigenvectors, matching the workflow used on labeled data
    even when some of those eigenvalues are nonnegative.
    """
    cfg = config or SpectralConfig()
    eta = cfg.eta if cfg.eta is not None else bulk_radius(h)
    B = bethe_hessian(h, eta)
    if num_communities is None:
        q = count_negative_eigenvalues(B, cfg.neg_tol, seed=cfg.seed)
        if q == 0:
            raise SpectralError("no detectable structure: no negative eigenvalues")
    else:
        q = int(num_communities)
    w, v = lowest_eigenpairs(B.matrix, q, tol=cfg.eig_tol, seed=cfg.seed)
    thr = -negative_tolerance(B, cfg.neg_tol)
    emb = v / np.linalg.norm(v, axis=1, keepdims=True).clip(1e-300) if cfg.row_normalize else v
    labels = kmeans(
        emb, q, restarts=cfg.kmeans_restarts, max_iter=cfg.kmeans_iters, seed=cfg.seed
    )
    return SpectralResult(
        eta=float(eta),
        eigenvalues=w,
        num_negative=int(np.sum(w < thr)),
        embedding=v,
        partition=Partition(labels, q),
    )
