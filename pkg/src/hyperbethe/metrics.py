"""Partition comparison metrics: AMI, confusion matrices, composition histograms.

AMI uses the exact permutation-model expectation of mutual information
(hypergeometric sum, no approximation) and the arithmetic-mean entropy
normalizer.  The raw value is returned; it can be marginally negative for
anti-correlated partitions and is deliberately not clamped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


@dataclass(frozen=True)
class Contingency:
    counts: np.ndarray  # r x s
    row_marginals: np.ndarray
    col_marginals: np.ndarray
    n: int


def contingency(a, b) -> Contingency:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError("partitions must label the same nodes")
    if a.size == 0:
        raise ValueError("empty partitions")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    r, s = ai.max() + 1, bi.max() + 1
    counts = np.zeros((r, s), dtype=np.int64)
    np.add.at(counts, (ai, bi), 1)
    return Contingency(counts, counts.sum(axis=1), counts.sum(axis=0), int(a.size))


def _labels(x):
    return x.labels if hasattr(x, "labels") else np.asarray(x, dtype=np.int64)


def entropy_from_marginals(marg, n):
    p = marg[marg > 0] / n
    return float(-(p * np.log(p)).sum())


def mutual_information(cont: Contingency):
    n = cont.n
    mi = 0.0
    for i in range(cont.counts.shape[0]):
        ai = cont.row_marginals[i]
        for j in range(cont.counts.shape[1]):
            nij = cont.counts[i, j]
            if nij == 0:
                continue
            # log(nij/n) - log(ai/n) - log(bj/n): shared sub-terms keep
            # MI(a, a) bitwise equal to H(a)
            mi += (nij / n) * (
                np.log(nij / n) - np.log(ai / n) - np.log(cont.col_marginals[j] / n)
            )
    return float(mi)


def expected_mutual_information(cont: Contingency):
    """Exact E[MI] under the fixed-marginals permutation model.

    For each cell the overlap count follows a hypergeometric law; the sum
    runs over its full support.  O(r * s * n) worst case, fine at desk scale.
    """
    n = cont.n
    lg = gammaln(np.arange(n + 2))  # lg[k] = log((k-1)!)
    emi = 0.0
    for ai in cont.row_marginals:
        for bj in cont.col_marginals:
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            for nij in range(lo, hi + 1):
                log_p = (
                    lg[ai + 1]
                    + lg[bj + 1]
                    + lg[n - ai + 1]
                    + lg[n - bj + 1]
                    - lg[n + 1]
                    - lg[nij + 1]
                    - lg[ai - nij + 1]
                    - lg[bj - nij + 1]
                    - lg[n - ai - bj + nij + 1]
                )
                emi += (nij / n) * np.log(n * nij / (ai * bj)) * np.exp(log_p)
    return float(emi)


def ami(a, b):
    """Adjusted mutual information with arithmetic-mean normalizer.

    Partitions identical up to relabeling (including the degenerate
    single-cluster pair) score exactly 1.0.
    """
    cont = contingency(_labels(a), _labels(b))
    counts = cont.counts
    if (
        np.count_nonzero(counts) == max(counts.shape)
        and np.all((counts > 0).sum(axis=0) <= 1)
        and np.all((counts > 0).sum(axis=1) <= 1)
    ):
        return 1.0
    mi = mutual_information(cont)
    emi = expected_mutual_information(cont)
    ha = entropy_from_marginals(cont.row_marginals, cont.n)
    hb = entropy_from_marginals(cont.col_marginals, cont.n)
    denom = 0.5 * (ha + hb) - emi
    if denom == 0.0:
        return 1.0
    return (mi - emi) / denom


def confusion(a, b, row_normalize=False):
    """Count matrix between two partitions (rows: a, cols: b).

    With row_normalize each row is scaled to sum 1; all-zero rows stay zero.
    """
    la, lb = _labels(a), _labels(b)
    if la.shape != lb.shape:
        raise ValueError("partitions must label the same nodes")
    qa = (la.max() + 1) if la.size else 0
    qb = (lb.max() + 1) if lb.size else 0
    if hasattr(a, "q"):
        qa = max(qa, a.q)
    if hasattr(b, "q"):
        qb = max(qb, b.q)
    counts = np.zeros((qa, qb), dtype=np.int64)
    np.add.at(counts, (la, lb), 1)
    if not row_normalize:
        return counts
    out = counts.astype(float)
    sums = out.sum(axis=1, keepdims=True)
    nz = sums[:, 0] > 0
    out[nz] /= sums[nz]
    return out


def hyperedge_composition(h, p):
    """Histograms of how hyperedges sit inside a partition.

    Returns (max_same histogram, order histogram): the first maps
    (order, max nodes of one community inside the hyperedge) -> count,
    the second maps order -> count.
    """
    labels = _labels(p)
    max_same = {}
    order_freq = {}
    for e in h.edges:
        k = len(e)
        best = int(np.bincount(labels[list(e)]).max())
        max_same[(k, best)] = max_same.get((k, best), 0) + 1
        order_freq[k] = order_freq.get(k, 0) + 1
    return max_same, order_freq
