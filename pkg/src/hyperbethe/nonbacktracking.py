"""Non-backtracking operator on directed hyperedges (small-instance oracle).

Each incidence (node i in hyperedge e) is a directed hyperedge i->e.  The
entry (i->e1, j->e2) is 1 when j is another member of e1 and e2 is a
different hyperedge containing j.  The operator grows like the total degree
sum, so it is guarded to small instances and used only to validate the
Bethe Hessian, never to cluster at scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .hypergraph import Hypergraph
from .spectral import SpectralError, bethe_hessian


@dataclass(frozen=True)
class NonBacktracking:
    pair_edges: np.ndarray  # directed-hyperedge index: hyperedge id per row
    pair_nodes: np.ndarray  # node id per row
    matrix: sp.csr_matrix

    @property
    def dim(self):
        return int(self.pair_edges.size)


def nonbacktracking_matrix(h: Hypergraph, guard=5000) -> NonBacktracking:
    """Build the directed-hyperedge operator, ordered by hyperedge order.

    Duplicate hyperedges are distinct columns/rows, consistent with
    multiplicity counts in the one-mode projections.
    """
    edge_ids, nodes = h.incidence_pairs()
    dim = edge_ids.size
    if dim > guard:
        raise SpectralError(f"non-backtracking dimension {dim} exceeds guard {guard}")
    # sort directed hyperedges by (order of e, e, node)
    order_of_edge = np.asarray([len(e) for e in h.edges], dtype=np.int64)
    perm = np.lexsort((nodes, edge_ids, order_of_edge[edge_ids]))
    pe, pn = edge_ids[perm], nodes[perm]
    pos = {(int(e), int(i)): r for r, (e, i) in enumerate(zip(pe, pn))}
    edges_of_node = [[] for _ in range(h.n)]
    for e_idx, e in enumerate(h.edges):
        for i in e:
            edges_of_node[i].append(e_idx)
    rows, cols = [], []
    for r in range(dim):
        e1, i = int(pe[r]), int(pn[r])
        for j in h.edges[e1]:
            if j == i:
                continue
            for e2 in edges_of_node[j]:
                if e2 == e1:
                    continue
                rows.append(r)
                cols.append(pos[(e2, j)])
    data = np.ones(len(rows), dtype=np.int8)
    mat = sp.csr_matrix((data, (rows, cols)), shape=(dim, dim))
    return NonBacktracking(pe, pn, mat)


def pooling_matrix(nb: NonBacktracking, n) -> sp.csr_matrix:
    """n x dim matrix summing directed-hyperedge entries onto their node."""
    rows = nb.pair_nodes
    cols = np.arange(nb.dim)
    return sp.csr_matrix((np.ones(nb.dim), (rows, cols)), shape=(n, nb.dim))


def real_eigenvalues_outside_bulk(nb: NonBacktracking, radius, imag_tol=1e-8):
    """Real eigenvalues of the operator with modulus beyond the bulk radius."""
    w = np.linalg.eigvals(nb.matrix.toarray())
    scale = max(1.0, float(np.abs(w).max()))
    real = w[np.abs(w.imag) <= imag_tol * scale].real
    return np.sort(real[np.abs(real) > radius])


def bethe_singularity(h: Hypergraph, eigenvalue):
    """(sigma_min, spectral norm) of the Bethe Hessian evaluated at a
    non-backtracking eigenvalue; sigma_min ~ 0 certifies the correspondence."""
    B = bethe_hessian(h, float(eigenvalue)).matrix.to_dense()
    svals = np.linalg.svd(B, compute_uv=False)
    return float(svals[-1]), float(svals[0])


@dataclass(frozen=True)
class CostReport:
    dim_nb: int
    nnz_nb: int
    dim_bh: int
    nnz_bh_bound: int

    @property
    def nb_total(self):
        return self.dim_nb + self.nnz_nb

    @property
    def bh_total(self):
        return self.dim_bh + self.nnz_bh_bound


def operator_cost(h: Hypergraph) -> CostReport:
    """Closed-form size/nnz comparison of the two spectral operators.

    dim_nb  = sum_i d_i
    nnz_nb  = sum_i sum_k d_i^(k) (k-1) (d_i - 1)
    dim_bh  = n
    nnz_bh <= n + sum_k m^(k) C(k, 2)
    No operator is materialized.
    """
    total_deg = h.node_degrees()
    dim_nb = int(total_deg.sum())
    nnz_nb = 0
    for k in h.orders:
        dk = h.degrees_by_order(k)
        nnz_nb += int(((k - 1) * dk * (total_deg - 1)).sum())
    nnz_bh = h.n + sum(
        int(cnt) * math.comb(k, 2) for k, cnt in h.order_counts().items()
    )
    return CostReport(dim_nb, nnz_nb, h.n, nnz_bh)
