"""Belief propagation for the symmetric HSBM.

Messages live on directed incidences (node, hyperedge) and are stored in the
log domain with a floor at exp(-700).  The hyperedge-to-node update uses the
node-removal recursion, which for two-rate affinities collapses the full
q^(order-1) assignment sum into O(order * q) multiplications:

    value(psi) = c_out + (c_in - c_out) * prod_{j in e \\ i} b_j(psi)

The non-edge factors are absorbed into a global per-community external
field computed from the marginal mass of each community.  All updates in a
sweep are synchronous (Jacobi) so results are independent of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma

import numpy as np

from .hypergraph import Hypergraph, Partition

LOG_FLOOR = -700.0


class BpError(ValueError):
    pass


@dataclass(frozen=True)
class BpConfig:
    max_sweeps: int = 500
    tol: float = 1e-6  # convergence threshold on max-abs message change
    damping: float = 0.0  # blend factor toward the previous messages, in [0, 1)
    init: str = "perturbed"  # "uniform" | "perturbed" | "planted"
    init_noise: float = 1e-2
    planted_smoothing: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.tol <= 0:
            raise BpError("convergence threshold must be positive")
        if not 0.0 <= self.damping < 1.0:
            raise BpError("damping must lie in [0, 1)")
        if self.init not in ("uniform", "perturbed", "planted"):
            raise BpError(f"unknown init mode {self.init!r}")


class BpState:
    """Message arrays plus the index structure of one hypergraph.

    log_n2e / log_e2n are (D, q) arrays over directed incidences in
    edge-major order; marginal is the (n, q) probability table; field is the
    current length-q external field.
    """

    def __init__(self, h: Hypergraph, q, c_in, c_out, config: BpConfig):
        if q < 2:
            raise BpError("q must be >= 2")
        if h.m < 1:
            raise BpError("hypergraph has no hyperedges")
        self.h = h
        self.q = int(q)
        self.c_in = float(c_in)
        self.c_out = float(c_out)
        self.config = config
        edge_ids, nodes = h.incidence_pairs()
        self.pair_edges = edge_ids
        self.pair_nodes = nodes
        lengths = np.asarray([len(e) for e in h.edges], dtype=np.int64)
        self.edge_starts = np.concatenate([[0], np.cumsum(lengths)[:-1]])
        self.node_perm = np.argsort(nodes, kind="stable")
        sorted_nodes = nodes[self.node_perm]
        self.active_nodes, self.node_seg_starts = np.unique(
            sorted_nodes, return_index=True
        )
        D = edge_ids.size
        self.log_n2e = np.full((D, q), -np.log(q))
        self.log_e2n = np.full((D, q), -np.log(q))
        self.marginal = np.full((h.n, q), 1.0 / q)
        self.field = external_field(self)

    @property
    def num_messages(self):
        return int(self.pair_edges.size)


def _log_probs(p):
    return np.log(np.maximum(p, np.exp(LOG_FLOOR)))


def bp_init(h: Hypergraph, q, rates, config: BpConfig = None, planted: Partition = None) -> BpState:
    """Initialize messages: exact uniform, noise-perturbed uniform, or planted."""
    cfg = config or BpConfig()
    c_in, c_out = rates
    state = BpState(h, q, c_in, c_out, cfg)
    if cfg.init == "uniform":
        return state
    if cfg.init == "perturbed":
        rng = np.random.default_rng(cfg.seed)
        noise = rng.uniform(-cfg.init_noise, cfg.init_noise, size=state.log_n2e.shape)
        p = np.clip(1.0 / q + noise, 1e-12, None)
        p /= p.sum(axis=1, keepdims=True)
        state.log_n2e = _log_probs(p)
        return state
    if planted is None:
        raise BpError("planted init requires the planted partition")
    s = cfg.planted_smoothing
    onehot = np.full((h.n, q), s / q)
    onehot[np.arange(h.n), planted.labels] += 1.0 - s
    state.marginal = onehot
    state.log_n2e = _log_probs(onehot[state.pair_nodes])
    state.field = external_field(state)
    return state


def hyperedge_message(c_in, c_out, incoming, normalize=True):
    """Message a hyperedge sends to one member, from the other members' messages.

    incoming has shape (order-1, q).  Node-removal recursion: start from the
    pair base case c_in + (c_out - c_in) * (1 - b(psi)) and fold the
    remaining members in one at a time while tracking the running product of
    their psi-components.
    """
    inc = np.asarray(incoming, dtype=float)
    if inc.ndim != 2 or inc.shape[0] < 1:
        raise BpError("need at least one incoming message")
    val = c_in + (c_out - c_in) * (1.0 - inc[0])
    prefix = inc[0].copy()
    for t in range(1, inc.shape[0]):
        val = val + (c_out - c_in) * (1.0 - inc[t]) * prefix
        prefix = prefix * inc[t]
    if not normalize:
        return val
    total = val.sum()
    if total <= 0.0:
        return np.full(inc.shape[1], 1.0 / inc.shape[1])
    return val / total


def external_field(state: BpState):
    """Per-community field from the marginal mass of each community.

    h(psi) = sum_k [c_out + (c_in - c_out) / (n^(k-1) (k-1)!) * S(psi)^(k-1)]
    with S(psi) the summed marginals; evaluated via logs so high orders
    neither overflow nor underflow.
    """
    n = state.h.n
    s = state.marginal.sum(axis=0)
    frac = np.maximum(s / n, 1e-300)
    out = np.zeros(state.q)
    for k in state.h.orders:
        out += state.c_out + (state.c_in - state.c_out) * np.exp(
            (k - 1) * np.log(frac) - lgamma(k)
        )
    return out


def bp_sweep(state: BpState):
    """One synchronous sweep; mutates state, returns the max message change.

    Order: refresh the field from current marginals, update all
    hyperedge-to-node messages from the previous node-to-hyperedge messages,
    then all node-to-hyperedge messages, then marginals.
    """
    q = state.q
    cfg = state.config
    state.field = external_field(state)

    # hyperedge -> node
    logb = state.log_n2e
    seg = np.add.reduceat(logb, state.edge_starts, axis=0)
    excl = seg[state.pair_edges] - logb
    raw = state.c_out + (state.c_in - state.c_out) * np.exp(excl)
    total = raw.sum(axis=1, keepdims=True)
    dead = total[:, 0] <= 0.0
    if dead.any():
        raw[dead] = 1.0
        total = raw.sum(axis=1, keepdims=True)
    hat = raw / total
    hat_old = np.exp(state.log_e2n)
    if cfg.damping > 0.0:
        hat = (1.0 - cfg.damping) * hat + cfg.damping * hat_old
        hat /= hat.sum(axis=1, keepdims=True)
    delta = float(np.abs(hat - hat_old).max())
    log_hat = _log_probs(hat)

    # node -> hyperedge, through per-node log-sums of incoming hats
    sums = np.add.reduceat(log_hat[state.node_perm], state.node_seg_starts, axis=0)
    node_sum = np.zeros((state.h.n, q))
    node_sum[state.active_nodes] = sums
    logb_un = node_sum[state.pair_nodes] - log_hat - state.field[None, :]
    logb_un -= logb_un.max(axis=1, keepdims=True)
    b = np.exp(logb_un)
    b /= b.sum(axis=1, keepdims=True)
    b_old = np.exp(state.log_n2e)
    if cfg.damping > 0.0:
        b = (1.0 - cfg.damping) * b + cfg.damping * b_old
        b /= b.sum(axis=1, keepdims=True)
    delta = max(delta, float(np.abs(b - b_old).max()))

    # marginals
    logm = node_sum - state.field[None, :]
    logm -= logm.max(axis=1, keepdims=True)
    marg = np.exp(logm)
    marg /= marg.sum(axis=1, keepdims=True)

    state.log_e2n = log_hat
    state.log_n2e = _log_probs(b)
    state.marginal = marg
    return delta


@dataclass(frozen=True)
class BpResult:
    partition: Partition
    marginals: np.ndarray
    sweeps: int
    converged: bool


def bp_run(h: Hypergraph, q, rates, config: BpConfig = None, planted: Partition = None) -> BpResult:
    """Iterate sweeps to convergence (or the sweep cap) and read off labels.

    Non-convergence is not an error: the best available marginals are
    returned with converged=False.  Ties in the argmax go to the lowest
    community index.
    """
    cfg = config or BpConfig()
    state = bp_init(h, q, rates, cfg, planted=planted)
    converged = False
    sweeps = 0
    for sweeps in range(1, cfg.max_sweeps + 1):
        delta = bp_sweep(state)
        if delta < cfg.tol:
            converged = True
            break
    labels = np.argmax(state.marginal, axis=1)
    return BpResult(Partition(labels, q), state.marginal.copy(), sweeps, converged)
