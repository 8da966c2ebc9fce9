import itertools

import numpy as np
import pytest

from hyperbethe import Hypergraph


def labels_match_up_to_permutation(a, b, q):
    """True when two labelings are identical after some community relabeling."""
    a = np.asarray(a)
    b = np.asarray(b)
    for perm in itertools.permutations(range(q)):
        lut = np.asarray(perm)
        if np.array_equal(lut[a], b):
            return True
    return False


def random_hypergraph(rng, n, orders=(2, 3), mean_edges_per_order=8):
    """Small random hypergraph for property tests; always has >= 1 edge."""
    edges = []
    for k in orders:
        if k > n:
            continue
        m = max(1, int(rng.poisson(mean_edges_per_order)))
        for _ in range(m):
            edges.append(tuple(sorted(rng.choice(n, size=k, replace=False))))
    if not edges:
        edges = [tuple(range(min(2, n)))]
    return Hypergraph(n, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
