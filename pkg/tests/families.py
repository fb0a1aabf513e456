"""Seeded graph families shared by the property tests and the acceptance suite."""

import numpy as np

from mlbalance.graph import is_balanced, random_signed_graph, switch


def gap_family(size=30, seed=2024, n=20, p=0.3):
    """Unbalanced G(n, p) signings with the negative-edge fraction swept 0.05..0.5.

    Fixed order and density leave the sign pattern, and through it the spectral
    gap of A, as the main thing that varies.
    """
    rng = np.random.default_rng(seed)
    out = []
    i = 0
    while len(out) < size:
        frac = 0.05 + 0.45 * i / (size - 1) if i < size else float(rng.uniform(0.05, 0.5))
        i += 1
        g = random_signed_graph(n, p, frac, rng)
        if not is_balanced(g)[0]:
            out.append(g)
    return out


def random_unbalanced(count, seed, n_range=(20, 21), p=0.3, neg_range=(0.1, 0.5)):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(*n_range))
        g = random_signed_graph(n, p, float(rng.uniform(*neg_range)), rng)
        if not is_balanced(g)[0]:
            out.append(g)
    return out


def random_balanced(count, seed, max_n=40):
    """Random switchings of all-positive connected graphs."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, max_n + 1))
        g = random_signed_graph(n, float(rng.uniform(0.05, 0.5)), 0.0, rng, connected=False)
        S = {v for v in range(n) if rng.random() < 0.5}
        out.append(switch(g, S))
    return out
