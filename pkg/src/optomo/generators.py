"""Seeded random networks and probe plans for property tests and oracle runs."""

from __future__ import annotations

import numpy as np

from .network import Impl, Network, Probe, make_network


def random_network(rng: np.random.Generator, n_nodes: int, n_edges: int, n_monitors: int = 1,
                   parallel: bool = False, eta_range=(0.5, 0.99)) -> Network:
    """Connected graph: a random spanning tree plus extra random edges.

    ``n_edges`` is raised to ``n_nodes - 1`` if needed; without ``parallel``
    the extra edges are capped by the simple-graph limit.
    """
    nodes = list(range(1, n_nodes + 1))
    order = rng.permutation(nodes)
    pairs = []
    for k in range(1, n_nodes):
        parent = order[rng.integers(0, k)]
        pairs.append((int(parent), int(order[k])))
    present = {frozenset(p) for p in pairs}
    limit = n_nodes * (n_nodes - 1) // 2
    target = max(n_edges, n_nodes - 1)
    if not parallel:
        target = min(target, limit)
    while len(pairs) < target and n_nodes > 1:
        u, v = (int(x) for x in rng.choice(nodes, size=2, replace=False))
        if not parallel and frozenset((u, v)) in present:
            continue
        present.add(frozenset((u, v)))
        pairs.append((u, v))
    edges = [(f"e{i + 1}", u, v) for i, (u, v) in enumerate(pairs)]
    k = int(min(max(n_monitors, 1), n_nodes))
    monitors = [int(m) for m in rng.choice(nodes, size=k, replace=False)]
    lo, hi = eta_range
    eta = {e[0]: float(rng.uniform(lo, hi)) for e in edges}
    return make_network(nodes, edges, monitors, eta)


def random_plan(rng: np.random.Generator, walks, N_range=(1.0, 200.0), Na_range=(0.05, 1.0),
                max_t: int = 3, max_c: int = 3):
    """Probes over ``walks`` with random implementations, block sizes and copies."""
    impls = list(Impl)
    out = []
    for w in walks:
        impl = impls[int(rng.integers(0, len(impls)))]
        t = int(rng.integers(1, max_t + 1)) if impl is Impl.ENTANGLED else 1
        out.append(Probe(w, impl, t, int(rng.integers(1, max_c + 1)),
                         float(rng.uniform(*N_range)), float(rng.uniform(*Na_range))))
    return out
