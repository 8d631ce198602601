"""Acceptance gate: one PASS/FAIL line per criterion at its stated tolerance.

Lines are collected in ``LINES`` and echoed in the pytest terminal summary;
running this file directly prints them as well.
"""

import time

import numpy as np

import optomo
from optomo import (
    Probe,
    cover_bound,
    find_probes,
    group_cover,
    is_identifiable,
    measurement_matrix,
    metrics,
    physics,
    verify,
    verify_cover,
)
from optomo.generators import random_network
from optomo.physics import ProbeEnergy
from optomo.simulate import crb_experiment

NA = 0.558
LINES = []


class Gate:
    def __init__(self, name, budget):
        self.name, self.budget = name, budget

    def __enter__(self):
        self.t0 = time.perf_counter()
        self.checks = []
        return self

    def check(self, ok, detail):
        self.checks.append((bool(ok), detail))

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        if exc_type is not None:
            self.checks.append((False, f"raised {exc_type.__name__}: {exc}"))
        self.check(elapsed < self.budget, f"runtime {elapsed:.2f}s < {self.budget:g}s")
        ok = all(c for c, _ in self.checks)
        line = f"{'PASS' if ok else 'FAIL'} {self.name}: " + "; ".join(d for _, d in self.checks)
        LINES.append(line)
        print(line)
        assert ok, line


def test_fact1_threshold():
    with Gate("fact-1 threshold", 1.0) as g:
        th = physics.fact1_threshold(ProbeEnergy(3.1, NA, 2))
        g.check(abs(th - 3.03) <= 0.01, f"N*={th:.5f} (3.03 +/- 0.01)")
        e = ProbeEnergy(3.1, NA, 2)
        grid = np.round(np.arange(0.05, 0.951, 0.05), 2)
        worst = min(physics.fi_entangled(e, x) - physics.fi_squeezed(e, x) for x in grid)
        g.check(worst > 0, f"min(I_e - I_s) over {len(grid)} etas at N=3.1 is {worst:.4g}")


def test_fact2_threshold():
    with Gate("fact-2 threshold", 1.0) as g:
        th = physics.fact2_threshold(ProbeEnergy(1.0, NA, 1), 0.8, "squeezed")
        g.check(0.37 <= th <= 0.40, f"N*={th:.5f} in [0.37, 0.40]")
        e = ProbeEnergy(0.45, NA, 1)
        gap = physics.fi_squeezed(e, 0.8) - physics.fi_coherent(e, 0.8)
        g.check(gap > 0, f"I_s - I_c at N=0.45, eta=0.8 is {gap:.4g}")


def test_split_entangled_fim():
    with Gate("split-entangled FIM", 30.0) as g:
        rng = np.random.default_rng(2024)
        res = verify.CheckResult("claim1", "fim-vs-fd", 1e-6)
        for _ in range(100):
            n = int(rng.integers(1, 6))
            etas = rng.uniform(0.1, 0.9, n)
            N, Na = float(rng.uniform(1, 200)), float(rng.uniform(0.05, 1.0))
            oracle = physics.gaussian_fim(physics.model_entangled_split(N, Na, n), etas, deriv="fd")
            res.record(metrics.split_entangled_fim(N, Na, etas), oracle, {"N": N, "Na": Na, "etas": etas.tolist()}, floor=1e-8)
        g.check(res.passed and res.cases == 100, f"{res.cases} tuples, worst rel {res.worst:.2e} (tol 1e-6, abs floor 1e-8)")


def test_network_fim_consistency():
    with Gate("network FIM closed forms", 120.0) as g:
        ident, closed, brute = verify.check_network_fim(np.random.default_rng(77), cases=100, max_edges=8)
        g.check(ident.passed, "all 100 plans identifiable")
        g.check(closed.passed, f"closed vs dense worst rel {closed.worst:.2e} (tol 1e-9)")
        g.check(brute.passed, f"structured vs brute-force worst rel {brute.worst:.2e} (tol 1e-7)")


def test_independent_split_sweep():
    with Gate("independent-split sweep", 10.0) as g:
        rows = np.array(metrics.sweep("independent-split", 100.0, NA, np.linspace(0.02, 1.0, 50)))
        m = rows[:, 7].min()
        g.check(len(rows) == 2500 and m > 0, f"min(trinv_e - trinv_s) = {m:.4g} over 50x50")


def test_shared_split_sweep():
    with Gate("shared-split sweep and closed forms", 30.0) as g:
        rows = np.array(metrics.sweep("shared-split", 100.0, NA, np.linspace(0.02, 1.0, 50)))
        g.check(rows[:, 6].min() > 0, f"min(det_s - det_e) = {rows[:, 6].min():.4g}")
        g.check(rows[:, 7].min() > 0, f"min(trinv_e - trinv_s) = {rows[:, 7].min():.4g}")
        (res,) = verify.check_shared_split(np.random.default_rng(31), cases=100, N=100.0, Na=NA)
        g.check(res.passed, f"four closed forms vs FD on 100 points, worst rel {res.worst:.2e} (tol 1e-7)")


def test_routing():
    expected = {(1, 2, 1), (1, 2, 4, 2, 1), (1, 2, 3, 2, 1), (5, 4, 5), (5, 4, 3, 4, 5), (1, 5)}
    with Gate("routing", 60.0) as g:
        net = optomo.example_network()
        walks = find_probes(net)
        g.check({w.nodes for w in walks} == expected and len(walks) == 6, "six expected walks")
        cover = group_cover(walks, net)
        groups = {frozenset(walks[i].nodes for i in sg.probes) for sg in cover.subgraphs}
        want = {
            frozenset({(1, 2, 1), (1, 2, 4, 2, 1), (1, 2, 3, 2, 1)}),
            frozenset({(5, 4, 5), (5, 4, 3, 4, 5)}),
            frozenset({(1, 5)}),
        }
        g.check(groups == want, "memberships {P1,P2,P3}/{P4,P5}/{P6}")
        g.check(cover_bound(net) == 3, f"cover_bound = {cover_bound(net)}")
        g.check(is_identifiable(measurement_matrix(walks, net).entries), "example plan identifiable")
        rng = np.random.default_rng(4242)
        bad = 0
        for _ in range(200):
            n = int(rng.integers(2, 13))
            extra = int(rng.integers(0, n + 1))
            net = random_network(rng, n, n - 1 + extra, int(rng.integers(1, 4)), parallel=bool(rng.integers(0, 2)))
            ws = find_probes(net)
            cov = group_cover(ws, net)
            if not (is_identifiable(measurement_matrix(ws, net).entries) and len(cov) == cover_bound(net)
                    and not verify_cover(cov, net)):
                bad += 1
        g.check(bad == 0, f"200 random graphs: {bad} failures")


def test_sufficient_conditions():
    with Gate("sufficient-condition checkpoint", 1.0) as g:
        s = metrics.sufficient_conditions_from_sums(6.0, NA, 2, 0.26)
        g.check(s.f > s.g, f"f={s.f:.5f} > g={s.g:.5f}")
        g.check(s.coupling <= 0.55, f"coupling factor={s.coupling:.5f} <= 0.55")


def test_crb_validation():
    eta = dict(zip(("eta1", "eta2", "eta3", "eta4", "eta5", "eta6"), (0.9, 0.85, 0.8, 0.9, 0.75, 0.95)))
    with Gate("CRB validation", 300.0) as g:
        net = optomo.example_network().with_eta(eta)
        probes = [Probe(w, "squeezed", 1, 200) for w in find_probes(net)]
        doc = crb_experiment(probes, net, trials=1000, seed=2026)
        worst_bias = max(abs(b) for b in doc["bias"])
        g.check(worst_bias < 0.01, f"max per-edge |bias| = {worst_bias:.2e} < 0.01")
        g.check(abs(doc["ratio"] - 1) <= 0.15,
                f"empirical total variance / Tr(I^-1) = {doc['ratio']:.4f} (within 15%)")
        g.check(doc["converged"] == 1000, f"{doc['converged']}/1000 fits converged")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
