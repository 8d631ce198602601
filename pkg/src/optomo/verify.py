"""Seeded oracle suites: every closed form against a brute-force computation.

Each check draws random inputs from a seeded generator, evaluates the closed
form and its oracle (finite-difference Gaussian FIM, dense linear algebra,
or the concatenated-observation FIM) and records the worst relative gap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import metrics, physics
from .generators import random_network, random_plan
from .network import Impl
from .oracle import brute_force_fim
from .physics import ProbeEnergy, gaussian_fim
from .routing import find_probes

SCOPES = ("physics", "claim1", "lemma", "appendixA")


@dataclass
class CheckResult:
    scope: str
    name: str
    tol: float
    cases: int = 0
    worst: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def record(self, value, reference, inputs, floor=0.0):
        """Compare arrays entrywise; a case passes within ``tol`` relative or ``floor`` absolute."""
        value = np.asarray(value, dtype=float)
        reference = np.asarray(reference, dtype=float)
        gap = np.abs(value - reference)
        rel = gap / np.maximum(np.abs(reference), 1e-300)
        ok = (rel <= self.tol) | (gap <= floor)
        worst = float(np.max(np.where(gap <= floor, 0.0, rel))) if value.size else 0.0
        self.cases += 1
        self.worst = max(self.worst, worst)
        if not np.all(ok):
            self.failures.append({"inputs": inputs, "rel": worst, "abs": float(np.max(gap))})

    def record_norm(self, value, reference, inputs):
        """Normwise comparison ``max|value - reference| / max|reference|``."""
        value = np.asarray(value, dtype=float)
        reference = np.asarray(reference, dtype=float)
        rel = float(np.max(np.abs(value - reference)) / max(np.max(np.abs(reference)), 1e-300))
        self.cases += 1
        self.worst = max(self.worst, rel)
        if not rel <= self.tol:
            self.failures.append({"inputs": inputs, "rel": rel})

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.scope}/{self.name}: cases={self.cases} worst_rel={self.worst:.3e} tol={self.tol:g}"


def check_physics(rng, cases=50):
    """Per-channel FIs and analytic Jacobians against finite differences."""
    fi = CheckResult("physics", "channel-fi-vs-fd", 1e-7)
    jac = CheckResult("physics", "analytic-vs-fd-fim", 1e-7)
    cn = CheckResult("physics", "c_n-vs-squeeze-parameter", 1e-12)
    for _ in range(cases):
        impl = list(Impl)[int(rng.integers(0, 3))]
        n = int(rng.integers(1, 6))
        e = ProbeEnergy(float(rng.uniform(0.5, 200)), float(rng.uniform(0.05, 1.0)), n)
        eta = float(rng.uniform(0.05, 0.95))
        model = physics.model_for(impl, e)
        fd = gaussian_fim(model, [eta], deriv="fd")[0, 0]
        an = gaussian_fim(model, [eta], deriv="analytic")[0, 0]
        closed = physics.fi_for(impl, e, eta)
        inputs = {"impl": impl.value, "N": e.N, "Na": e.Na, "n": n, "eta": eta}
        fi.record(closed, fd, inputs)
        jac.record(an, fd, inputs)
        cn.record(physics.c_n(e.Na, n), physics.squeeze_correlation(e.Na, n), inputs)
    return [fi, jac, cn]


def check_split_entangled(rng, cases=100):
    """Split-entangled FIM and its det / trace closed forms."""
    fim = CheckResult("claim1", "fim-vs-fd", 1e-6)
    det = CheckResult("claim1", "det-vs-fd", 1e-7)
    tr = CheckResult("claim1", "trace-inv-vs-fd", 1e-7)
    sq = CheckResult("claim1", "squeezed-split-vs-fd", 1e-7)
    for _ in range(cases):
        n = int(rng.integers(1, 6))
        etas = rng.uniform(0.1, 0.9, size=n)
        N = float(rng.uniform(1, 200))
        Na = float(rng.uniform(0.05, 1.0))
        inputs = {"N": N, "Na": Na, "etas": etas.tolist()}
        oracle = gaussian_fim(physics.model_entangled_split(N, Na, n), etas, deriv="fd")
        fim.record(metrics.split_entangled_fim(N, Na, etas), oracle, inputs, floor=1e-8)
        d_e, t_e = metrics.dense_metrics(oracle)
        d_s, t_s = metrics.dense_metrics(gaussian_fim(physics.model_squeezed_split(N, Na, n), etas, deriv="fd"))
        r = metrics.split_comparison_independent(N, Na, etas)
        det.record(r.det_entangled, d_e, inputs)
        tr.record(r.trace_inv_entangled, t_e, inputs)
        sq.record([r.det_squeezed, r.trace_inv_squeezed], [d_s, t_s], inputs)
    return [fim, det, tr, sq]


def check_network_fim(rng, cases=100, max_edges=8):
    """Closed-form network metrics vs dense metrics vs the brute-force FIM."""
    closed = CheckResult("lemma", "closed-vs-dense", 1e-9)
    brute = CheckResult("lemma", "structured-vs-brute-force", 1e-7)
    ident = CheckResult("lemma", "identifiable", 0.0)
    for k in range(cases):
        n_nodes = int(rng.integers(2, max_edges + 2))
        n_edges = int(rng.integers(n_nodes - 1, max_edges + 1))
        net = random_network(rng, n_nodes, n_edges, int(rng.integers(1, max(2, n_nodes // 2) + 1)),
                             parallel=bool(rng.integers(0, 2)))
        probes = random_plan(rng, find_probes(net))
        report = metrics.network_fim(probes, net)
        inputs = {"case": k, "nodes": n_nodes, "edges": len(net.edges)}
        ident.record(0.0 if report.identifiable else 1.0, 0.0, inputs)
        if not report.identifiable:
            continue
        closed.record([report.det_closed, report.trace_inv_closed], [report.det, report.trace_inv], inputs)
        brute.record_norm(report.fim, brute_force_fim(probes, net), inputs)
    return [ident, closed, brute]


def check_shared_split(rng, cases=100, N=None, Na=None):
    """Shared-link closed forms (det and trace for both implementations)."""
    res = CheckResult("appendixA", "closed-vs-fd", 1e-7)
    for _ in range(cases):
        n_ = float(rng.uniform(1, 200)) if N is None else N
        na = float(rng.uniform(0.05, 1.0)) if Na is None else Na
        e1, e2 = (float(x) for x in rng.uniform(0.02, 1.0, size=2))
        r = metrics.split_comparison_shared(n_, na, e1, e2)
        d_s, t_s = metrics.dense_metrics(gaussian_fim(physics.model_squeezed_shared(n_, na), [e1, e2], deriv="fd"))
        d_e, t_e = metrics.dense_metrics(gaussian_fim(physics.model_entangled_shared(n_, na), [e1, e2], deriv="fd"))
        res.record(
            [r.det_squeezed, r.trace_inv_squeezed, r.det_entangled, r.trace_inv_entangled],
            [d_s, t_s, d_e, t_e],
            {"N": n_, "Na": na, "eta1": e1, "eta2": e2},
        )
    return [res]


_SUITES = {
    "physics": check_physics,
    "claim1": check_split_entangled,
    "lemma": check_network_fim,
    "appendixA": check_shared_split,
}


def run(scope="all", seed=0):
    """Run one suite (or all) and return the list of :class:`CheckResult`."""
    names = SCOPES if scope == "all" else (scope,)
    if any(s not in _SUITES for s in names):
        raise ValueError(f"unknown scope {scope!r}; choose from {SCOPES + ('all',)}")
    out = []
    for name in names:
        rng = np.random.default_rng([seed, SCOPES.index(name)])
        out.extend(_SUITES[name](rng))
    return out
