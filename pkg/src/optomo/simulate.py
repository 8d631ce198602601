"""Monte-Carlo probe observations and maximum-likelihood link estimation.

Each probe block has mean ``m(eta_P) * u`` and covariance
``sd(eta_P)**2 * I - a(eta_P) * u u'`` (squeezed blocks have ``a = 0``,
entangled blocks a unit diagonal), so blocks are sampled in O(t) and the
log-likelihood depends on the data only through three sums per probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from . import physics
from .errors import TomographyError
from .metrics import network_fim
from .network import Impl, Network, Probe, is_identifiable, measurement_matrix, probe_transmissivity
from .routing import SubgraphCover

LOG_2PI = math.log(2.0 * math.pi)
ETA_FLOOR = 1e-9


@dataclass(frozen=True)
class _Coeffs:
    """Per-probe constants; arrays indexed by probe."""

    amp: np.ndarray  # mean is sqrt(amp * eta_P)
    ks: np.ndarray  # per-pulse squeezing: variance (1 - ks*eta)/4
    ke: np.ndarray  # block entanglement: rank-one term eta*ke/(4t)
    t: np.ndarray
    c: np.ndarray


def _coeffs(probes: Sequence[Probe]) -> _Coeffs:
    amp, ks, ke = [], [], []
    for p in probes:
        if p.impl is Impl.COHERENT:
            amp.append(p.N + p.Na)
            ks.append(0.0)
            ke.append(0.0)
        elif p.impl is Impl.SQUEEZED:
            amp.append(p.N)
            ks.append(physics.c_n(p.Na, 1))
            ke.append(0.0)
        else:
            amp.append(p.N)
            ks.append(0.0)
            ke.append(physics.c_n(p.Na, p.t))
    return _Coeffs(
        np.array(amp), np.array(ks), np.array(ke),
        np.array([p.t for p in probes], dtype=float), np.array([p.c for p in probes], dtype=float),
    )


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """One trial: per probe, a ``(copies, t)`` array of homodyne outcomes."""

    blocks: tuple
    seed: int
    trial: int

    def stats(self):
        """``(sum x, sum x^2, sum over copies of (block sum)^2)`` per probe."""
        s1 = np.array([b.sum() for b in self.blocks])
        s2 = np.array([np.sum(b * b) for b in self.blocks])
        s3 = np.array([np.sum(b.sum(axis=1) ** 2) for b in self.blocks])
        return s1, s2, s3


def _substream(seed, trial, probe_index):
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(trial, probe_index))
    return np.random.Generator(np.random.Philox(ss))


def sample_block(probe: Probe, eta_P: float, rng: np.random.Generator, copies: Optional[int] = None):
    """Draw ``copies`` structured-covariance blocks for one probe."""
    co = _coeffs([probe])
    c = probe.c if copies is None else copies
    t = probe.t
    z = rng.standard_normal((c, t))
    m = math.sqrt(co.amp[0] * eta_P)
    sd = 0.5 * math.sqrt(1.0 - co.ks[0] * eta_P)
    # x = m + sd z + b (sum z) u  has covariance sd^2 I + (2 b sd + t b^2) u u'
    target = -eta_P * co.ke[0] / (4.0 * t)
    b = (-sd + math.sqrt(sd * sd + t * target)) / t if co.ke[0] else 0.0
    return m + sd * z + b * z.sum(axis=1, keepdims=True)


def sample_observations(probes: Sequence[Probe], net: Network, trials: int, seed: int, first_trial: int = 0):
    """Independent trials; trial ``k`` / probe ``i`` draw from their own substream."""
    eta_P = [probe_transmissivity(p, net) for p in probes]
    out = []
    for k in range(first_trial, first_trial + trials):
        blocks = tuple(sample_block(p, e, _substream(seed, k, i)) for i, (p, e) in enumerate(zip(probes, eta_P)))
        out.append(ObservationSet(blocks, seed, k))
    return out


class _Likelihood:
    """Log-likelihood over a subset of probes and edges."""

    def __init__(self, A, coeffs: _Coeffs, stats):
        self.A = np.asarray(A, dtype=float)
        self.co = coeffs
        self.s1, self.s2, self.s3 = stats

    def eta_P(self, eta):
        return np.exp(self.A @ np.log(eta))

    def probe_terms(self, eP):
        co = self.co
        t, c = co.t, co.c
        m = np.sqrt(co.amp * eP)
        dm = 0.5 * m / eP
        gs = 1.0 - co.ks * eP
        ge = 1.0 - co.ke * eP
        alpha = 4.0 / gs
        beta = 4.0 * co.ke * eP / (t * ge)
        logdet = t * math.log(0.25) + t * np.log(gs) + np.log(ge)
        resid = self.s1 - c * t * m
        R2 = self.s2 - 2.0 * m * self.s1 + c * t * m * m
        R3 = self.s3 - 2.0 * m * t * self.s1 + c * t * t * m * m
        ll = -0.5 * (c * logdet + alpha * R2 + beta * R3 + c * t * LOG_2PI)
        dalpha = 4.0 * co.ks / (gs * gs)
        dbeta = 4.0 * co.ke / (t * ge * ge)
        dlogdet = -t * co.ks / gs - co.ke / ge
        dR2 = -2.0 * resid * dm
        dR3 = -2.0 * t * resid * dm
        dll = -0.5 * (c * dlogdet + dalpha * R2 + alpha * dR2 + dbeta * R3 + beta * dR3)
        return ll, dll

    def value_grad(self, eta):
        eP = self.eta_P(eta)
        ll, dll = self.probe_terms(eP)
        # d eta_P / d eta_i = A_Pi * eta_P / eta_i
        grad = (self.A * (dll * eP)[:, None]).sum(axis=0) / eta
        return float(ll.sum()), grad


def _edge_index(net, edge_ids):
    ids = net.edge_ids if edge_ids is None else tuple(edge_ids)
    pos = {e: j for j, e in enumerate(net.edge_ids)}
    return ids, [pos[e] for e in ids]


def log_likelihood(eta_vec, observations: ObservationSet, probes: Sequence[Probe], net: Network, edge_ids=None):
    """Gaussian log-likelihood of one trial and its gradient in eta.

    ``eta_vec`` follows ``edge_ids`` (default: every edge in network order).
    """
    eta = np.asarray(eta_vec, dtype=float)
    if np.any(eta <= 0) or np.any(eta > 1):
        raise TomographyError("parameter-out-of-domain", "eta must lie in (0, 1]")
    ids, cols = _edge_index(net, edge_ids)
    A = measurement_matrix(probes, net).entries[:, cols]
    lik = _Likelihood(A, _coeffs(probes), observations.stats())
    return lik.value_grad(eta)


@dataclass(frozen=True, eq=False)
class EstimationResult:
    eta_hat: np.ndarray
    loglik: float
    iterations: int
    converged: bool
    grad_norm: float
    message: str = ""
    per_subgraph: Optional[tuple] = None


def _initial_eta(A, coeffs, stats):
    s1 = stats[0]
    mean_obs = s1 / (coeffs.c * coeffs.t)
    eP = np.clip(mean_obs * np.abs(mean_obs) / coeffs.amp, 1e-6, 1.0)
    lengths = A.sum(axis=1)
    init = np.empty(A.shape[1])
    for j in range(A.shape[1]):
        rows = np.flatnonzero(A[:, j])
        best = rows[np.argmin(lengths[rows])]
        init[j] = eP[best] ** (1.0 / lengths[best])
    return np.clip(init, 0.05, 0.99)


def _logit(x):
    return np.log(x) - np.log1p(-x)


def _expit(th):
    return 0.5 * (1.0 + np.tanh(0.5 * th))


def _optimize(lik: _Likelihood, init, tol, max_iter):
    def objective(th):
        eta = np.clip(_expit(th), ETA_FLOOR, 1.0 - 1e-16)
        ll, g = lik.value_grad(eta)
        return -ll, -g * eta * (1.0 - eta)

    res = minimize(objective, _logit(init), jac=True, method="BFGS",
                   options={"gtol": tol, "maxiter": max_iter, "norm": np.inf})
    th = res.x
    iters = int(res.nit)
    f, g = objective(th)
    # BFGS line searches can stall at the roundoff floor before reaching tol;
    # finish with safeguarded Newton steps on a finite-difference Hessian.
    for _ in range(20):
        if np.max(np.abs(g)) < tol:
            break
        H = np.empty((len(th), len(th)))
        for k in range(len(th)):
            h = 1e-6 * max(1.0, abs(th[k]))
            e = np.zeros_like(th)
            e[k] = h
            H[:, k] = (objective(th + e)[1] - objective(th - e)[1]) / (2 * h)
        H = 0.5 * (H + H.T)
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            break
        accepted = False
        for shrink in (1.0, 0.5, 0.25, 0.125):
            cand = th - shrink * step
            fc, gc = objective(cand)
            if fc <= f + 1e-12 * max(1.0, abs(f)):
                th, f, g, accepted = cand, fc, gc, True
                break
        iters += 1
        if not accepted:
            break
    gnorm = float(np.max(np.abs(g))) if len(g) else 0.0
    eta = np.clip(_expit(th), ETA_FLOOR, 1.0)
    return eta, -f, iters, gnorm < tol, gnorm, str(res.message)


def mle_estimate(
    observations: ObservationSet,
    probes: Sequence[Probe],
    net: Network,
    cover: Optional[SubgraphCover] = None,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> EstimationResult:
    """Maximum-likelihood link transmissivities for one trial.

    With ``cover`` each subgraph is estimated on its own (edge-disjoint
    probe supports make the likelihood separable) and the pieces are joined.
    """
    A_full = measurement_matrix(probes, net).entries
    if not is_identifiable(A_full):
        raise TomographyError("not-identifiable", "the plan does not identify every edge")
    co = _coeffs(probes)
    stats = observations.stats()
    if cover is None:
        lik = _Likelihood(A_full, co, stats)
        eta, ll, it, ok, gn, msg = _optimize(lik, _initial_eta(A_full, co, stats), tol, max_iter)
        return EstimationResult(eta, ll, it, ok, gn, msg)

    eta = np.empty(A_full.shape[1])
    total_ll, total_it, ok_all, worst, parts = 0.0, 0, True, 0.0, []
    pos = {e: j for j, e in enumerate(net.edge_ids)}
    for sg in cover.subgraphs:
        rows = list(sg.probes)
        cols = sorted(pos[e] for e in sg.edges)
        A = A_full[np.ix_(rows, cols)]
        sub_co = _Coeffs(*(arr[rows] for arr in (co.amp, co.ks, co.ke, co.t, co.c)))
        sub_stats = tuple(s[rows] for s in stats)
        lik = _Likelihood(A, sub_co, sub_stats)
        e_hat, ll, it, ok, gn, msg = _optimize(lik, _initial_eta(A, sub_co, sub_stats), tol, max_iter)
        eta[cols] = e_hat
        total_ll += ll
        total_it += it
        ok_all &= ok
        worst = max(worst, gn)
        parts.append(EstimationResult(e_hat, ll, it, ok, gn, msg))
    return EstimationResult(eta, total_ll, total_it, ok_all, worst, "per-subgraph", tuple(parts))


def crb_experiment(probes: Sequence[Probe], net: Network, trials: int, seed: int, cover=None):
    """Empirical bias and total variance of the MLE against the CRB trace."""
    report = network_fim(probes, net)
    if not report.identifiable:
        raise TomographyError("not-identifiable", "the plan does not identify every edge")
    truth = report.eta
    obs = sample_observations(probes, net, trials, seed)
    fits = [mle_estimate(o, probes, net, cover=cover) for o in obs]
    est = np.array([f.eta_hat for f in fits])
    bias = est.mean(axis=0) - truth
    cov = np.cov(est, rowvar=False, ddof=1).reshape(len(truth), len(truth))
    emp = float(np.trace(cov))
    crb = report.trace_inv
    return {
        "edges": list(net.edge_ids),
        "eta_true": truth.tolist(),
        "bias": bias.tolist(),
        "mean_abs_bias": float(np.mean(np.abs(bias))),
        "empirical_cov_trace": emp,
        "crb_trace": crb,
        "ratio": emp / crb,
        "trials": trials,
        "converged": sum(f.converged for f in fits),
        "seed": seed,
    }
