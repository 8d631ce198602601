"""Network-level Fisher information and the det / trace-of-inverse metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import physics
from .errors import TomographyError
from .linalg import exact_det, exact_inverse
from .network import MeasurementMatrix, Network, Probe, is_identifiable, measurement_matrix, probe_transmissivity
from .physics import ProbeEnergy


@dataclass(frozen=True)
class ProbeInfo:
    index: int
    eta_P: float
    fi: float
    copies: int

    @property
    def weight(self):
        """``c * eta_P**2 * I_P``: the probe's entry of the diagonal weight matrix."""
        return self.copies * self.eta_P**2 * self.fi


@dataclass(frozen=True, eq=False)
class FimReport:
    fim: np.ndarray
    det: float
    trace_inv: float
    per_probe: tuple
    matrix: MeasurementMatrix
    eta: np.ndarray
    identifiable: bool
    det_closed: Optional[float] = None
    trace_inv_closed: Optional[float] = None

    @property
    def closed_form_applicable(self):
        return self.det_closed is not None

    def discrepancy(self):
        """Relative gaps between closed-form and dense metrics (None if inapplicable)."""
        if not self.closed_form_applicable:
            return None
        return {
            "det": _rel(self.det_closed, self.det),
            "trace_inv": _rel(self.trace_inv_closed, self.trace_inv),
        }


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def channel_fi(probe: Probe, eta_P: float) -> float:
    """FI of one copy of ``probe`` about its own channel transmissivity."""
    if eta_P <= 0:
        raise TomographyError("degenerate-transmissivity", "zero channel transmissivity")
    e = ProbeEnergy(probe.N, probe.Na, probe.t)
    return physics.fi_for(probe.impl, e, eta_P)


def structured_fim(A, eta, weights) -> np.ndarray:
    """``D_eta^-1 A' D_P A D_eta^-1`` (valid for rectangular ``A`` too)."""
    B = np.asarray(A, dtype=float) / np.asarray(eta, dtype=float)[None, :]
    F = B.T @ (np.asarray(weights, dtype=float)[:, None] * B)
    return 0.5 * (F + F.T)


def dense_metrics(F):
    """``(det, trace of inverse)`` of a symmetric positive-definite matrix."""
    F = 0.5 * (F + F.T)
    try:
        L = np.linalg.cholesky(F)
    except np.linalg.LinAlgError:
        return 0.0, math.inf
    det = float(np.prod(np.diag(L)) ** 2)
    Linv = np.linalg.inv(L)
    return det, float(np.sum(Linv * Linv))


def product_det(A, eta, weights) -> float:
    """``prod(eta_i^-2) * det(A)^2 * prod(c * eta_P^2 * I_P)`` for square ``A``."""
    A = np.asarray(A)
    if A.shape[0] != A.shape[1]:
        raise TomographyError("lemma-requires-square-A", f"A has shape {A.shape}")
    dA = exact_det(A)
    eta = np.asarray(eta, dtype=float)
    return float(np.prod(eta**-2.0)) * float(dA) ** 2 * float(np.prod(weights))


def product_trace_inv(A, eta, weights) -> float:
    """``sum_i eta_i^2 sum_j (A^-1)_ij^2 / (c_j eta_Pj^2 I_Pj)`` for square ``A``."""
    A = np.asarray(A)
    if A.shape[0] != A.shape[1]:
        raise TomographyError("lemma-requires-square-A", f"A has shape {A.shape}")
    Ainv = np.array([[float(x) for x in row] for row in exact_inverse(A)])
    eta = np.asarray(eta, dtype=float)
    return float(np.sum(eta[:, None] ** 2 * Ainv**2 / np.asarray(weights, dtype=float)[None, :]))


def network_fim(probes: Sequence[Probe], net: Network) -> FimReport:
    A = measurement_matrix(probes, net)
    eta = net.eta_vector(A.cols)
    if np.any(eta <= 0) or np.any(eta > 1):
        raise TomographyError("transmissivity-out-of-range", "eta must lie in (0, 1]")
    infos = []
    for i, p in enumerate(probes):
        eta_P = probe_transmissivity(p, net)
        infos.append(ProbeInfo(i, eta_P, channel_fi(p, eta_P), p.c))
    weights = np.array([pi.weight for pi in infos])
    F = structured_fim(A.entries, eta, weights)
    ident = is_identifiable(A.entries)
    if ident:
        det, tr = dense_metrics(F)
    else:
        det, tr = 0.0, math.inf
    det_c = tr_c = None
    if ident and A.shape[0] == A.shape[1]:
        det_c = product_det(A.entries, eta, weights)
        tr_c = product_trace_inv(A.entries, eta, weights)
    return FimReport(F, det, tr, tuple(infos), A, eta, ident, det_c, tr_c)


def det_fim(report: FimReport) -> float:
    A = report.matrix.entries
    return product_det(A, report.eta, [p.weight for p in report.per_probe])


def trace_inv_fim(report: FimReport) -> float:
    A = report.matrix.entries
    return product_trace_inv(A, report.eta, [p.weight for p in report.per_probe])


@dataclass(frozen=True, eq=False)
class PlanComparison:
    det_ratio: float
    trace_delta: float
    det_ratio_dense: float
    trace_delta_dense: float
    weighted_sum_delta: Optional[float]
    weighted_sum_agrees: Optional[bool]
    report_a: FimReport
    report_b: FimReport


def compare_plans(plan_a: Sequence[Probe], plan_b: Sequence[Probe], net: Network) -> PlanComparison:
    """Det ratio and trace-of-inverse change when switching ``plan_a`` to ``plan_b``.

    Both plans must route the same walks; only implementation, block size and
    copies may differ. ``plan_b`` is aligned to ``plan_a``'s probe order.
    """
    keys_a = [p.walk.key for p in plan_a]
    by_key_b = {p.walk.key: p for p in plan_b}
    if len(plan_a) != len(plan_b) or set(keys_a) != set(by_key_b) or len(by_key_b) != len(plan_b):
        raise TomographyError("plans-not-comparable", "plans do not share the same walks")
    plan_b = [by_key_b[k] for k in keys_a]
    ra = network_fim(plan_a, net)
    rb = network_fim(plan_b, net)
    if not (ra.identifiable and rb.identifiable):
        raise TomographyError("not-identifiable", "both plans must identify every edge")
    det_dense = rb.det / ra.det
    tr_dense = rb.trace_inv - ra.trace_inv
    ws = agrees = None
    if ra.closed_form_applicable:
        ca = np.array([p.copies * p.fi for p in ra.per_probe])
        cb = np.array([p.copies * p.fi for p in rb.per_probe])
        det_ratio = float(np.prod(cb / ca))
        trace_delta = rb.trace_inv_closed - ra.trace_inv_closed
        Ainv = np.array([[float(x) for x in row] for row in exact_inverse(ra.matrix.entries)])
        eta_P = np.array([p.eta_P for p in ra.per_probe])
        wts = ra.eta[:, None] ** 2 * Ainv**2 / eta_P[None, :] ** 2
        ws = float(np.sum(wts * (1.0 / cb - 1.0 / ca)[None, :]))
        agrees = abs(ws - trace_delta) <= 1e-9 * max(abs(trace_delta), ra.trace_inv_closed)
    else:
        det_ratio, trace_delta = det_dense, tr_dense
    return PlanComparison(det_ratio, trace_delta, det_dense, tr_dense, ws, agrees, ra, rb)


# ---- spatially split probes over two or more channels ---------------------


@dataclass(frozen=True)
class SplitComparison:
    det_squeezed: float
    det_entangled: float
    trace_inv_squeezed: float
    trace_inv_entangled: float
    beta: Optional[float] = None
    gamma: Optional[float] = None
    S: Optional[float] = None
    Q: Optional[float] = None
    extra: dict = field(default_factory=dict)

    @property
    def diff_det(self):
        return self.det_squeezed - self.det_entangled

    @property
    def diff_trace_inv(self):
        return self.trace_inv_entangled - self.trace_inv_squeezed


def _check_split_etas(etas):
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    if etas.ndim != 1 or len(etas) < 1:
        raise TomographyError("parameter-out-of-domain", "need a non-empty vector of etas")
    if np.any(etas <= 0) or np.any(etas > 1):
        raise TomographyError("parameter-out-of-domain", "every eta must lie in (0, 1]")
    return etas


def split_entangled_coefficients(N, Na, etas):
    """``(beta, gamma, S, Q, c_n)`` of the split-entangled FIM ``beta diag(1/eta) + gamma J``."""
    etas = _check_split_etas(etas)
    n = len(etas)
    c = physics.c_n(Na, n)
    S = float(np.sum(etas))
    Q = float(np.sum(etas**2))
    D = n - c * S
    if not D > 0:
        raise TomographyError("parameter-out-of-domain", f"n - c_n*S = {D:g} must be positive")
    beta = N + c * c * S / (4.0 * n * D)
    gamma = c * N / D + c * c * (n + c * S) / (4.0 * n * D * D)
    return beta, gamma, S, Q, c


def split_entangled_fim(N, Na, etas) -> np.ndarray:
    etas = _check_split_etas(etas)
    beta, gamma, *_ = split_entangled_coefficients(N, Na, etas)
    return beta * np.diag(1.0 / etas) + gamma * np.ones((len(etas), len(etas)))


def split_comparison_independent(N, Na, etas) -> SplitComparison:
    """Independent squeezing vs one entangled block split over independent channels."""
    etas = _check_split_etas(etas)
    n = len(etas)
    c1 = physics.c_n(Na, 1)
    g1 = 1.0 - c1 * etas
    det_s = float(np.prod(N / (etas * g1) + c1 * c1 / (2.0 * g1 * g1)))
    tr_s = float(np.sum(2.0 * etas * g1 * g1 / (2.0 * N * g1 + c1 * c1 * etas)))

    beta, gamma, S, Q, c = split_entangled_coefficients(N, Na, etas)
    D = n - c * S
    big = 4.0 * N * n * D + c * c * S
    half = 2.0 * N * n * D + c * c * S
    coupling = half / big
    det_e = (2.0 * n / D) * (N**n / float(np.prod(etas))) * (1.0 + c * c * S / (4.0 * N * n * D)) ** n * coupling
    tr_e = 2.0 * D * (4.0 * N * n * D * (n * S - c * Q) + 2.0 * n * c * c * S * S - c * c * (n * Q + c * S * Q)) / (big * half)
    return SplitComparison(det_s, det_e, tr_s, tr_e, beta, gamma, S, Q, {"coupling": coupling, "c1": c1, "cn": c})


def rank_one_trace_inv(beta, gamma, S, Q):
    """Sherman-Morrison trace of ``(beta diag(1/eta) + gamma J)^-1``."""
    return S / beta - gamma * Q / (beta * (beta + gamma * S))


def split_comparison_shared(N, Na, eta1, eta2) -> SplitComparison:
    """Two probes over channels ``eta1*eta2`` and ``eta2`` (one shared link)."""
    _check_split_etas([eta1, eta2])
    e1, e2 = float(eta1), float(eta2)
    c1 = physics.c_n(Na, 1)
    c2 = physics.c_n(Na, 2)
    a = 1.0 - c1 * e1 * e2
    b = 1.0 - c1 * e2
    det_s = (1.0 / (4.0 * e1)) * (2 * N * a + c1 * c1 * e1 * e2) / a**2 * (2 * N * b + c1 * c1 * e2) / b**2
    tr_s = (2.0 / e2) * (
        e1 * a * a / (2 * N * a + c1 * c1 * e1 * e2) + (e1 * e1 + e2 * e2) * b * b / (2 * N * b + c1 * c1 * e2)
    )
    s = 1.0 + e1
    w = 2.0 - c2 * e2 * s
    if not w > 0:
        raise TomographyError("parameter-out-of-domain", "2 - c_2*eta2*(1+eta1) must be positive")
    det_e = (32 * N * N * w * w + 12 * N * c2 * c2 * e2 * s * w + c2**4 * e2 * e2 * s * s) / (16.0 * e1 * w**3)
    tr_e = (2.0 * w / (s * e2)) * (
        4 * e1 * (s * s + e2 * e2) / (16 * N - c2 * e2 * (8 * N - c2) * s)
        + e2 * e2 * w / (8 * N - c2 * e2 * (4 * N - c2) * s)
    )
    return SplitComparison(det_s, det_e, tr_s, tr_e, extra={"c1": c1, "c2": c2})


@dataclass(frozen=True)
class SufficientConditions:
    f: float
    g: float
    coupling: float
    c1: float
    cn: float
    S: float
    Q: Optional[float]
    f_gt_g: bool
    coupling_le_bound: bool
    trace_condition: Optional[bool]
    S_ge_ratio: bool

    @property
    def det_guaranteed(self):
        """Both halves of the determinant argument hold at this point."""
        return self.f_gt_g and self.coupling_le_bound


COUPLING_BOUND = 0.55


def sufficient_conditions_from_sums(N, Na, n, S, Q=None) -> SufficientConditions:
    """Diagnostics for the squeezing-vs-split-entanglement bounds (one-way implications)."""
    c1 = physics.c_n(Na, 1)
    cn = physics.c_n(Na, n)
    D1 = n - c1 * S
    Dn = n - cn * S
    if not (D1 > 0 and Dn > 0):
        raise TomographyError("parameter-out-of-domain", "need n - c*S > 0")
    f = (n / D1) ** n * (1.0 + c1 * c1 * S / (2.0 * N * D1)) ** n
    g = (2.0 * COUPLING_BOUND * n / Dn) * (1.0 + cn * cn * S / (4.0 * N * n * Dn)) ** n
    coupling = (2 * N * n * Dn + cn * cn * S) / (4 * N * n * Dn + cn * cn * S)
    tr_cond = None if Q is None else bool(c1 * S * S > cn * Q)
    return SufficientConditions(
        f, g, coupling, c1, cn, S, Q, bool(f > g), bool(coupling <= COUPLING_BOUND), tr_cond, bool(S >= cn / c1)
    )


def sufficient_condition_checks(N, Na, etas) -> SufficientConditions:
    etas = _check_split_etas(etas)
    return sufficient_conditions_from_sums(N, Na, len(etas), float(np.sum(etas)), float(np.sum(etas**2)))


# ---- grid sweeps ----------------------------------------------------------

SWEEP_HEADER = ("eta1", "eta2", "det_s", "det_e", "trinv_s", "trinv_e", "diff_det", "diff_trinv")


def parse_grid(spec: str) -> np.ndarray:
    """``"A:B:STEPS"`` -> ``linspace(A, B, STEPS)``."""
    try:
        a, b, k = spec.split(":")
        a, b, k = float(a), float(b), int(k)
    except ValueError:
        raise TomographyError("invalid-grid", f"grid must be A:B:STEPS, got {spec!r}") from None
    if k < 1 or not (0 < a <= 1 and 0 < b <= 1):
        raise TomographyError("invalid-grid", "need STEPS >= 1 and endpoints in (0, 1]")
    return np.linspace(a, b, k) if k > 1 else np.array([a])


def sweep(mode: str, N: float, Na: float, grid: np.ndarray):
    """Rows ``(eta1, eta2, det_s, det_e, trinv_s, trinv_e, diff_det, diff_trinv)``."""
    if mode == "independent-split":
        fn = lambda a, b: split_comparison_independent(N, Na, [a, b])
    elif mode == "shared-split":
        fn = lambda a, b: split_comparison_shared(N, Na, a, b)
    else:
        raise TomographyError("invalid-mode", f"unknown sweep mode {mode!r}")
    rows = []
    for a in grid:
        for b in grid:
            r = fn(float(a), float(b))
            rows.append(
                (float(a), float(b), r.det_squeezed, r.det_entangled, r.trace_inv_squeezed,
                 r.trace_inv_entangled, r.diff_det, r.diff_trace_inv)
            )
    return rows
