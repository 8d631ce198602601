"""Gaussian homodyne observation models and channel Fisher informations.

Vacuum quadrature variance is 1/4 throughout. A block of ``n`` pulses of a
given implementation observed through a channel of transmissivity ``eta``
yields a Gaussian vector whose mean and covariance are built here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import TomographyError

# Reject points where 1 - c*eta is this close to zero (covariance singular).
SINGULAR_GUARD = 1e-12


@dataclass(frozen=True)
class ProbeEnergy:
    """Classical energy ``N``, quantum energy ``Na`` and block size ``n``."""

    N: float
    Na: float
    n: int = 1

    def __post_init__(self):
        if self.N < 0 or self.Na < 0:
            raise TomographyError("invalid-energy", "N and Na must be non-negative")
        if int(self.n) != self.n or self.n < 1:
            raise TomographyError("invalid-energy", "block size n must be a positive integer")


def c_n(Na, n):
    """Squeezing correlation coefficient ``1 - exp(-2 s)`` with ``sinh(s)**2 = n*Na``.

    Evaluated in the cancellation-free algebraic form.
    """
    if Na < 0 or n < 1:
        raise TomographyError("invalid-energy", "need Na >= 0 and n >= 1")
    x = n * Na
    r = math.sqrt(x)
    return 2.0 * r / (math.sqrt(x + 1.0) + r)


def squeeze_correlation(Na, n):
    """Same quantity as :func:`c_n`, computed from the squeeze parameter itself."""
    s = math.asinh(math.sqrt(n * Na))
    return -math.expm1(-2.0 * s)


def squeezing_db(Na):
    """Squeezing in dB, ``10 log10(exp(2 r))`` with ``sinh(r)**2 = Na``."""
    r = math.asinh(math.sqrt(Na))
    return 10.0 * math.log10(math.exp(2.0 * r))


def na_from_db(db):
    """Inverse of :func:`squeezing_db`; 6 dB gives about 0.558."""
    r = db * math.log(10.0) / 20.0
    return math.sinh(r) ** 2


@dataclass(frozen=True)
class GaussianModel:
    """Parametrised Gaussian ``N(mean(theta), cov(theta))``.

    ``mean_jac`` returns a ``(d, p)`` array and ``cov_jac`` a ``(p, d, d)``
    array; they are optional and only needed for analytic FIMs.
    """

    dim: int
    n_params: int
    mean: Callable[[np.ndarray], np.ndarray]
    cov: Callable[[np.ndarray], np.ndarray]
    mean_jac: Optional[Callable[[np.ndarray], np.ndarray]] = None
    cov_jac: Optional[Callable[[np.ndarray], np.ndarray]] = None


def _scalar(theta):
    return float(np.asarray(theta, dtype=float).reshape(-1)[0])


def _check_eta(eta):
    if not 0.0 < eta <= 1.0:
        raise TomographyError("parameter-out-of-domain", f"eta={eta!r} not in (0, 1]")


def model_coherent(e: ProbeEnergy) -> GaussianModel:
    n = e.n
    amp = e.N + e.Na
    u = np.ones(n)

    def mean(th):
        return math.sqrt(amp * _scalar(th)) * u

    def cov(th):
        return 0.25 * np.eye(n)

    def mean_jac(th):
        eta = _scalar(th)
        return (0.5 * math.sqrt(amp / eta) * u)[:, None]

    def cov_jac(th):
        return np.zeros((1, n, n))

    return GaussianModel(n, 1, mean, cov, mean_jac, cov_jac)


def model_squeezed(e: ProbeEnergy) -> GaussianModel:
    n = e.n
    c = squeeze_correlation(e.Na, 1)
    u = np.ones(n)

    def mean(th):
        return math.sqrt(e.N * _scalar(th)) * u

    def cov(th):
        return 0.25 * (1.0 - c * _scalar(th)) * np.eye(n)

    def mean_jac(th):
        eta = _scalar(th)
        return (0.5 * math.sqrt(e.N / eta) * u)[:, None]

    def cov_jac(th):
        return (-0.25 * c * np.eye(n))[None]

    return GaussianModel(n, 1, mean, cov, mean_jac, cov_jac)


def model_entangled(e: ProbeEnergy) -> GaussianModel:
    n = e.n
    c = squeeze_correlation(e.Na, n)
    u = np.ones(n)
    J = np.outer(u, u)

    def mean(th):
        return math.sqrt(e.N * _scalar(th)) * u

    def cov(th):
        return 0.25 * np.eye(n) - (_scalar(th) * c / (4.0 * n)) * J

    def mean_jac(th):
        eta = _scalar(th)
        return (0.5 * math.sqrt(e.N / eta) * u)[:, None]

    def cov_jac(th):
        return (-(c / (4.0 * n)) * J)[None]

    return GaussianModel(n, 1, mean, cov, mean_jac, cov_jac)


def model_for(impl, e: ProbeEnergy) -> GaussianModel:
    impl = getattr(impl, "value", impl)
    return {"coherent": model_coherent, "squeezed": model_squeezed, "entangled": model_entangled}[impl](e)


def model_squeezed_split(N, Na, n):
    """Independent squeezed pulses, pulse ``i`` through its own channel ``eta_i``."""
    c = squeeze_correlation(Na, 1)

    def mean(th):
        return math.sqrt(N) * np.sqrt(np.asarray(th, dtype=float))

    def cov(th):
        return 0.25 * np.eye(n) - 0.25 * c * np.diag(np.asarray(th, dtype=float))

    return GaussianModel(n, n, mean, cov)


def model_entangled_split(N, Na, n):
    """One entangled block of ``n`` pulses split across ``n`` channels."""
    c = squeeze_correlation(Na, n)

    def mean(th):
        return math.sqrt(N) * np.sqrt(np.asarray(th, dtype=float))

    def cov(th):
        v = np.sqrt(np.asarray(th, dtype=float))
        return 0.25 * np.eye(n) - (c / (4.0 * n)) * np.outer(v, v)

    return GaussianModel(n, n, mean, cov)


def model_squeezed_shared(N, Na):
    """Two squeezed pulses over channels ``eta1*eta2`` and ``eta2``."""
    c = squeeze_correlation(Na, 1)

    def mean(th):
        e1, e2 = th
        return math.sqrt(N) * np.array([math.sqrt(e1 * e2), math.sqrt(e2)])

    def cov(th):
        e1, e2 = th
        return np.diag([0.25 - c * e1 * e2 / 4.0, 0.25 - c * e2 / 4.0])

    return GaussianModel(2, 2, mean, cov)


def model_entangled_shared(N, Na):
    """A two-pulse entangled block over channels ``eta1*eta2`` and ``eta2``."""
    c = squeeze_correlation(Na, 2)

    def mean(th):
        e1, e2 = th
        return math.sqrt(N) * np.array([math.sqrt(e1 * e2), math.sqrt(e2)])

    def cov(th):
        e1, e2 = th
        v = np.array([math.sqrt(e1 * e2), math.sqrt(e2)])
        return 0.25 * np.eye(2) - (c / 8.0) * np.outer(v, v)

    return GaussianModel(2, 2, mean, cov)


def fd_step(x):
    return 1e-6 * max(abs(x), 1e-3)


def _fd_derivatives(model, theta):
    p = len(theta)
    dmu = np.empty((model.dim, p))
    dsig = np.empty((p, model.dim, model.dim))
    for i in range(p):
        h = fd_step(theta[i])
        up = theta.copy()
        dn = theta.copy()
        up[i] += h
        dn[i] -= h
        dmu[:, i] = (model.mean(up) - model.mean(dn)) / (2.0 * h)
        dsig[i] = (model.cov(up) - model.cov(dn)) / (2.0 * h)
    return dmu, dsig


def _inverse_spd(S):
    S = 0.5 * (S + S.T)
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        raise TomographyError("covariance-singular", "covariance is not positive definite") from None
    if np.min(np.diag(L)) ** 2 < SINGULAR_GUARD * max(1.0, np.max(np.diag(S))):
        raise TomographyError("covariance-singular", "covariance is numerically singular")
    Linv = np.linalg.inv(L)
    return Linv.T @ Linv


def gaussian_fim(model: GaussianModel, theta, deriv="analytic") -> np.ndarray:
    """Fisher information of a parametrised Gaussian.

    ``I_ij = dmu_i' S^-1 dmu_j + tr(S^-1 dS_i S^-1 dS_j) / 2``. With
    ``deriv="fd"`` the mean and covariance are differentiated by central
    differences (step ``1e-6 * max(|theta_i|, 1e-3)``); this is the oracle
    used to check every closed form.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float)).copy()
    if deriv == "analytic":
        if model.mean_jac is None or model.cov_jac is None:
            raise TomographyError("no-analytic-derivative", "model has no analytic Jacobians")
        dmu = np.asarray(model.mean_jac(theta), dtype=float)
        dsig = np.asarray(model.cov_jac(theta), dtype=float)
    elif deriv in ("fd", "finite-difference"):
        dmu, dsig = _fd_derivatives(model, theta)
    else:
        raise ValueError(f"unknown derivative mode {deriv!r}")
    Sinv = _inverse_spd(np.asarray(model.cov(theta), dtype=float))
    first = dmu.T @ Sinv @ dmu
    W = np.einsum("ab,ibc->iac", Sinv, dsig)
    second = 0.5 * np.einsum("iab,jba->ij", W, W)
    F = first + second
    return 0.5 * (F + F.T)


def _fi_guard(eta, c):
    if eta == 0:
        raise TomographyError("degenerate-transmissivity", "eta = 0 carries no information")
    _check_eta(eta)
    if 1.0 - c * eta < SINGULAR_GUARD:
        raise TomographyError("covariance-singular", f"1 - c*eta = {1.0 - c * eta:g}")


def fi_coherent(e: ProbeEnergy, eta) -> float:
    _fi_guard(eta, 0.0)
    return (e.N + e.Na) * e.n / eta


def fi_squeezed(e: ProbeEnergy, eta) -> float:
    """FI of ``n`` independent squeezed pulses; diverges as eta -> 0."""
    c1 = c_n(e.Na, 1)
    _fi_guard(eta, c1)
    g = 1.0 - c1 * eta
    return e.n * (e.N / (eta * g) + c1 * c1 / (2.0 * g * g))


def fi_entangled(e: ProbeEnergy, eta) -> float:
    """FI of one entangled block of ``n`` pulses; diverges as eta -> 0."""
    cn = c_n(e.Na, e.n)
    _fi_guard(eta, cn)
    g = 1.0 - cn * eta
    return e.n * e.N / (eta * g) + cn * cn / (2.0 * g * g)


def fi_for(impl, e: ProbeEnergy, eta) -> float:
    impl = getattr(impl, "value", impl)
    return {"coherent": fi_coherent, "squeezed": fi_squeezed, "entangled": fi_entangled}[impl](e, eta)


def fact1_threshold(e: ProbeEnergy) -> float:
    """Classical energy above which entanglement beats squeezing at every eta."""
    if e.n < 2:
        raise TomographyError("threshold-undefined", "needs n >= 2 (c_n equals c_1 at n = 1)")
    if not e.Na > 0:
        raise TomographyError("threshold-undefined", "needs Na > 0")
    c1 = c_n(e.Na, 1)
    cn = c_n(e.Na, e.n)
    return c1 * c1 / (2.0 * (cn - c1))


def fact2_threshold(e: ProbeEnergy, eta, which="squeezed") -> float:
    """Classical energy above which the quantum probe beats coherent light at ``eta``."""
    _check_eta(eta)
    if which == "squeezed":
        c = c_n(e.Na, 1)
    elif which == "entangled":
        c = c_n(e.Na, e.n)
    else:
        raise ValueError(f"which must be 'squeezed' or 'entangled', not {which!r}")
    if c == 0:
        return math.inf
    return (1.0 / (c * eta) - 1.0) * e.Na


def sherman_morrison_inverse(diag, u, scale) -> np.ndarray:
    """Closed-form ``(diag(d) + scale * u u')^-1``."""
    d = np.asarray(diag, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(d == 0):
        raise TomographyError("singular-matrix", "diagonal part has a zero")
    dinv_u = u / d
    denom = 1.0 + scale * float(u @ dinv_u)
    if abs(denom) < SINGULAR_GUARD:
        raise TomographyError("singular-matrix", "rank-one update makes the matrix singular")
    return np.diag(1.0 / d) - (scale / denom) * np.outer(dinv_u, dinv_u)


def entangled_cov_inverse(Na, n, eta) -> np.ndarray:
    """``4 I + 4 c eta / (n (1 - c eta)) u u'`` for the entangled block."""
    c = c_n(Na, n)
    if 1.0 - c * eta < SINGULAR_GUARD:
        raise TomographyError("covariance-singular", f"1 - c*eta = {1.0 - c * eta:g}")
    return 4.0 * np.eye(n) + (4.0 * c * eta / (n * (1.0 - c * eta))) * np.ones((n, n))
