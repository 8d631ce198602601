"""Brute-force Fisher information of a whole probe plan.

Every copy of every probe is stacked into one long Gaussian observation whose
mean and covariance are written directly in the edge transmissivities; its
FIM is then taken by finite differences. Nothing here uses the product
structure exploited by :mod:`optomo.metrics`.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import block_diag

from .network import Network, Probe, measurement_matrix
from .physics import GaussianModel, ProbeEnergy, gaussian_fim, model_for


def plan_model(probes, net: Network) -> GaussianModel:
    A = measurement_matrix(probes, net).entries
    models = [model_for(p.impl, ProbeEnergy(p.N, p.Na, p.t)) for p in probes]
    dim = sum(p.c * p.t for p in probes)

    def channel(theta):
        return [float(np.prod(np.asarray(theta) ** row)) for row in A]

    def mean(theta):
        parts = []
        for p, m, e in zip(probes, models, channel(theta)):
            parts.extend([m.mean(np.array([e]))] * p.c)
        return np.concatenate(parts)

    def cov(theta):
        blocks = []
        for p, m, e in zip(probes, models, channel(theta)):
            blocks.extend([m.cov(np.array([e]))] * p.c)
        return block_diag(*blocks)

    return GaussianModel(dim, A.shape[1], mean, cov)


def brute_force_fim(probes, net: Network) -> np.ndarray:
    """Finite-difference FIM of the concatenated observation of ``probes``."""
    model = plan_model(probes, net)
    return gaussian_fim(model, net.eta_vector(net.edge_ids), deriv="fd")
