"""Probe planning and Fisher-information analysis for optical network tomography."""

from importlib import resources

from .errors import NetworkError, TomographyError, Violation
from .kernels import BACKEND
from .network import (
    Edge,
    Impl,
    MeasurementMatrix,
    Network,
    Probe,
    Walk,
    is_identifiable,
    load_network,
    load_plan,
    make_network,
    measurement_matrix,
    network_from_dict,
    probe_transmissivity,
    validate_network,
)
from .physics import ProbeEnergy, c_n, gaussian_fim
from .routing import cover_bound, find_probes, floyd_warshall, group_cover, verify_cover
from .metrics import compare_plans, network_fim

__version__ = "0.1.0"


def example_network_path():
    """Path of the bundled five-node, two-monitor example network."""
    return resources.files(__name__).joinpath("data", "two_monitor_example.json")


def example_network():
    return load_network(example_network_path())
