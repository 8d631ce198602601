"""Graph, monitor, probe and measurement-matrix data model."""

from __future__ import annotations

import enum
import json
import math
import re
from collections import Counter, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import NetworkError, TomographyError, Violation
from .linalg import exact_rank


def id_key(x):
    """Sort key for node and edge ids: ints numerically, strings naturally."""
    if isinstance(x, bool):
        return (2, str(x))
    if isinstance(x, int):
        return (0, x)
    parts = re.split(r"(\d+)", str(x))
    return (1, tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts))


@dataclass(frozen=True)
class Edge:
    id: object
    u: object
    v: object

    def other(self, node):
        return self.v if node == self.u else self.u


@dataclass(frozen=True, eq=False)
class Network:
    """Undirected multigraph with monitors and (optional) transmissivities.

    Edges are kept in natural edge-id order; that order is the column order of
    every measurement matrix and the output order of probe construction.
    Build instances with :func:`make_network` to get validation.
    """

    nodes: tuple
    edges: tuple
    monitors: frozenset
    eta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=id_key)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: id_key(e.id))))
        object.__setattr__(self, "monitors", frozenset(self.monitors))
        object.__setattr__(self, "eta", dict(self.eta))
        by_id = {e.id: e for e in self.edges}
        adj = {n: [] for n in self.nodes}
        for e in self.edges:
            adj.setdefault(e.u, []).append(e)
            if e.v != e.u:
                adj.setdefault(e.v, []).append(e)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_adj", adj)

    @property
    def edge_ids(self):
        return tuple(e.id for e in self.edges)

    def edge(self, edge_id) -> Edge:
        try:
            return self._by_id[edge_id]
        except KeyError:
            raise TomographyError("unknown-edge", f"edge {edge_id!r} is not in the network") from None

    def incident(self, node):
        return self._adj.get(node, [])

    def edges_between(self, a, b):
        """Edges joining ``a`` and ``b``, in edge-id order."""
        return [e for e in self._adj.get(a, []) if e.other(a) == b and {e.u, e.v} == {a, b}]

    def neighbors(self, node):
        return sorted({e.other(node) for e in self.incident(node)}, key=id_key)

    def is_monitor(self, node):
        return node in self.monitors

    def with_eta(self, eta: Mapping) -> "Network":
        return Network(self.nodes, self.edges, self.monitors, eta)

    def eta_vector(self, edge_ids=None):
        ids = self.edge_ids if edge_ids is None else edge_ids
        missing = [i for i in ids if i not in self.eta]
        if missing:
            raise TomographyError("missing-transmissivity", f"no eta for edges {missing}")
        return np.array([float(self.eta[i]) for i in ids])


def validate_network(net: Network) -> list[Violation]:
    """All invariant violations of ``net``; an empty list means valid."""
    out = []
    node_set = set(net.nodes)
    if len(node_set) != len(net.nodes):
        dup = [n for n, k in Counter(net.nodes).items() if k > 1]
        out += [Violation("duplicate-node", n) for n in dup]
    seen = Counter(e.id for e in net.edges)
    out += [Violation("duplicate-edge-id", i) for i, k in seen.items() if k > 1]
    for e in net.edges:
        for end in (e.u, e.v):
            if end not in node_set:
                out.append(Violation("unknown-endpoint", e.id, f"node {end!r}"))
        if e.u == e.v:
            out.append(Violation("self-loop", e.id))
    if not net.monitors:
        out.append(Violation("no-monitors", None))
    for m in sorted(net.monitors, key=id_key):
        if m not in node_set:
            out.append(Violation("monitor-not-a-node", m))
    for i, val in net.eta.items():
        if i not in net._by_id:
            out.append(Violation("eta-unknown-edge", i))
            continue
        try:
            x = float(val)
        except (TypeError, ValueError):
            out.append(Violation("transmissivity-out-of-range", i, f"eta={val!r}"))
            continue
        if not (0.0 < x <= 1.0) or math.isnan(x):
            out.append(Violation("transmissivity-out-of-range", i, f"eta={val!r}"))
    if net.nodes:
        unreachable = _unreachable_from(net, net.nodes[0])
        for n in unreachable:
            out.append(Violation("disconnected", n, f"not reachable from {net.nodes[0]!r}"))
    else:
        out.append(Violation("empty-graph", None))
    return out


def _unreachable_from(net, start):
    seen = {start}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for e in net.incident(a):
            b = e.other(a)
            if b not in seen:
                seen.add(b)
                queue.append(b)
    return [n for n in net.nodes if n not in seen]


def require_valid(net: Network) -> Network:
    problems = validate_network(net)
    if problems:
        raise NetworkError(problems)
    return net


def make_network(nodes, edges, monitors, eta=None, validate=True) -> Network:
    """Build a network from plain data.

    ``edges`` holds ``(id, u, v)`` triples or :class:`Edge` objects; ``eta``
    maps edge ids to transmissivities.
    """
    es = [e if isinstance(e, Edge) else Edge(*e) for e in edges]
    net = Network(tuple(nodes), tuple(es), frozenset(monitors), dict(eta or {}))
    return require_valid(net) if validate else net


@dataclass(frozen=True)
class Walk:
    """Vertex-edge alternating sequence ``v0, e1, v1, ..., ek, vk``."""

    nodes: tuple
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(self.nodes) != len(self.edges) + 1:
            raise TomographyError("malformed-walk", "need exactly one more node than edges")

    def __len__(self):
        return len(self.edges)

    @property
    def key(self):
        """Orientation-free identity used for duplicate detection."""
        fwd = (self.nodes, self.edges)
        rev = (self.nodes[::-1], self.edges[::-1])
        return min(fwd, rev, key=repr)

    def reversed(self) -> "Walk":
        return Walk(self.nodes[::-1], self.edges[::-1])

    @classmethod
    def from_nodes(cls, net: Network, nodes: Sequence, edges: Sequence | None = None) -> "Walk":
        """Resolve a node sequence to a walk.

        Each hop must be joined by exactly one edge unless ``edges`` names the
        edge ids explicitly (needed with parallel edges).
        """
        nodes = list(nodes)
        if edges is not None:
            return cls(tuple(nodes), tuple(edges))
        hops = []
        for a, b in zip(nodes, nodes[1:]):
            cand = net.edges_between(a, b)
            if not cand:
                raise TomographyError("walk-not-incident", f"no edge between {a!r} and {b!r}")
            if len(cand) > 1:
                raise TomographyError("ambiguous-hop", f"parallel edges between {a!r} and {b!r}; give edge ids")
            hops.append(cand[0].id)
        return cls(tuple(nodes), tuple(hops))


def validate_walk(walk: Walk, net: Network) -> list[Violation]:
    out = []
    if len(walk.edges) < 1:
        out.append(Violation("empty-walk", walk.nodes))
    for i, eid in enumerate(walk.edges):
        e = net._by_id.get(eid)
        if e is None:
            out.append(Violation("unknown-edge", eid))
            continue
        a, b = walk.nodes[i], walk.nodes[i + 1]
        if {a, b} != {e.u, e.v}:
            out.append(Violation("walk-not-incident", eid, f"hop {a!r}->{b!r}"))
    for end in (walk.nodes[0], walk.nodes[-1]):
        if end not in net.monitors:
            out.append(Violation("endpoint-not-monitor", end))
    return out


def walk_support(walk: Walk) -> frozenset:
    """Distinct edges of the walk."""
    return frozenset(walk.edges)


def walk_multiset(walk: Walk) -> dict:
    """Edge traversal counts, repetitions included."""
    return dict(Counter(walk.edges))


class Impl(str, enum.Enum):
    COHERENT = "coherent"
    SQUEEZED = "squeezed"
    ENTANGLED = "entangled"


DEFAULT_N = 100.0
DEFAULT_NA = 0.558


@dataclass(frozen=True)
class Probe:
    """A routed measurement: walk, physical implementation, block size, copies.

    ``N`` is the classical coherent energy and ``Na`` the quantum energy per
    pulse. Coherent and squeezed probes always have ``t == 1``.
    """

    walk: Walk
    impl: Impl = Impl.SQUEEZED
    t: int = 1
    c: int = 1
    N: float = DEFAULT_N
    Na: float = DEFAULT_NA

    def __post_init__(self):
        object.__setattr__(self, "impl", Impl(self.impl))
        if int(self.t) != self.t or self.t < 1:
            raise TomographyError("invalid-probe", f"block size t must be a positive integer, got {self.t!r}")
        if int(self.c) != self.c or self.c < 1:
            raise TomographyError("invalid-probe", f"copies c must be a positive integer, got {self.c!r}")
        object.__setattr__(self, "t", int(self.t))
        object.__setattr__(self, "c", int(self.c))
        if self.impl is not Impl.ENTANGLED and self.t != 1:
            raise TomographyError("invalid-probe", f"{self.impl.value} probes have t = 1")
        if self.N < 0 or self.Na < 0:
            raise TomographyError("invalid-probe", "energies must be non-negative")
        if self.impl is not Impl.COHERENT and not self.Na > 0:
            raise TomographyError("invalid-probe", f"{self.impl.value} probes need Na > 0")

    def replace(self, **kw) -> "Probe":
        data = dict(walk=self.walk, impl=self.impl, t=self.t, c=self.c, N=self.N, Na=self.Na)
        data.update(kw)
        return Probe(**data)


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """Probe-by-edge traversal multiplicities."""

    rows: tuple
    cols: tuple
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self):
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def measurement_matrix(probes: Sequence[Probe], net: Network) -> MeasurementMatrix:
    cols = net.edge_ids
    col_index = {eid: j for j, eid in enumerate(cols)}
    seen = {}
    A = np.zeros((len(probes), len(cols)), dtype=np.int64)
    for i, p in enumerate(probes):
        walk = p.walk if isinstance(p, Probe) else p
        problems = validate_walk(walk, net)
        if problems:
            raise NetworkError(problems)
        k = walk.key
        if k in seen:
            raise TomographyError("duplicate-walk", f"probes {seen[k]} and {i} share a walk; use copies instead")
        seen[k] = i
        for eid, mult in walk_multiset(walk).items():
            A[i, col_index[eid]] = mult
    return MeasurementMatrix(tuple(range(len(probes))), cols, A)


def is_identifiable(A) -> bool:
    """Full column rank over the rationals."""
    arr = np.asarray(A, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] == 0:
        return False
    return exact_rank(arr) == arr.shape[1]


def probe_transmissivity(p, net: Network) -> float:
    """Product of edge transmissivities over the walk, with multiplicity."""
    walk = p.walk if isinstance(p, Probe) else p
    out = 1.0
    for eid, mult in walk_multiset(walk).items():
        if eid not in net.eta:
            raise TomographyError("missing-transmissivity", f"edge {eid!r} has no eta")
        out *= float(net.eta[eid]) ** mult
    return out


# ---- JSON formats ---------------------------------------------------------


def network_from_dict(doc: Mapping, validate=True) -> Network:
    try:
        edges = [(e["id"], e["u"], e["v"]) for e in doc["edges"]]
        eta = {e["id"]: e["eta"] for e in doc["edges"] if e.get("eta") is not None}
        return make_network(doc["nodes"], edges, doc["monitors"], eta, validate=validate)
    except (KeyError, TypeError) as exc:
        raise TomographyError("invalid-network-file", f"missing or malformed field: {exc}") from None


def network_to_dict(net: Network) -> dict:
    edges = []
    for e in net.edges:
        row = {"id": e.id, "u": e.u, "v": e.v}
        if e.id in net.eta:
            row["eta"] = float(net.eta[e.id])
        edges.append(row)
    return {"nodes": list(net.nodes), "monitors": sorted(net.monitors, key=id_key), "edges": edges}


def load_network(path) -> Network:
    with open(path) as fh:
        return network_from_dict(json.load(fh))


def plan_from_list(doc: Sequence[Mapping], net: Network) -> list[Probe]:
    probes = []
    for entry in doc:
        try:
            walk = Walk.from_nodes(net, entry["walk"], entry.get("edges"))
            probes.append(
                Probe(
                    walk,
                    impl=entry.get("impl", "squeezed"),
                    t=entry.get("t", 1),
                    c=entry.get("c", 1),
                    N=float(entry.get("N", DEFAULT_N)),
                    Na=float(entry.get("Na", DEFAULT_NA)),
                )
            )
        except (KeyError, TypeError) as exc:
            raise TomographyError("invalid-plan-file", f"missing or malformed field: {exc}") from None
    for p in probes:
        problems = validate_walk(p.walk, net)
        if problems:
            raise NetworkError(problems)
    return probes


def plan_to_list(probes: Sequence[Probe]) -> list[dict]:
    return [
        {
            "walk": list(p.walk.nodes),
            "edges": list(p.walk.edges),
            "impl": p.impl.value,
            "t": p.t,
            "c": p.c,
            "N": p.N,
            "Na": p.Na,
        }
        for p in probes
    ]


def load_plan(path, net: Network) -> list[Probe]:
    with open(path) as fh:
        return plan_from_list(json.load(fh), net)


def dump_json(obj, path):
    text = json.dumps(obj, indent=2)
    if path is None or str(path) == "-":
        return text
    Path(path).write_text(text + "\n")
    return text
