"""Probe routing: shortest paths, probe construction and subgraph covers."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import TomographyError, Violation
from .network import Network, Walk, id_key, require_valid, walk_support


@dataclass(frozen=True, eq=False)
class ShortestPathTable:
    """Hop distances ``D`` and penultimate-vertex table ``T`` over ``nodes``."""

    nodes: tuple
    D: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.nodes)})

    def index(self, node):
        return self._index[node]

    def dist(self, a, b) -> int:
        return int(self.D[self._index[a], self._index[b]])

    def path(self, a, b) -> list:
        """Vertex sequence of the stored shortest path from ``a`` to ``b``."""
        i, j = self._index[a], self._index[b]
        if self.D[i, j] >= kernels.UNREACHABLE:
            raise TomographyError("disconnected", f"{b!r} unreachable from {a!r}")
        out = [j]
        while j != i:
            j = int(self.T[i, j])
            out.append(j)
        return [self.nodes[k] for k in reversed(out)]


def floyd_warshall(net: Network) -> ShortestPathTable:
    """All-pairs hop distances with path reconstruction.

    Ties between equal-length paths keep the first intermediate vertex in
    ascending node-id order.
    """
    nodes = net.nodes
    idx = {n: i for i, n in enumerate(nodes)}
    adj = np.zeros((len(nodes), len(nodes)), dtype=np.int64)
    for e in net.edges:
        if e.u != e.v:
            adj[idx[e.u], idx[e.v]] = 1
            adj[idx[e.v], idx[e.u]] = 1
    D, T = kernels.floyd_warshall(adj)
    bad = np.argwhere(D >= kernels.UNREACHABLE)
    if len(bad):
        a, b = bad[0]
        raise TomographyError("disconnected", f"no path between {nodes[a]!r} and {nodes[b]!r}")
    D.setflags(write=False)
    T.setflags(write=False)
    return ShortestPathTable(nodes, D, T)


def _hop_edge(net, a, b):
    return net.edges_between(a, b)[0].id


def _path_walk(net, node_path):
    edges = [_hop_edge(net, a, b) for a, b in zip(node_path, node_path[1:])]
    return list(node_path), edges


def _loop_back(net, spt, monitor, near, far, edge_id):
    """``monitor ~> near -> far -> near ~> monitor`` over ``edge_id``."""
    nodes, edges = _path_walk(net, spt.path(monitor, near))
    out_nodes = nodes + [far] + nodes[::-1]
    out_edges = edges + [edge_id, edge_id] + edges[::-1]
    return Walk(tuple(out_nodes), tuple(out_edges))


def _nearest_monitor(spt, monitors, node):
    # ties go to the smallest monitor id
    return min(monitors, key=lambda m: (spt.dist(m, node), id_key(m)))


def find_probes(net: Network, spt: ShortestPathTable | None = None) -> list[Walk]:
    """One probe walk per edge, in edge-id order.

    Edges between two monitors are probed directly, monitor-incident edges by
    a one-hop loop-back, and every other edge by the shorter loop-back from
    the nearest monitor of either endpoint.
    """
    require_valid(net)
    spt = spt or floyd_warshall(net)
    monitors = sorted(net.monitors, key=id_key)
    walks = []
    for e in net.edges:
        u, v = e.u, e.v
        u_mon, v_mon = net.is_monitor(u), net.is_monitor(v)
        if u_mon and v_mon:
            walks.append(Walk((u, v), (e.id,)))
        elif u_mon or v_mon:
            m, other = (u, v) if u_mon else (v, u)
            walks.append(Walk((m, other, m), (e.id, e.id)))
        else:
            m_u = _nearest_monitor(spt, monitors, u)
            m_v = _nearest_monitor(spt, monitors, v)
            du, dv = spt.dist(m_u, u), spt.dist(m_v, v)
            if du < dv or (du == dv and id_key(m_u) < id_key(m_v)):
                walks.append(_loop_back(net, spt, m_u, u, v, e.id))
            else:
                walks.append(_loop_back(net, spt, m_v, v, u, e.id))
    return walks


@dataclass(frozen=True)
class Subgraph:
    nodes: frozenset
    edges: frozenset
    probes: tuple


@dataclass(frozen=True)
class SubgraphCover:
    subgraphs: tuple

    def __len__(self):
        return len(self.subgraphs)

    def edge_groups(self):
        return [sg.edges for sg in self.subgraphs]


def _is_seed(walk, net):
    sup = walk_support(walk)
    if len(sup) != 1:
        return False
    e = net.edge(next(iter(sup)))
    return net.is_monitor(e.u) or net.is_monitor(e.v)


def group_cover(walks, net: Network) -> SubgraphCover:
    """Group probe-construction output into an edge-disjoint subgraph cover.

    Every probe over a single monitor-incident edge seeds one subgraph; each
    longer probe joins the unique seed whose edge it traverses.
    """
    walks = [getattr(w, "walk", w) for w in walks]
    seeds = [i for i, w in enumerate(walks) if _is_seed(w, net)]
    seed_edge = {i: next(iter(walk_support(walks[i]))) for i in seeds}
    members = {i: [i] for i in seeds}
    for j, w in enumerate(walks):
        if j in members:
            continue
        sup = walk_support(w)
        hits = [i for i in seeds if seed_edge[i] in sup]
        if len(hits) != 1:
            raise TomographyError(
                "cover-grouping-failed",
                f"probe {j} contains {len(hits)} seed edges; input is not probe-construction output",
            )
        members[hits[0]].append(j)
    subgraphs = []
    for i in seeds:
        ids = tuple(sorted(members[i]))
        nodes = frozenset(n for k in ids for n in walks[k].nodes)
        edges = frozenset(eid for k in ids for eid in walks[k].edges)
        subgraphs.append(Subgraph(nodes, edges, ids))
    return SubgraphCover(tuple(subgraphs))


def cover_bound(net: Network) -> int:
    """Edges with exactly one monitor endpoint plus edges with two."""
    return sum(1 for e in net.edges if net.is_monitor(e.u) or net.is_monitor(e.v))


def _connected(nodes, edges, net):
    if not nodes:
        return False
    adj = {n: set() for n in nodes}
    for eid in edges:
        e = net.edge(eid)
        if e.u in adj and e.v in adj:
            adj[e.u].add(e.v)
            adj[e.v].add(e.u)
    start = next(iter(nodes))
    seen = {start}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for b in adj[a] - seen:
            seen.add(b)
            queue.append(b)
    return seen == set(nodes)


def verify_cover(cover: SubgraphCover, net: Network) -> list[Violation]:
    """Check the subgraph-cover conditions; an empty list means ok."""
    out = []
    owner = {}
    for k, sg in enumerate(cover.subgraphs):
        if not sg.edges or not (sg.nodes & net.monitors):
            out.append(Violation("condition-1-violated", k, "needs an edge and a monitor"))
        for eid in sg.edges:
            e = net.edge(eid)
            if e.u not in sg.nodes or e.v not in sg.nodes:
                out.append(Violation("edge-endpoint-missing", k, f"edge {eid!r}"))
            if eid in owner:
                out.append(Violation("condition-2-violated", k, f"edge {eid!r} also in subgraph {owner[eid]}"))
            else:
                owner[eid] = k
        if sg.edges and not _connected(sg.nodes, sg.edges, net):
            out.append(Violation("subgraph-disconnected", k))
    missing = [eid for eid in net.edge_ids if eid not in owner]
    if missing:
        out.append(Violation("condition-3-violated", None, f"uncovered edges {missing}"))
    return out
