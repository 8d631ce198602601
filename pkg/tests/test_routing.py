import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from optomo import (
    Probe,
    TomographyError,
    cover_bound,
    find_probes,
    floyd_warshall,
    group_cover,
    is_identifiable,
    make_network,
    measurement_matrix,
    verify_cover,
)
from optomo.generators import random_network
from optomo.network import validate_walk
from optomo.routing import Subgraph, SubgraphCover

EXPECTED = {
    "P1": (1, 2, 1),
    "P2": (1, 2, 4, 2, 1),
    "P3": (1, 2, 3, 2, 1),
    "P4": (5, 4, 5),
    "P5": (5, 4, 3, 4, 5),
    "P6": (1, 5),
}


def test_example_walks(example_walks):
    assert sorted(w.nodes for w in example_walks) == sorted(EXPECTED.values())


def test_example_cover(example_net, example_walks):
    cover = group_cover(example_walks, example_net)
    label = {nodes: name for name, nodes in EXPECTED.items()}
    groups = {frozenset(label[example_walks[i].nodes] for i in sg.probes) for sg in cover.subgraphs}
    assert groups == {frozenset({"P1", "P2", "P3"}), frozenset({"P4", "P5"}), frozenset({"P6"})}
    assert cover_bound(example_net) == 3 == len(cover)
    assert verify_cover(cover, example_net) == []


def test_shortest_paths(example_net):
    spt = floyd_warshall(example_net)
    assert spt.dist(1, 3) == 2
    assert spt.path(1, 3) == [1, 2, 3]
    assert spt.dist(5, 2) == 2
    # two shortest 5->2 routes (via 1 and via 4); the lower intermediate wins
    assert spt.path(5, 2) == [5, 1, 2]


def test_single_edge_network():
    net = make_network([1, 2], [("a", 1, 2)], [1])
    walks = find_probes(net)
    assert [w.nodes for w in walks] == [(1, 2, 1)]
    assert len(group_cover(walks, net)) == 1 == cover_bound(net)


def test_monitor_to_monitor_edge():
    net = make_network([1, 2], [("a", 1, 2)], [1, 2])
    assert [w.nodes for w in find_probes(net)] == [(1, 2)]


def test_disconnected_network_rejected():
    net = make_network([1, 2, 3], [("a", 1, 2)], [1], validate=False)
    with pytest.raises(TomographyError) as info:
        find_probes(net)
    assert info.value.code == "disconnected"


def test_nearest_monitor_tie_goes_to_lowest_id():
    # 2 - 3 is equally far from monitors 1 and 4
    net = make_network([1, 2, 3, 4], [("a", 1, 2), ("b", 2, 3), ("c", 3, 4)], [1, 4])
    walks = {w.edges[len(w) // 2]: w for w in find_probes(net)}
    assert walks["b"].nodes == (1, 2, 3, 2, 1)


def test_group_cover_rejects_foreign_probes(example_net):
    from optomo import Walk

    odd = [Walk.from_nodes(example_net, [1, 2, 3, 4, 5])]
    with pytest.raises(TomographyError) as info:
        group_cover(odd, example_net)
    assert info.value.code == "cover-grouping-failed"


def test_verify_cover_reports_violations(example_net):
    bad = SubgraphCover((
        Subgraph(frozenset({1, 2}), frozenset({"eta1"}), (0,)),
        Subgraph(frozenset({1, 2}), frozenset({"eta1"}), (1,)),
        Subgraph(frozenset({2, 3}), frozenset({"eta2"}), (2,)),
    ))
    got = {v.rule for v in verify_cover(bad, example_net)}
    assert {"condition-1-violated", "condition-2-violated", "condition-3-violated"} <= got


def check_properties(net):
    walks = find_probes(net)
    assert len(walks) == len(net.edges)
    for w in walks:
        assert validate_walk(w, net) == []
    A = measurement_matrix(walks, net).entries
    assert is_identifiable(A)
    cover = group_cover(walks, net)
    assert verify_cover(cover, net) == []
    assert len(cover) == cover_bound(net)


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(
    seed=st.integers(0, 2**32 - 1),
    n_nodes=st.integers(1, 12),
    extra=st.integers(0, 12),
    n_monitors=st.integers(1, 4),
    parallel=st.booleans(),
)
def test_random_graph_properties(seed, n_nodes, extra, n_monitors, parallel):
    if n_nodes == 1:
        return
    rng = np.random.default_rng(seed)
    net = random_network(rng, n_nodes, n_nodes - 1 + extra, n_monitors, parallel=parallel)
    check_properties(net)


def test_probes_with_implementations_group_like_walks(example_net, example_walks):
    probes = [Probe(w, "entangled", t=2) for w in example_walks]
    assert len(group_cover(probes, example_net)) == 3
