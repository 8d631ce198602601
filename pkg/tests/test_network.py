import numpy as np
import pytest

from optomo import (
    Edge,
    NetworkError,
    Probe,
    TomographyError,
    Walk,
    is_identifiable,
    make_network,
    measurement_matrix,
    network_from_dict,
    probe_transmissivity,
    validate_network,
)
from optomo.linalg import bareiss_rank, exact_det, exact_inverse, exact_rank
from optomo.network import id_key, load_plan, network_to_dict, plan_to_list, dump_json


def rules(net):
    return {v.rule for v in validate_network(net)}


def test_example_network_is_valid(example_net):
    assert validate_network(example_net) == []
    assert example_net.edge_ids == ("eta1", "eta2", "eta3", "eta4", "eta5", "eta6")


def test_edge_ids_sort_naturally():
    net = make_network([1, 2], [("e10", 1, 2), ("e2", 1, 2), ("e1", 1, 2)], [1])
    assert net.edge_ids == ("e1", "e2", "e10")
    assert id_key(3) < id_key(10)


def test_validation_collects_every_problem():
    net = make_network(
        [1, 2, 2, 3, 4],
        [("a", 1, 2), ("a", 2, 3), ("b", 3, 3), ("c", 1, 9)],
        [7],
        eta={"a": 1.5, "zz": 0.5},
        validate=False,
    )
    got = rules(net)
    for rule in ("duplicate-node", "duplicate-edge-id", "self-loop", "unknown-endpoint",
                 "monitor-not-a-node", "transmissivity-out-of-range", "eta-unknown-edge"):
        assert rule in got


def test_disconnected_and_unmonitored():
    net = make_network([1, 2, 3, 4], [("a", 1, 2), ("b", 3, 4)], [1], validate=False)
    assert "disconnected" in rules(net)
    net = make_network([1, 2], [("a", 1, 2)], [], validate=False)
    assert "no-monitors" in rules(net)
    with pytest.raises(NetworkError) as info:
        make_network([1, 2], [("a", 1, 2)], [])
    assert info.value.code == "no-monitors"


def test_transmissivity_range():
    make_network([1, 2], [("a", 1, 2)], [1], eta={"a": 1.0})
    for bad in (0.0, -0.1, 1.0001):
        with pytest.raises(NetworkError):
            make_network([1, 2], [("a", 1, 2)], [1], eta={"a": bad})


def test_walk_rules(example_net):
    w = Walk.from_nodes(example_net, [1, 2, 1])
    assert w.edges == ("eta1", "eta1")
    with pytest.raises(TomographyError) as info:
        Walk.from_nodes(example_net, [1, 3])
    assert info.value.code == "walk-not-incident"
    bad = Walk((2, 3, 2), ("eta2", "eta2"))
    with pytest.raises(NetworkError) as info:
        measurement_matrix([bad], example_net)
    assert info.value.code == "endpoint-not-monitor"


def test_parallel_edges_need_explicit_ids():
    net = make_network([1, 2], [("a", 1, 2), ("b", 1, 2)], [1])
    with pytest.raises(TomographyError) as info:
        Walk.from_nodes(net, [1, 2, 1])
    assert info.value.code == "ambiguous-hop"
    w = Walk.from_nodes(net, [1, 2, 1], ["a", "b"])
    A = measurement_matrix([Probe(w, "coherent")], net).entries
    assert A.tolist() == [[1, 1]]


def test_measurement_matrix_counts_multiplicity(example_net, example_walks):
    A = measurement_matrix(example_walks, example_net).entries
    assert A.shape == (6, 6)
    assert A[0].tolist() == [2, 0, 0, 0, 0, 0]
    assert A[1].tolist() == [2, 2, 0, 0, 0, 0]
    assert exact_det(A) ** 2 == 1024
    assert is_identifiable(A)


def test_duplicate_walk_rejected_in_either_orientation(example_net):
    w = Walk.from_nodes(example_net, [1, 5])
    with pytest.raises(TomographyError) as info:
        measurement_matrix([w, w.reversed()], example_net)
    assert info.value.code == "duplicate-walk"


def test_identifiability_is_exact():
    assert not is_identifiable([[1, 1], [2, 2]])
    assert is_identifiable([[1, 0], [1, 1]])
    # a combination that cancels modulo 2**31 - 1 but not over the integers
    p = 2147483647
    M = np.array([[1, 1], [1, 1 + p]], dtype=np.int64)
    assert exact_rank(M) == 2 == bareiss_rank(M)
    assert not is_identifiable(np.zeros((3, 0), dtype=int))


def test_exact_inverse_matches_numpy(rng):
    A = rng.integers(-3, 4, size=(5, 5))
    while exact_det(A) == 0:
        A = rng.integers(-3, 4, size=(5, 5))
    inv = np.array([[float(x) for x in r] for r in exact_inverse(A)])
    assert np.allclose(inv, np.linalg.inv(A), rtol=1e-12, atol=1e-12)
    assert exact_det(A) == round(np.linalg.det(A))


def test_probe_transmissivity(example_net):
    w = Walk.from_nodes(example_net, [1, 2, 4, 2, 1])
    assert probe_transmissivity(w, example_net) == pytest.approx(0.9**2 * 0.75**2, rel=1e-15)
    bare = example_net.with_eta({})
    with pytest.raises(TomographyError) as info:
        probe_transmissivity(w, bare)
    assert info.value.code == "missing-transmissivity"


def test_probe_invariants(example_walks):
    w = example_walks[0]
    with pytest.raises(TomographyError):
        Probe(w, "squeezed", t=2)
    with pytest.raises(TomographyError):
        Probe(w, "entangled", t=0)
    with pytest.raises(TomographyError):
        Probe(w, "coherent", c=0)
    assert Probe(w, "entangled", t=3).replace(c=5).c == 5


def test_json_round_trip(tmp_path, example_net, squeezed_plan):
    doc = network_to_dict(example_net)
    again = network_from_dict(doc)
    assert again.edge_ids == example_net.edge_ids and again.eta == example_net.eta
    path = tmp_path / "plan.json"
    dump_json(plan_to_list(squeezed_plan), path)
    loaded = load_plan(path, example_net)
    assert [p.walk for p in loaded] == [p.walk for p in squeezed_plan]


def test_bad_network_file():
    with pytest.raises(TomographyError) as info:
        network_from_dict({"nodes": [1]})
    assert info.value.code == "invalid-network-file"


def test_edge_dataclass():
    assert Edge("x", 1, 2).other(1) == 2
