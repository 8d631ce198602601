import numpy as np

from optomo import verify


def test_each_scope_passes():
    for scope in verify.SCOPES:
        results = verify.run(scope, seed=3)
        assert results and all(r.passed for r in results), [r.line() for r in results]


def test_network_suite_on_eight_edge_graphs():
    rng = np.random.default_rng(0)
    results = verify.check_network_fim(rng, cases=40, max_edges=8)
    assert all(r.passed for r in results)
    assert {r.name: r.cases for r in results}["identifiable"] == 40


def test_check_result_records_failures():
    r = verify.CheckResult("x", "y", 1e-6)
    r.record([1.0, 2.0], [1.0, 2.0 + 1e-3], {"i": 0})
    assert not r.passed and r.failures[0]["inputs"] == {"i": 0}
    assert r.line().startswith("FAIL x/y")
    ok = verify.CheckResult("x", "z", 1e-6)
    ok.record([0.0], [1e-10], {}, floor=1e-8)
    assert ok.passed


def test_same_seed_same_report():
    a = [r.worst for r in verify.run("appendixA", seed=5)]
    b = [r.worst for r in verify.run("appendixA", seed=5)]
    assert a == b
