"""``optomo`` command line: planning, analysis, simulation, sweeps, oracle checks.

Exit codes: 0 success (a non-identifiable diagnosis included), 1 bad usage or
input, 2 a verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import metrics, simulate, verify
from .errors import NetworkError, TomographyError
from .network import (
    DEFAULT_N,
    DEFAULT_NA,
    Impl,
    Probe,
    dump_json,
    id_key,
    load_network,
    load_plan,
    plan_to_list,
)
from .routing import cover_bound, find_probes, group_cover, verify_cover

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2
DIGITS = 12


def fmt(x):
    """Round to 12 significant digits; non-finite values become ``None``."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.{DIGITS}g}") if math.isfinite(x) else None
    if isinstance(x, dict):
        return {k: fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [fmt(v) for v in x]
    return x


def _emit(doc, out):
    text = dump_json(fmt(doc), out)
    if out is None or str(out) == "-":
        print(text)


def _cover_doc(cover, net):
    sgs = []
    for sg in cover.subgraphs:
        sgs.append({
            "probes": list(sg.probes),
            "edges": sorted(sg.edges, key=lambda e: net.edge_ids.index(e)),
            "monitors": sorted(sg.nodes & net.monitors, key=id_key),
        })
    problems = verify_cover(cover, net)
    return {
        "subgraphs": sgs,
        "attained": len(cover),
        "bound": cover_bound(net),
        "valid": not problems,
        "violations": [str(v) for v in problems],
    }


def cmd_plan(args):
    net = load_network(args.network)
    walks = find_probes(net)
    t = args.t if args.impl == Impl.ENTANGLED.value else 1
    probes = [Probe(w, args.impl, t, args.copies, args.N, args.Na) for w in walks]
    cover = _cover_doc(group_cover(walks, net), net)
    plan = plan_to_list(probes)
    if args.out is None:
        _emit({"plan": plan, "cover": cover}, None)
    else:
        dump_json(fmt(plan), args.out)
        cover_path = args.cover or str(Path(args.out).with_suffix("")) + ".cover.json"
        dump_json(fmt(cover), cover_path)
        print(f"wrote {len(probes)} probes to {args.out}; cover {cover['attained']}/{cover['bound']} to {cover_path}")
    return EXIT_OK


def _report_doc(report):
    doc = {
        "identifiable": report.identifiable,
        "edges": list(report.matrix.cols),
        "eta": report.eta.tolist(),
        "det": report.det,
        "trace_inv": report.trace_inv,
        "det_closed": report.det_closed,
        "trace_inv_closed": report.trace_inv_closed,
        "discrepancy": report.discrepancy(),
        "measurement_matrix": report.matrix.entries.tolist(),
        "probes": [{"eta_P": p.eta_P, "fi": p.fi, "copies": p.copies} for p in report.per_probe],
        "fim": report.fim.tolist(),
    }
    return doc


def cmd_analyze(args):
    net = load_network(args.network)
    probes = _plan_with_energy(load_plan(args.plan, net), args)
    _emit(_report_doc(metrics.network_fim(probes, net)), args.out)
    return EXIT_OK


def cmd_compare(args):
    net = load_network(args.network)
    plan_a = _plan_with_energy(load_plan(args.plan, net), args)
    plan_b = _plan_with_energy(load_plan(args.plan_b, net), args)
    try:
        cmp = metrics.compare_plans(plan_a, plan_b, net)
    except TomographyError as exc:
        if exc.code != "not-identifiable":
            raise
        ra, rb = metrics.network_fim(plan_a, net), metrics.network_fim(plan_b, net)
        _emit({"identifiable": False, "identifiable_a": ra.identifiable, "identifiable_b": rb.identifiable}, args.out)
        return EXIT_OK
    doc = {
        "identifiable": True,
        "det_ratio": cmp.det_ratio,
        "det_ratio_dense": cmp.det_ratio_dense,
        "trace_delta": cmp.trace_delta,
        "trace_delta_dense": cmp.trace_delta_dense,
        "discrepancy": {
            "det_ratio": metrics._rel(cmp.det_ratio, cmp.det_ratio_dense),
            "trace_delta": metrics._rel(cmp.trace_delta, cmp.trace_delta_dense),
        },
        "weighted_sum_delta": cmp.weighted_sum_delta,
        "weighted_sum_agrees": cmp.weighted_sum_agrees,
        "plan_a": _report_doc(cmp.report_a),
        "plan_b": _report_doc(cmp.report_b),
    }
    _emit(doc, args.out)
    return EXIT_OK


def _plan_with_energy(probes, args):
    # explicit --N / --Na override the energies stored in the plan file
    kw = {}
    if args.N is not None:
        kw["N"] = args.N
    if args.Na is not None:
        kw["Na"] = args.Na
    return [p.replace(**kw) for p in probes] if kw else probes


def cmd_simulate(args):
    net = load_network(args.network)
    probes = _plan_with_energy(load_plan(args.plan, net), args)
    cover = group_cover(probes, net) if args.decompose else None
    doc = simulate.crb_experiment(probes, net, args.trials, args.seed, cover=cover)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_sweep(args):
    grid = metrics.parse_grid(args.grid)
    N = DEFAULT_N if args.N is None else args.N
    Na = DEFAULT_NA if args.Na is None else args.Na
    rows = metrics.sweep(args.mode, N, Na, grid)
    fh = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        w = csv.writer(fh)
        w.writerow(metrics.SWEEP_HEADER)
        for r in rows:
            w.writerow([f"{v:.{DIGITS}g}" for v in r])
    finally:
        if fh is not sys.stdout:
            fh.close()
    log = sys.stderr if fh is sys.stdout else sys.stdout
    arr = np.array(rows)
    for name, col in (("diff_det", 6), ("diff_trinv", 7)):
        print(f"{name}: min={arr[:, col].min():.{DIGITS}g} max={arr[:, col].max():.{DIGITS}g}", file=log)
    return EXIT_OK


def cmd_verify(args):
    results = verify.run(args.scope, args.seed)
    for r in results:
        print(r.line())
        for f in r.failures[:5]:
            print(f"    {json.dumps(fmt(f))}")
    ok = all(r.passed for r in results)
    print("verify: " + ("pass" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser():
    p = argparse.ArgumentParser(prog="optomo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def energy(sp):
        sp.add_argument("--N", type=float, default=None, help=f"classical energy (default {DEFAULT_N:g})")
        sp.add_argument("--Na", type=float, default=None, help=f"quantum energy per pulse (default {DEFAULT_NA:g})")

    sp = sub.add_parser("plan", help="route probes and report the subgraph cover")
    sp.add_argument("--network", required=True)
    sp.add_argument("--out", help="plan file (stdout if omitted)")
    sp.add_argument("--cover", help="cover report path (default: next to --out)")
    sp.add_argument("--impl", choices=[i.value for i in Impl], default=Impl.SQUEEZED.value)
    sp.add_argument("--t", type=int, default=2, help="block size for entangled probes")
    sp.add_argument("--copies", type=int, default=1)
    sp.add_argument("--N", type=float, default=DEFAULT_N)
    sp.add_argument("--Na", type=float, default=DEFAULT_NA)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("analyze", help="FIM, determinant and trace of the inverse")
    sp.add_argument("--network", required=True)
    sp.add_argument("--plan", required=True)
    sp.add_argument("--out")
    energy(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("compare", help="compare two plans over the same walks")
    sp.add_argument("--network", required=True)
    sp.add_argument("--plan", required=True)
    sp.add_argument("--plan-b", required=True)
    sp.add_argument("--out")
    energy(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("simulate", help="Monte-Carlo MLE against the Cramer-Rao bound")
    sp.add_argument("--network", required=True)
    sp.add_argument("--plan", required=True)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--decompose", action="store_true", help="estimate each cover subgraph separately")
    sp.add_argument("--out")
    energy(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="squeezed vs entangled split grids as CSV")
    sp.add_argument("--mode", choices=["independent-split", "shared-split"], required=True)
    sp.add_argument("--grid", default="0.02:1:50")
    sp.add_argument("--out")
    energy(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="run the oracle-equivalence suites")
    sp.add_argument("--scope", choices=list(verify.SCOPES) + ["all"], default="all")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except NetworkError as exc:
        print(f"error: {exc.code}", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_USAGE
    except (TomographyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
