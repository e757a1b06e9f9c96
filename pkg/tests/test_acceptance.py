"""Acceptance criteria 1-11, one test each, at the stated sample sizes and tolerances.

Every test records a PASS/FAIL line; the lines are printed together at the end
of the pytest run (see conftest.py). Run on its own with
``python3 -m pytest tests/test_acceptance.py -v``.
"""

import time

import numpy as np
import pytest

from bnlab import caselab, cli, strata
from bnlab import theta as th
from bnlab.curves import Place
from bnlab.models import bpf_pool

LINES = []

CRITERION1_CURVES = ["quartic_g3", "quintic_g4", "sextic_g6"]


def record(number, title, passed, detail, elapsed, budget):
    ok = bool(passed) and elapsed <= budget
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail} [{elapsed:.1f}s / {budget}s]"
    LINES.append(line)
    print(line)
    return ok


def identity_samples(C, n, rng):
    """n extension classes, alternating uniform and structured functionals."""
    done = fails = 0
    t = 0
    while done < n:
        D = strata.random_effective(C, int(rng.integers(0, C.genus)), rng)
        X = strata.extension_space(C, D)
        t += 1
        if X.dim == 0:
            continue
        if t % 2:
            e = strata.random_functional(C, X.dim, rng)
        else:
            structured = strata.structured_functionals(C, D, rng)
            e = structured[int(rng.integers(0, len(structured)))][1]
        fails += not strata.h0_ext(C, D, e).identities_hold
        done += 1
    return done, fails


def test_criterion_01_rank_formula(standard):
    details, ok, slowest = [], True, 0.0
    for name in CRITERION1_CURVES:
        C = standard(name)
        t0 = time.perf_counter()
        done, fails = identity_samples(C, 500, np.random.default_rng(101))
        slowest = max(slowest, time.perf_counter() - t0)
        details.append(f"{name} {done} classes, {fails} failures")
        ok &= fails == 0 and done == 500
    assert record(1, "rank-formula identities", ok, "; ".join(details), slowest, 120)


def test_criterion_02_clifford_bound(standard):
    t0 = time.perf_counter()
    out = []
    ok = True
    for name, cliff, attained in (("quartic_g3", 1, 3), ("sextic_g6", 2, 5)):
        C = standard(name)
        r = strata.clifford_scan(C, cliff, 500, np.random.default_rng(202), special=cli.special_divisors(C))
        ok &= r["exceeded"] == 0 and r["max_h0_E"] == attained == r["bound"] and r["samples"] >= 1000
        out.append(f"{name} {r['samples']} samples, max h0(E) {r['max_h0_E']} (bound {r['bound']}), {r['exceeded']} over")
    assert record(2, "Clifford bound", ok, "; ".join(out), time.perf_counter() - t0, 180)


def test_criterion_03_example_strata(standard):
    t0 = time.perf_counter()
    out, ok = [], True
    rng = np.random.default_rng(303)
    for name in ("quartic_g3", "quintic_g4", "sextic_g5", "sextic_g6"):
        C = standard(name)
        g = C.genus
        while True:
            D = strata.random_effective(C, g - 2, rng)
            if C.h0(D) == 1:
                break
        om = strata.omega0(C, D)
        P = next(Place(p) for p in C.rational_points if Place(p) not in D.support())
        idx = strata.stratum_index(C, D, strata.eval_class(C, D, P))
        ok &= len(om) == g - 2 and idx == 1
        out.append(f"g={g} omega0 dim {len(om)}, eval index {idx}")
    assert record(3, "degree g-2 strata", ok, "; ".join(out), time.perf_counter() - t0, 60)


def test_criterion_04_mukai(standard):
    out, ok, slowest = [], True, 0.0
    for name in CRITERION1_CURVES:
        C = standard(name)
        t0 = time.perf_counter()
        r = strata.mukai_scan(C, 500, np.random.default_rng(404), bpf_pool(C))
        slowest = max(slowest, time.perf_counter() - t0)
        ok &= not r["failures"] and r["samples"] >= 500
        out.append(f"{name} {r['samples']} instances, {len(r['failures'])} failures")
    assert record(4, "twist inequality", ok, "; ".join(out), slowest, 180)


def test_criterion_05_genus4(standard):
    t0 = time.perf_counter()
    rng = np.random.default_rng(505)
    M = caselab.canonical_model(standard("quintic_g4"))
    data = caselab.genus4_system(M)
    T = caselab.cubic_threefold(data, rng)
    node = caselab.node_check(T["T"], data, M, rng)
    al = caselab.alpha_checks(data, M, rng)
    ok = (data.dim_quadrics == 1 and data.dim_cubics == 5 and T["nullspace_dim"] == 1
          and T["T"].degree() == 3 and node["gradient_zero"] and node["cone_proportional_to_Q"]
          and al["vanish_on_curve"] and al["q2_difference"])
    detail = (f"quadrics {data.dim_quadrics}, cubics {data.dim_cubics}, T nullspace {T['nullspace_dim']}, "
              f"grad T(t0)=0 {node['gradient_zero']}, cone ~ Q {node['cone_proportional_to_Q']}, "
              f"alpha on C {al['vanish_on_curve']}, q^2 identity {al['q2_difference']}")
    assert record(5, "genus 4", ok, detail, time.perf_counter() - t0, 120)


def test_criterion_06_genus5(standard):
    t0 = time.perf_counter()
    M = caselab.canonical_model(standard("sextic_g5"))
    _, net = caselab.genus5_net(M)
    r = caselab.discriminant_quintic(net, np.random.default_rng(606), n_roots=25)
    ok = r["degree"] == 5 and r["homogeneous"] and len(r["zeros"]) == 25 and max(r["ranks"]) <= 4
    detail = f"degree {r['degree']}, {len(r['zeros'])} zeros, ranks {sorted(set(r['ranks']))}"
    assert record(6, "genus 5 discriminant", ok, detail, time.perf_counter() - t0, 60)


def test_criterion_07_genus6(standard):
    t0 = time.perf_counter()
    cfg = caselab.tetragonal_config(standard("sextic_g6"))
    tri = caselab.trigonal_omega(standard("trigonal_g6"))
    pq = caselab.plane_quintic_omega(standard("quintic_g6"))
    ok = (cfg.h0 == [2] * 5 and all(cfg.relation) and cfg.omega0_dims == [1] * 5
          and tri["omega0_dim"] == 2 and pq["omega0_dim"] == 1 and pq["generator_prop_eval_p"])
    detail = (f"pencils h0 {cfg.h0}, relations {cfg.relation}, omega0 {cfg.omega0_dims}, "
              f"trigonal omega0 {tri['omega0_dim']}, plane quintic generator ~ eval_p {pq['generator_prop_eval_p']}")
    assert record(7, "genus 6", ok, detail, time.perf_counter() - t0, 120)


def test_criterion_08_fay():
    t0 = time.perf_counter()
    data = th.hyperelliptic_periods(cli.DEFAULT_BRANCH)
    rng = np.random.default_rng(808)
    quads = [th.random_points(data, 4, rng) for _ in range(20)]
    fay = quad = 0.0
    sigma2 = 1.0
    for pts in quads:
        for idx in range(4**data.g):
            fay = max(fay, th.fay_residual(data, pts, idx)["residual"])
            q = th.quadrisecant_residual(data, pts, idx)
            quad = max(quad, q["residual"])
            sigma2 = min(sigma2, q["sigma2"])
    neg = th.negative_control(data, quads)["median"]
    ok = fay <= 1e-7 and quad <= 1e-7 and sigma2 >= 1e-3 and neg >= 1e-3
    detail = (f"20 quadruples x 64 half-periods: max s3/s1 {fay:.1e}, quadrisecant {quad:.1e}, "
              f"min s2/s1 {sigma2:.2f}, perturbed median {neg:.1e}")
    assert record(8, "Fay trisecant", ok, detail, time.perf_counter() - t0, 120)


def test_criterion_09_gamma00():
    t0 = time.perf_counter()
    r3 = th.gamma00_rank(th.hyperelliptic_periods(cli.DEFAULT_BRANCH).rm, threshold=1e-8)
    g4 = th.hyperelliptic_periods([-5.0, -4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0, 5.0])
    r4 = th.gamma00_rank(g4.rm, threshold=1e-8, precision=30)
    ok = r3["rank"] == 7 and r4["rank"] == 11
    detail = f"g=3 rank {r3['rank']} (7x8), g=4 rank {r4['rank']} (11x16, 30 digits)"
    assert record(9, "Gamma00 conditions", ok, detail, time.perf_counter() - t0, 120)


def test_criterion_10_coble():
    t0 = time.perf_counter()
    data = th.hyperelliptic_periods(cli.DEFAULT_BRANCH)
    r = th.coble_solve(data.rm, np.random.default_rng(1010))
    ok = r["nullspace_dim"] >= 1 and r["max_value_residual"] <= 1e-6 and r["max_gradient_residual"] <= 1e-6
    detail = (f"nullspace dim {r['nullspace_dim']} of {r['n_unknowns']}, value residual "
              f"{r['max_value_residual']:.1e}, gradient residual {r['max_gradient_residual']:.1e}")
    assert record(10, "Coble quartic", ok, detail, time.perf_counter() - t0, 180)


JOBS = [
    ["strata-sample", "--curve", "quintic_g4", "--seed", "7", "--trials", "40"],
    ["clifford-scan", "--curve", "quartic_g3", "--cliff", "1", "--seed", "7", "--trials", "40"],
    ["mukai-scan", "--curve", "quartic_g3", "--seed", "7", "--trials", "20"],
    ["caselab-g4", "--seed", "7"],
    ["caselab-g5", "--seed", "7"],
    ["fay", "--seed", "7", "--trials", "4"],
    ["coble", "--seed", "7"],
    ["gamma00"],
]


def test_criterion_11_determinism(tmp_path):
    t0 = time.perf_counter()
    same = []
    for k, argv in enumerate(JOBS):
        a, b = tmp_path / f"{k}a.json", tmp_path / f"{k}b.json"
        cli.main([*argv, "--out", str(a)])
        cli.main([*argv, "--out", str(b)])
        same.append(a.exists() and a.read_bytes() == b.read_bytes())
    detail = f"{sum(same)}/{len(JOBS)} jobs byte-identical on rerun"
    assert record(11, "determinism", all(same), detail, time.perf_counter() - t0, 600)
