"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line."""

import json
import random
import subprocess
import sys
import time

import numpy as np
import pytest

from graphqsm._exact import bareiss_det, matmul
from graphqsm.boundary_measure import (
    PSMeasure,
    conformality_residual,
    conformality_sweep,
    exponent_witness,
    mass_deviation,
)
from graphqsm.classify import build_conjugacy, survey
from graphqsm.cli import main
from graphqsm.covering_tree import CoveringTree, enumerate_words, invert_word
from graphqsm.ktheory import k0_boundary_algebra, smith_normal_form
from graphqsm.multigraph import complete_graph, dumbbell_graph, enumerate_multigraphs, rose, theta_graph
from graphqsm.nonbacktracking import zeta_via_edge_operator, zeta_via_vertex_formula
from graphqsm.qsm import CrossedProduct, kms_residual, kms_witness_pair

from conftest import DATA, record_acceptance
from helpers import extend_ray, random_vertex, random_word

CORPUS = {
    "theta": theta_graph(),
    "dumbbell": dumbbell_graph(),
    "k4": complete_graph(4),
    "rose2": rose(2),
    "rose3": rose(3),
}


def test_criterion_1_k0_closed_form():
    start = time.perf_counter()
    bad = []
    for g in range(2, 11):
        group, unit = k0_boundary_algebra(g)
        torsion = (g - 1,) if g > 2 else ()
        if group.free_rank != g or group.torsion != torsion or unit != g - 1:
            bad.append(g)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 1.0
    record_acceptance(1, ok, f"K0 = Z^g + Z/(g-1), unit order g-1 for g=2..10; "
                             f"mismatches {bad}, {elapsed:.3f}s (< 1s)")
    assert ok


def _unimodular(rng, n):
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i != j:
            c = rng.randint(-2, 2)
            for k in range(n):
                u[i][k] += c * u[j][k]
    if rng.random() < 0.5:
        u[0] = [-x for x in u[0]]
    return u


def test_criterion_2_snf_soundness():
    rng = random.Random(2024)
    failures = 0
    for _ in range(500):
        r, c = rng.randint(1, 8), rng.randint(1, 8)
        m = [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)]
        d, u, v = smith_normal_form(m)
        diag = [d[i][i] for i in range(min(r, c))]
        ok = matmul(matmul(u, m), v) == d
        ok &= all(d[i][j] == 0 for i in range(r) for j in range(c) if i != j)
        ok &= abs(bareiss_det(u)) == 1 and abs(bareiss_det(v)) == 1
        ok &= all((b == 0) if a == 0 else (b % a == 0) for a, b in zip(diag, diag[1:]))
        p, q = _unimodular(rng, r), _unimodular(rng, c)
        d2, _, _ = smith_normal_form(matmul(matmul(p, m), q))
        ok &= d2 == d
        failures += not ok
    record_acceptance(2, failures == 0, f"500 seeded matrices: UMV = D, divisibility, "
                                        f"unimodular invariance; {failures} failures")
    assert failures == 0


def test_criterion_3_zeta_cross_check():
    start = time.perf_counter()
    graphs = enumerate_multigraphs(4, 8) + [theta_graph(), dumbbell_graph(), complete_graph(4),
                                           rose(2), rose(3), rose(4)]
    bad = sum(zeta_via_edge_operator(g) != zeta_via_vertex_formula(g) for g in graphs)
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 10.0
    record_acceptance(3, ok, f"{len(graphs)} graphs, {bad} zeta mismatches, {elapsed:.2f}s (< 10s)")
    assert ok


def test_criterion_4_conformality():
    worst_conf, worst_mass, checked = 0.0, 0.0, 0
    for g in CORPUS.values():
        m = PSMeasure(CoveringTree(g))
        sweep = conformality_sweep(m, enumerate_words(m.tree.rank, 4, min_length=1), 6)
        worst_conf = max(worst_conf, sweep.max_residual)
        checked += sweep.n_checked
        worst_mass = max(worst_mass, max(mass_deviation(m, k) for k in range(1, 9)))
    ok = worst_conf <= 1e-10 and worst_mass <= 1e-12
    record_acceptance(4, ok, f"max conformality residual {worst_conf:.2e} (<= 1e-10) over {checked} "
                             f"pairs; max mass deviation {worst_mass:.2e} (<= 1e-12)")
    assert ok


def test_criterion_5_kms():
    worst_at_delta, weakest_off = 0.0, float("inf")
    for g in CORPUS.values():
        tree = CoveringTree(g)
        alg = CrossedProduct(tree)
        m = PSMeasure(tree, perron=alg.perron)
        rng = np.random.default_rng(0)
        for _ in range(100):
            a, b = alg.random_element(rng), alg.random_element(rng)
            worst_at_delta = max(worst_at_delta, kms_residual(a, b, alg.delta, m))
        wa, wb = kms_witness_pair(alg)
        for off in (-0.5, -0.1, 0.1, 0.5):
            weakest_off = min(weakest_off, kms_residual(wa, wb, alg.delta + off, m))
    ok = worst_at_delta <= 1e-9 and weakest_off > 1e-3
    record_acceptance(5, ok, f"max KMS residual at delta {worst_at_delta:.2e} (<= 1e-9); "
                             f"min witness residual off delta {weakest_off:.3e} (> 1e-3)")
    assert ok


def test_criterion_6_busemann():
    problems = []
    for name, g in CORPUS.items():
        tree = CoveringTree(g)
        rng = random.Random(6)
        for _ in range(1000):
            x1, x2, x3 = (random_vertex(tree, rng, 5) for _ in range(3))
            c = extend_ray(tree, (), 6, rng)
            b12, b23, b13 = tree.busemann(x1, x2, c), tree.busemann(x2, x3, c), tree.busemann(x1, x3, c)
            if b13 != b12 + b23 or abs(b12) > tree.distance(x1, x2):
                problems.append((name, "cocycle"))
        for _ in range(50):
            w = random_word(tree.rank, rng, 6, min_len=1)
            am = tree.translation_length(w)[0]
            x = tree.deck_apply(invert_word(w), ())
            c = tree.axis_ray(w, len(x) + 2 * len(tree.realize(w)) + 2)
            if tree.busemann((), x, c) not in (am, -am):
                problems.append((name, "axis", w))
        for w in enumerate_words(tree.rank, 5, min_length=1):
            if tree.min_displacement(w) != tree.translation_length(w)[0]:
                problems.append((name, "displacement", w))
        for w in enumerate_words(tree.rank, 6, min_length=1):
            if tree.translation_length(w)[0] < 1:
                problems.append((name, "principality", w))
    ok = not problems
    record_acceptance(6, ok, f"cocycle/bound on 1000 triples, axis on 50 words, brute-force "
                             f"displacement for |w| <= 5, principality for |w| <= 6 per graph; "
                             f"{len(problems)} violations")
    assert ok


def test_criterion_7_theorem1_vs_theorem2(capsys):
    code = main(["compare", str(DATA / "theta.json"), str(DATA / "dumbbell.json"),
                 "--conjugacy", "--depth", "6"])
    rep = json.loads(capsys.readouterr().out)
    diff = rep["fingerprint_diff"]
    ok = (code == 0 and rep["theorem1"]["verdict"] and diff["k0_equal"] and diff["gcd_equal"]
          and not rep["isomorphic"] and not diff["zeta_equal"])
    _, conj = build_conjugacy(theta_graph(), dumbbell_graph(), max_depth=6)
    ok = ok and conj["ok"] and rep["conjugacy"]["ok"]
    record_acceptance(7, ok, f"theta vs dumbbell: theorem1={rep['theorem1']['verdict']}, "
                             f"K0 equal={diff['k0_equal']}, gcd equal={diff['gcd_equal']}, "
                             f"isomorphic={rep['isomorphic']}, zeta equal={diff['zeta_equal']}; "
                             f"conjugacy {conj['checked']} checks, {conj['violations']} violations")
    assert ok


def test_criterion_8_survey():
    start = time.perf_counter()
    rep = survey(3, 6, 5)
    elapsed = time.perf_counter() - start
    s = rep["summary"]
    by_betti = s["theorem1_classes_by_betti"] and s["n_theorem1_classes"] == s["n_distinct_betti"]
    unseparated = [r for r in rep["pairs"] if r["theorem1"] and not r["isomorphic"]
                   and r["zeta_equal"] and r["spectrum_equal"]]
    ok = by_betti and not unseparated and not rep["collisions"] and elapsed < 60
    record_acceptance(8, ok, f"{s['n_graphs']} graphs, {s['n_pairs']} pairs, "
                             f"{s['n_theorem1_classes']} boundary-algebra classes = Betti classes: {by_betti}; "
                             f"{len(unseparated)} unseparated pairs; {elapsed:.2f}s (< 60s)")
    assert ok


DETERMINISM_COMMANDS = [
    ["invariants", "theta.json"],
    ["zeta", "k4.json"],
    ["compare", "theta.json", "dumbbell.json", "--conjugacy"],
    ["verify-conformal", "dumbbell.json", "--depth", "5"],
    ["verify-kms", "rose2.json", "--seed", "3"],
    ["verify-kms", "theta.json", "--beta", "1.2", "--trials", "10"],
    ["survey", "--max-v", "2", "--max-e", "4"],
]


def test_criterion_9_determinism():
    differing = []
    for cmd in DETERMINISM_COMMANDS:
        outs = [
            subprocess.run([sys.executable, "-m", "graphqsm", *cmd], cwd=DATA,
                           capture_output=True).stdout
            for _ in range(2)
        ]
        if outs[0] != outs[1] or not outs[0]:
            differing.append(cmd[0])
    ok = not differing
    record_acceptance(9, ok, f"{len(DETERMINISM_COMMANDS)} commands run twice, byte-identical; "
                             f"differing: {differing}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
