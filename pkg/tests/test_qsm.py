import json

import numpy as np
import pytest

from graphqsm.boundary_measure import PSMeasure
from graphqsm.covering_tree import CoveringTree, invert_word
from graphqsm.errors import DepthOverflowError
from graphqsm.multigraph import dumbbell_graph, rose, theta_graph
from graphqsm.qsm import (
    CPElement,
    CrossedProduct,
    TimeParameter,
    cp_multiply,
    kms_residual,
    kms_state,
    kms_witness_pair,
    time_evolve,
)

from helpers import extend_ray


@pytest.fixture(scope="module", params=["theta", "dumbbell", "rose2"])
def setup(request, corpus):
    tree = CoveringTree(corpus[request.param])
    alg = CrossedProduct(tree)
    return alg, PSMeasure(tree, perron=alg.perron)


def rng():
    return np.random.default_rng(11)


def test_unit_is_neutral(setup):
    alg, _ = setup
    r = rng()
    for _ in range(10):
        a = alg.random_element(r)
        assert (alg.unit() * a).distance(a) == 0
        assert (a * alg.unit()).distance(a) == 0


def test_group_elements_invert(setup):
    alg, _ = setup
    for g in range(1, alg.tree.rank + 1):
        prod = alg.group_element((g, 1 if g != 1 else 2)) * alg.group_element(invert_word((g, 1 if g != 1 else 2)))
        assert prod.distance(alg.unit()) == 0
        assert prod.support == ((),)


def test_rose_pullback_example():
    alg = CrossedProduct(CoveringTree(rose(2)))
    lhs = alg.group_element((1,)) * alg.indicator((2,), (2,))
    rhs = alg.indicator((0, 2), (1, 2))
    assert lhs.distance(rhs) == 0
    assert lhs.support == ((1, 2),)


def test_associativity(setup):
    alg, _ = setup
    r = rng()
    for _ in range(20):
        a, b, c = (alg.random_element(r, max_word_length=1) for _ in range(3))
        assert ((a * b) * c).distance(a * (b * c)) <= 1e-12


def pullback_oracle(alg, f_values, depth, word, out_depth):
    """(f o word^-1) on depth-out_depth cylinders by moving a sample ray."""
    idx = alg.index(depth)
    out = []
    inv = invert_word(word)
    for c in alg.partition(out_depth):
        ray = extend_ray(alg.tree, c, out_depth + 3 * depth + 12)
        moved = alg.tree.deck_apply(inv, ray)
        out.append(f_values[idx[moved[:depth]]])
    return np.array(out)


def test_covariance(setup):
    alg, _ = setup
    r = rng()
    for _ in range(10):
        gamma = alg.random_word(r, 2)
        f = alg.random_element(r, max_word_length=0)
        lhs = alg.group_element(gamma) * f * alg.group_element(invert_word(gamma))
        assert lhs.support in ((), ((),))
        expected = pullback_oracle(alg, f.terms[()], f.depth, gamma, lhs.depth)
        assert np.max(np.abs(lhs.coefficient(()) - expected)) == 0


def test_time_evolution_group_and_homomorphism(setup):
    alg, _ = setup
    r = rng()
    for _ in range(20):
        a, b = alg.random_element(r), alg.random_element(r)
        s, t = 0.37, -1.3
        assert time_evolve(time_evolve(a, s), t).distance(time_evolve(a, s + t)) <= 1e-12
        lhs = time_evolve(a * b, t)
        assert lhs.distance(time_evolve(a, t) * time_evolve(b, t)) <= 1e-10
        im = TimeParameter(0.0, 0.8)
        assert time_evolve(a * b, im).distance(time_evolve(a, im) * time_evolve(b, im)) <= 1e-10


def test_identity_terms_invariant(setup):
    alg, _ = setup
    f = alg.random_element(rng(), max_word_length=0)
    assert time_evolve(f, 2.5).distance(f) == 0


def test_kms_state_examples(setup):
    alg, m = setup
    assert kms_state(alg.unit(), m) == pytest.approx(1.0, abs=1e-14)
    assert kms_state(alg.group_element((1,)), m) == 0
    c = alg.partition(3)[4]
    assert kms_state(alg.indicator(c), m) == pytest.approx(m(c), abs=1e-15)


def test_kms_commutative_case(setup):
    alg, m = setup
    r = rng()
    a = alg.random_element(r, max_word_length=0)
    b = alg.random_element(r, max_word_length=0)
    for beta in (0.0, 0.3, 2.0):
        assert kms_residual(a, b, beta, m) <= 1e-15


def test_kms_at_critical_exponent(setup):
    alg, m = setup
    r = rng()
    for _ in range(40):
        a, b = alg.random_element(r), alg.random_element(r)
        assert kms_residual(a, b, alg.delta, m) <= 1e-9


def test_kms_fails_off_critical(setup):
    alg, m = setup
    a, b = kms_witness_pair(alg)
    for off in (-0.5, -0.1, 0.1, 0.5):
        res = kms_residual(a, b, alg.delta + off, m)
        # closed form: |1 - integral lam^((1 - beta/delta) c) dmu|
        c = alg.cocycle((1,), a.depth + 2).astype(float)
        closed = abs(1 - np.dot(m.masses(a.depth + 2), alg.lam ** ((1 - (alg.delta + off) / alg.delta) * c)))
        assert res == pytest.approx(closed, rel=1e-9)
        assert res > 1e-3


def test_dagger_closure(setup):
    alg, _ = setup
    r = rng()
    a = alg.random_element(r, dagger=True)
    b = alg.random_element(r, dagger=True)
    assert a.dagger and (a * b).dagger
    assert all(x > 0 for w in (a * b).support for x in w)
    with pytest.raises(ValueError):
        alg.element({(-1,): 1.0}, dagger=True)


def test_overflow_is_an_error():
    alg = CrossedProduct(CoveringTree(theta_graph()), max_word_length=2)
    a = alg.group_element((1, 2))
    with pytest.raises(DepthOverflowError):
        a * a
    alg = CrossedProduct(CoveringTree(dumbbell_graph()), max_depth=3)
    with pytest.raises(DepthOverflowError):
        alg.group_element((1, 2))


def test_invariants_enforced(setup):
    alg, _ = setup
    with pytest.raises(ValueError):
        CPElement(alg, 2, {(1, -1): np.zeros(alg.size(2))})
    with pytest.raises(ValueError):
        CPElement(alg, 2, {(): np.zeros(3 + alg.size(2))})
    with pytest.raises(DepthOverflowError):
        alg.element({(1, 2): 1.0}, depth=1)


def test_json_roundtrip(setup):
    alg, _ = setup
    a = alg.random_element(rng())
    data = json.loads(json.dumps(a.to_json()))
    assert alg.from_json(data).distance(a) == 0


def test_coarsen_and_refine(setup):
    alg, _ = setup
    a = alg.random_element(rng())
    fine = a.refine(a.depth + 2)
    assert fine.distance(a) == 0
    assert fine.coarsen().depth == a.depth
