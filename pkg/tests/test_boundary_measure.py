import random

import numpy as np
import pytest

from graphqsm.boundary_measure import (
    PSMeasure,
    basepoint_rn_check,
    conformality_residual,
    conformality_sweep,
    exponent_witness,
    mass_deviation,
    ps_cylinder_measure,
)
from graphqsm.covering_tree import CoveringTree, enumerate_words
from graphqsm.errors import InsufficientDepthError
from graphqsm.multigraph import complete_graph, rose

from helpers import random_vertex


@pytest.fixture(scope="module")
def measures(corpus):
    return {name: PSMeasure(CoveringTree(g)) for name, g in corpus.items()}


def test_k4_closed_form():
    m = PSMeasure(CoveringTree(complete_graph(4)))
    for c in m.tree.partition(1):
        assert m(c) == pytest.approx(1 / 3, abs=1e-15)
    for c in m.tree.partition(2):
        assert ps_cylinder_measure(m, c) == pytest.approx(1 / 6, abs=1e-15)


def test_depth_zero_rejected(measures):
    with pytest.raises(InsufficientDepthError):
        measures["theta"](())


def test_masses_sum_to_one_and_positive(measures):
    for m in measures.values():
        for k in range(1, 9):
            assert mass_deviation(m, k) <= 1e-12
            assert np.all(m.masses(k) > 0)


def test_additivity(measures):
    for m in measures.values():
        for c in m.tree.partition(4):
            kids = sum(m(c + (e,)) for e in m.tree.children(c))
            assert kids == pytest.approx(m(c), rel=1e-14)


def brute_force_mass(tree, start, depth):
    """Uniform-branching oracle on regular trees: count leaves under the cylinder."""
    return tree.count_extensions(start, depth) / len(tree.partition(depth))


def test_regular_tree_measure_is_counting_measure():
    for g in (complete_graph(4), rose(2), rose(3)):
        m = PSMeasure(CoveringTree(g))
        for c in m.tree.partition(3):
            assert m(c) == pytest.approx(brute_force_mass(m.tree, c, 6), abs=1e-15)


def test_identity_word_residual_zero(measures):
    m = measures["dumbbell"]
    assert conformality_residual(m, (), m.tree.partition(2)[0]) == 0.0


def test_rose_closed_form_case():
    m = PSMeasure(CoveringTree(rose(2)))
    assert conformality_residual(m, (1,), (2,)) <= 1e-12


def test_conformality_sweep_matches_scalar_path(measures):
    m = measures["dumbbell"]
    words = enumerate_words(m.tree.rank, 2, min_length=1)
    sweep = conformality_sweep(m, words, 3)
    scalar = max(conformality_residual(m, w, c) for w in words for k in range(1, 4)
                 for c in m.tree.partition(k))
    assert sweep.max_residual == pytest.approx(scalar, abs=1e-15)
    assert sweep.n_checked == len(words) * sum(len(m.tree.partition(k)) for k in range(1, 4))


def test_conformality_on_corpus(measures):
    for m in measures.values():
        words = enumerate_words(m.tree.rank, 3, min_length=1)
        assert conformality_sweep(m, words, 5).max_residual <= 1e-10


def test_perturbed_exponent_breaks_conformality(measures):
    for m in measures.values():
        word, c = exponent_witness(m)
        assert conformality_residual(m, word, c) <= 1e-12
        bumped = np.log(m.lam + 0.3)
        assert conformality_residual(m, word, c, beta=bumped) > 1e-3
        for off in (-0.5, -0.1, 0.1, 0.5):
            assert conformality_residual(m, word, c, beta=m.delta + off) > 1e-3


def test_basepoint_identity(measures):
    assert basepoint_rn_check(measures["theta"], (), 4) == 0.0


def test_basepoint_k4_adjacent():
    tree = CoveringTree(complete_graph(4))
    assert basepoint_rn_check(tree, (0,), 4) <= 1e-10


def test_basepoint_random(measures):
    rng = random.Random(8)
    for m in measures.values():
        for _ in range(5):
            x = random_vertex(m.tree, rng, 3)
            assert basepoint_rn_check(m, x, 5) <= 1e-12
            assert mass_deviation(m.rebased(x), 5) <= 1e-12
