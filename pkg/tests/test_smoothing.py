import numpy as np
import pytest

from flipsmooth.generators import gen_grid
from flipsmooth.graph_core import from_edge_list
from flipsmooth.smoothing import (INITIAL_CUT, PIVOT, WEIGHTS, Kind, SmoothedModel, derive_seed,
                                  good_pair_epsilon, make_rng, sample_weights, union_bound)


@pytest.fixture(scope="module")
def grid():
    return gen_grid(40, 40)


def test_uniform_support_and_mean():
    w = SmoothedModel.uniform().draw(make_rng(7), 10**6)
    assert w.min() >= -1 and w.max() <= 1
    assert abs(w.mean()) < 0.01


def test_adversarial_support(grid):
    model = SmoothedModel.adversarial(2.0, [0.5] * grid.m)
    w = sample_weights(model, grid, 3)
    assert min(w.weights) >= 0.5 and max(w.weights) <= 1.0


def test_deterministic(grid):
    model = SmoothedModel.uniform()
    assert sample_weights(model, grid, 11) == sample_weights(model, grid, 11)
    assert sample_weights(model, grid, 11) != sample_weights(model, grid, 12)


def test_model_validation():
    with pytest.raises(ValueError):
        SmoothedModel(0.5, Kind.ADVERSARIAL_PLUS_NOISE, (0.0,))
    with pytest.raises(ValueError):
        SmoothedModel.adversarial(2.0, [0.6])  # 0.6 + 0.5 > 1
    with pytest.raises(ValueError):
        SmoothedModel.adversarial(2.0, [-1.1])
    with pytest.raises(ValueError):
        SmoothedModel(1.0, Kind.UNIFORM)
    g = from_edge_list(3, [(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        sample_weights(SmoothedModel.adversarial(2.0, [0.0]), g, 0)


def test_model_serialization():
    m = SmoothedModel.adversarial(4.0, [0.1, -0.2])
    doc = m.to_dict(seed=5)
    assert doc == {"phi": 4.0, "kind": "AdversarialPlusNoise", "base": [0.1, -0.2], "seed": 5}
    assert SmoothedModel.from_dict(doc) == m
    assert SmoothedModel.from_dict(SmoothedModel.uniform().to_dict()) == SmoothedModel.uniform()


def test_derived_streams_distinct():
    seeds = {derive_seed(1, t, s) for t in range(50) for s in (WEIGHTS, INITIAL_CUT, PIVOT)}
    assert len(seeds) == 150
    assert derive_seed(1, 0, 0) == derive_seed(1, 0, 0)
    assert all(0 <= s < 2**64 for s in seeds)


def test_epsilon_examples():
    assert good_pair_epsilon(1, 2, 1, 10, 1) == pytest.approx(1 / 810, rel=1e-12)
    assert good_pair_epsilon(2, 2, 1, 10, 1) == pytest.approx(6.17284e-4, rel=1e-5)
    with pytest.raises(ValueError):
        good_pair_epsilon(1, 2, 0, 10, 1)
    with pytest.raises(ValueError):
        good_pair_epsilon(1, 2, 1, 1, 1)
    assert good_pair_epsilon(1, 2, 10**4, 10, 1) == 0.0


def test_union_bound_examples():
    assert union_bound(0, 0.5, 1) == 0.5
    assert union_bound(4, 1 / 810, 1) == pytest.approx(0.1, rel=1e-12)
    assert union_bound(10, 1, 1) == 1.0
    assert union_bound(10**6, 1e-9, 1) == 1.0
    assert union_bound(4, 0.0, 1) == 0.0


def test_pairwise_independence():
    # 10^5 independent weight samples on a 3-edge graph; correlations near 0
    g = from_edge_list(4, [(0, 1), (1, 2), (2, 3)])
    model = SmoothedModel.uniform()
    rows = np.array([sample_weights(model, g, derive_seed(9, t, WEIGHTS)).weights
                     for t in range(10**5)])
    corr = np.corrcoef(rows.T)
    sigma = 1 / np.sqrt(len(rows))
    for i in range(3):
        for j in range(i + 1, 3):
            assert abs(corr[i, j]) <= 5 * sigma
