from __future__ import annotations

import numpy as np
import pytest

import generators as gen
from assortbounds.models import LCMNL, MNL, RCS, Instance
from assortbounds.sampling import gumbel, sample_B, sample_choice, sample_choices, sample_utilities

N = 10 ** 6


def test_gumbel_is_mean_zero():
    x = gumbel(np.random.default_rng(0), N)
    assert abs(x.mean()) < 4 * np.pi / np.sqrt(6 * N)
    assert x.var() == pytest.approx(np.pi ** 2 / 6, rel=0.01)


def test_mnl_choice_frequencies():
    inst = Instance([1.0, 1.0], MNL([1.0, 1.0]))
    freq = np.bincount(sample_choices(inst, {1, 2}, N, seed=1), minlength=3) / N
    np.testing.assert_allclose(freq, 1 / 3, atol=0.002)


def test_empty_offer_means_no_purchase():
    inst = Instance([1.0, 1.0], MNL([1.0, 1.0]))
    assert np.all(sample_choices(inst, (), 100, seed=0) == 0)
    assert sample_choice(inst, (), seed=3) == 0


def test_rcs_first_preference_frequency():
    inst = Instance([1.0, 1.0], RCS([0.3, 0.7], [1, 2]))
    freq = np.mean(sample_choices(inst, {1, 2}, N, seed=2) == 1)
    assert freq == pytest.approx(0.3, abs=4 * np.sqrt(0.21 / N))


def test_mnl_B_marginals():
    inst = Instance([1.0, 1.0], MNL([1.0, 1.0]))
    B = sample_B(inst, seed=4, size=N)
    np.testing.assert_allclose(B.mean(axis=0), 0.5, atol=0.002)
    assert sample_B(inst, seed=4).shape == (2,)


def test_rcs_B_independent():
    inst = Instance([1.0, 1.0], RCS([0.4, 0.6], [2, 1]))
    B = sample_B(inst, seed=5, size=N).astype(float)
    assert abs(np.corrcoef(B.T)[0, 1]) < 5 / np.sqrt(N)


def test_single_segment_lcmnl_matches_mnl():
    v = np.array([0.5, 2.0])
    a = sample_B(Instance([1.0, 1.0], MNL(v)), seed=6, size=N).mean(axis=0)
    b = sample_B(Instance([1.0, 1.0], LCMNL([1.0], v[:, None])), seed=7, size=N).mean(axis=0)
    np.testing.assert_allclose(a, v / (1 + v), atol=0.003)
    np.testing.assert_allclose(b, v / (1 + v), atol=0.003)


def test_seeded_samplers_are_reproducible():
    inst = gen.lcmnl(np.random.default_rng(0), 5, 3)
    np.testing.assert_array_equal(sample_utilities(inst, 50, 9), sample_utilities(inst, 50, 9))
    np.testing.assert_array_equal(sample_choices(inst, {1, 3}, 50, 9), sample_choices(inst, {1, 3}, 50, 9))


def test_lcmnl_choices_match_probabilities():
    from assortbounds.choice import choice_probs, to_mask
    inst = gen.lcmnl(np.random.default_rng(1), 4, 2)
    S = (1, 2, 4)
    freq = np.bincount(sample_choices(inst, S, N, seed=3), minlength=5) / N
    exact = choice_probs(inst.model, to_mask(S, 4))[0]
    np.testing.assert_allclose(freq, exact, atol=0.003)
