from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import lambertw

from assortbounds.pricing import clairvoyant_pricing_mc, mnl_pricing, unbounded_example


def _oracle_markup(V):
    # x e^{1+x} = V  <=>  x = W(V / e)
    return float(lambertw(V / math.e).real)


def test_known_root():
    res = mnl_pricing(2 * math.e ** 3)
    assert res.p_star == pytest.approx(3.0, abs=1e-9)
    assert res.r_star == pytest.approx(2.0, abs=1e-9)
    assert res.ratio == pytest.approx(math.log1p(2 * math.e ** 3) / 2, rel=1e-12)


def test_small_V_near_e():
    res = mnl_pricing(0.01)
    assert res.ratio == pytest.approx(math.log1p(0.01) / _oracle_markup(0.01), rel=1e-12)
    assert 2.70 <= res.ratio <= 2.7183


def test_ratio_decreasing():
    assert mnl_pricing(0.01).ratio > mnl_pricing(1.0).ratio > mnl_pricing(100.0).ratio


@given(st.floats(1e-6, 1e6))
def test_invariants(V):
    res = mnl_pricing(V)
    assert res.p_star >= 1.0
    assert 1.0 < res.ratio <= math.e + 1e-9
    assert res.r_clairvoyant >= res.r_star
    assert abs(res.r_star * math.exp(res.p_star) - V) <= 1e-9 * max(1.0, V)
    assert res.r_star == pytest.approx(_oracle_markup(V), rel=1e-12)


def test_ratio_scan():
    ratios = [mnl_pricing(V).ratio for V in np.logspace(-6, 6, 241)]
    assert max(ratios) <= math.e + 1e-9
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


@pytest.mark.parametrize("V", [0.0, -1.0, float("inf")])
def test_rejects_bad_V(V):
    with pytest.raises(ValueError):
        mnl_pricing(V)


def test_unbounded_example_values():
    assert unbounded_example(math.e - 1) == pytest.approx((2.0, 1.0, 2.0))
    assert unbounded_example(math.e ** 9 - 1)[2] == pytest.approx(10.0)
    with pytest.raises(ValueError):
        unbounded_example(0.0)


@given(st.floats(1e-3, 1e6), st.floats(1.01, 10.0))
def test_unbounded_example_increasing(a, factor):
    assert unbounded_example(a * factor)[2] > unbounded_example(a)[2]


@pytest.mark.parametrize("V", [0.1, 1.0, 20.0])
def test_mc_matches_log1p(V):
    mean, se = clairvoyant_pricing_mc(V, 10 ** 6, seed=int(V * 10))
    assert abs(mean - math.log1p(V)) <= 3 * se
