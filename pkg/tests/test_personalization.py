from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import generators as gen
from assortbounds.clairvoyant import clairvoyant_exact
from assortbounds.mnl import CardinalityOracle, brute_force_taop, mnl_constrained, mnl_optimal, mnl_revenue, revenue_ordered
from assortbounds.models import LCMNL, MNL, Instance, ModelError
from assortbounds.personalization import cap_brute, clairvoyant_cap_brute, log_ratio_bound, ptaop

seeds = st.integers(0, 2 ** 32 - 1)


def _cap_oracle(inst, k):
    """Direct double enumeration: every T, every S subset of T, per segment."""
    lc = inst.model
    n = inst.n
    best = 0.0
    for size in range(k + 1):
        for T in itertools.combinations(range(1, n + 1), size):
            val = 0.0
            for j, t in enumerate(lc.theta):
                seg = max([mnl_revenue(inst.revenues, lc.v[:, j], S)
                           for s in range(len(T) + 1) for S in itertools.combinations(T, s)])
                val += t * seg
            best = max(best, val)
    return best


def test_ptaop_single_segment():
    inst = gen.mnl(np.random.default_rng(0), 6)
    assert ptaop(inst) == pytest.approx(mnl_optimal(inst.revenues, inst.model.v).tau_star)


@given(seeds, st.integers(1, 8), st.integers(1, 4))
def test_ptaop_sandwich(seed, n, m):
    inst = gen.lcmnl(np.random.default_rng(seed), n, m)
    p = ptaop(inst)
    r_bar = clairvoyant_exact(inst).value
    assert brute_force_taop(inst).revenue <= p + 1e-9
    assert p <= r_bar + 1e-9
    assert r_bar <= 2 * p + 1e-9


def test_ptaop_rejects_other_models():
    with pytest.raises(ModelError):
        ptaop(gen.rcs(np.random.default_rng(0), 3))


@given(seeds, st.integers(1, 6), st.integers(1, 3), st.integers(0, 6))
def test_cap_matches_double_enumeration(seed, n, m, k):
    inst = gen.lcmnl(np.random.default_rng(seed), n, m)
    k = min(k, n)
    res = cap_brute(inst, k)
    assert res.value == pytest.approx(_cap_oracle(inst, k), rel=1e-12, abs=1e-15)
    assert len(res.first_stage) <= k
    for S in res.per_segment:
        assert set(S) <= set(res.first_stage)


@given(seeds, st.integers(1, 8), st.integers(1, 3))
def test_cap_full_universe_is_ptaop(seed, n, m):
    inst = gen.lcmnl(np.random.default_rng(seed), n, m)
    assert cap_brute(inst, n).value == pytest.approx(ptaop(inst), rel=1e-12)


@given(seeds, st.integers(1, 8), st.integers(1, 3))
def test_cap_single_product(seed, n, m):
    inst = gen.lcmnl(np.random.default_rng(seed), n, m)
    lc = inst.model
    expect = max(float(np.sum(lc.theta * inst.revenues[i] * lc.v[i] / (1 + lc.v[i]))) for i in range(n))
    assert cap_brute(inst, 1).value == pytest.approx(expect, rel=1e-12)


@given(seeds, st.integers(1, 9), st.integers(1, 9))
def test_cap_single_segment_is_constrained_mnl(seed, n, k):
    inst = gen.mnl(np.random.default_rng(seed), n)
    k = min(k, n)
    expect = mnl_constrained(inst.revenues, inst.model.v, CardinalityOracle(k)).tau_star
    assert cap_brute(inst, k).value == pytest.approx(expect, rel=1e-9)


@given(seeds, st.integers(1, 8), st.integers(1, 3), st.integers(1, 8))
def test_cap_factor_two(seed, n, m, k):
    inst = gen.lcmnl(np.random.default_rng(seed), n, m)
    k = min(k, n)
    cap = cap_brute(inst, k).value
    ccap = clairvoyant_cap_brute(inst, k).value
    assert cap <= ccap + 1e-9 and ccap <= 2 * cap + 1e-9


@given(seeds, st.integers(1, 8), st.integers(1, 3))
def test_cap_monotone_in_k(seed, n, m):
    inst = gen.lcmnl(np.random.default_rng(seed), n, m)
    vals = [cap_brute(inst, k).value for k in range(n + 1)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


@given(seeds, st.integers(1, 8), st.integers(1, 3), st.integers(1, 8))
def test_equal_revenues_make_caps_coincide(seed, n, m, k):
    rng = np.random.default_rng(seed)
    inst = Instance(np.full(n, 3.0), LCMNL(rng.dirichlet(np.ones(m)), gen.attractions(rng, (n, m))))
    k = min(k, n)
    assert clairvoyant_cap_brute(inst, k).value == pytest.approx(cap_brute(inst, k).value, rel=1e-12)


def test_clairvoyant_cap_full_mnl():
    inst = gen.mnl(np.random.default_rng(4), 6)
    res = clairvoyant_cap_brute(inst, 6)
    assert res.value == pytest.approx(clairvoyant_exact(inst).value, rel=1e-12)
    assert res.per_segment[0] == pytest.approx(res.value)


def test_cap_limit_and_bad_k():
    inst = gen.mnl(np.random.default_rng(0), 5)
    with pytest.raises(ValueError):
        cap_brute(inst, 2, limit=4)
    with pytest.raises(ValueError):
        cap_brute(inst, -1)


def test_cap_tie_prefers_smaller_universe():
    inst = Instance([1.0, 1.0], MNL([1.0, 1e-30]))
    assert cap_brute(inst, 2).first_stage == (1,)


@given(seeds, st.integers(1, 8))
def test_log_ratio_bound_dominates(seed, n):
    inst = gen.lcmnl(np.random.default_rng(seed), n, 2)
    assert clairvoyant_exact(inst).value <= log_ratio_bound(inst) + 1e-9


@given(seeds, st.integers(1, 8))
def test_uniform_revenues_no_clairvoyant_gain(seed, n):
    rng = np.random.default_rng(seed)
    inst = Instance(np.full(n, 2.0), MNL(gen.attractions(rng, n)))
    assert log_ratio_bound(inst) == pytest.approx(revenue_ordered(inst).revenue)
    assert clairvoyant_exact(inst).value <= log_ratio_bound(inst) + 1e-9


def test_log_ratio_factor_two():
    inst = Instance([math.e * 0.5, 0.5], MNL([1.0, 1.0]))
    assert log_ratio_bound(inst) == pytest.approx(2 * revenue_ordered(inst).revenue)


def test_log_ratio_tight_mnl_instance():
    v1 = 1e-4
    inst = Instance([1.0, v1 / (1 + v1)], MNL([v1, 1e4]))
    assert clairvoyant_exact(inst).value < log_ratio_bound(inst)


def test_log_ratio_needs_rum():
    from assortbounds.models import GAM
    with pytest.raises(ModelError):
        log_ratio_bound(Instance([1.0], GAM([2.0], [1.0])))
