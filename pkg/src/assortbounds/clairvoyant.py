"""Clairvoyant revenue: exact formulas, Monte Carlo, the Lai-Robbins bound,
consumer surplus and the Markov-chain construction with ratio close to n.

A clairvoyant firm sees the purchase indicators B and offers the
highest-revenue product the consumer would buy, i.e. product
``I(B) = min{i : B_i = 1}`` (0 when no product is acceptable).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .choice import choice_probs, last_choice, to_mask
from .mnl import brute_force_taop, mnl_optimal, revenue_ordered
from .models import LCMNL, MNL, RCS, Instance, MarkovChain, ModelError, SamplerRUM
from .sampling import _sample_B_batch, make_rng, sample_utilities

MC_SAMPLES = 10 ** 6
MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class ClairvoyantResult:
    value: float
    method: str
    std_error: Optional[float] = None


def _mnl_first_acceptable(v: np.ndarray) -> np.ndarray:
    # Pr(I(B) = i) = M(0, S_{i-1}) M(i, S_i); entry 0 is Pr(B = 0) = M(0, N)
    V = np.concatenate(([0.0], np.cumsum(v)))
    out = np.empty(v.size + 1)
    out[1:] = v / ((1.0 + V[:-1]) * (1.0 + V[1:]))
    out[0] = 1.0 / (1.0 + V[-1])
    return out


def _independent_first_acceptable(omega: np.ndarray) -> np.ndarray:
    none_before = np.concatenate(([1.0], np.cumprod(1.0 - omega)))
    out = np.empty(omega.size + 1)
    out[1:] = omega * none_before[:-1]
    out[0] = none_before[-1]
    return out


def first_acceptable_distribution(inst: Instance) -> tuple[np.ndarray, str]:
    """Distribution of I(B) over ``0..n`` where it has a closed form."""
    model = inst.model
    if isinstance(model, MNL):
        return _mnl_first_acceptable(model.v), "exact-mnl"
    if isinstance(model, LCMNL):
        dist = sum(t * _mnl_first_acceptable(model.v[:, j]) for j, t in enumerate(model.theta))
        return dist, "exact-lcmnl"
    if isinstance(model, RCS):
        return _independent_first_acceptable(model.attention), "exact-independent"
    if isinstance(model, SamplerRUM) and model.independent_b and model.omega is not None:
        return _independent_first_acceptable(model.omega), "exact-independent"
    raise ModelError(f"{model.kind}: no closed form for the clairvoyant revenue")


def clairvoyant_exact(inst: Instance) -> ClairvoyantResult:
    dist, method = first_acceptable_distribution(inst)
    return ClairvoyantResult(float(dist[1:] @ inst.revenues), method)


def has_exact_clairvoyant(inst: Instance) -> bool:
    try:
        first_acceptable_distribution(inst)
    except ModelError:
        return False
    return True


def _chunk_sizes(samples: int):
    full, rest = divmod(samples, MC_CHUNK)
    return [MC_CHUNK] * full + ([rest] if rest else [])


def _first_acceptable_revenue(inst: Instance, samples: int, seed) -> np.ndarray:
    """Per-chunk ``(sum, sum of squares)`` of ``r_{I(B)}`` over the seed's substreams.

    Each chunk draws from its own spawned substream, so chunks can be
    computed in any order (or in parallel) with identical results.
    """
    sizes = _chunk_sizes(samples)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    r0 = np.concatenate(([0.0], inst.revenues))
    acc = np.zeros((len(sizes), 2))
    for c, (size, ss) in enumerate(zip(sizes, streams)):
        B = _sample_B_batch(inst, size, make_rng(ss))
        first = np.where(B.any(axis=1), np.argmax(B, axis=1) + 1, 0)
        x = r0[first]
        acc[c] = x.sum(), np.dot(x, x)
    return acc


def _mean_and_se(acc: np.ndarray, samples: int) -> tuple[float, float]:
    total, sq = acc.sum(axis=0)
    mean = total / samples
    var = max(sq / samples - mean * mean, 0.0) * samples / max(samples - 1, 1)
    return float(mean), float(np.sqrt(var / samples))


def clairvoyant_mc(inst: Instance, samples: int = MC_SAMPLES, seed=0) -> ClairvoyantResult:
    """Monte Carlo estimate of ``E[max_i r_i B_i]`` with its standard error."""
    acc = _first_acceptable_revenue(inst, samples, seed)
    mean, se = _mean_and_se(acc, samples)
    return ClairvoyantResult(mean, "monte-carlo", se)


def sequential_satisficing_revenue(inst: Instance, samples: int = MC_SAMPLES, seed=0) -> float:
    """Revenue from offering products one at a time, high to low, to persistent satisficers.

    A persistent satisficer buys the first offered product she would buy on
    its own, which is exactly I(B); the estimator is shared with
    :func:`clairvoyant_mc`.
    """
    acc = _first_acceptable_revenue(inst, samples, seed)
    return _mean_and_se(acc, samples)[0]


def clairvoyant(inst: Instance, samples: int = MC_SAMPLES, seed=0) -> ClairvoyantResult:
    """Exact value when available, otherwise Monte Carlo."""
    if has_exact_clairvoyant(inst):
        return clairvoyant_exact(inst)
    return clairvoyant_mc(inst, samples, seed)


def lai_robbins_bound(omega, r, tau: Optional[float] = None) -> float:
    """``tau + sum_i omega_i (r_i - tau)^+``; at the default ``tau = R*_omega`` it equals ``2 R*_omega``."""
    omega = np.asarray(omega, float)
    r = np.asarray(r, float)
    if tau is None:
        tau = mnl_optimal(r, omega).tau_star
    return float(tau + np.sum(omega * np.clip(r - tau, 0.0, None)))


def estimate_surplus(inst: Instance, policy: Union[str, tuple, list], samples: int = MC_SAMPLES, seed=0):
    """Mean consumer surplus ``E[max(U_0, max_{i offered} U_i)]`` and its standard error.

    ``policy`` is an assortment (iterable of ids) or ``"clairvoyant"``, in
    which case each consumer is offered only ``I(B)``.
    """
    n = inst.n
    clair = isinstance(policy, str)
    if clair and policy != "clairvoyant":
        raise ValueError(f"unknown policy {policy!r}")
    mask = None if clair else to_mask(policy, n)
    sizes = _chunk_sizes(samples)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    total = sq = 0.0
    for size, ss in zip(sizes, streams):
        U = sample_utilities(inst, size, make_rng(ss))
        if clair:
            B = U[:, 1:] >= U[:, :1]
            first = np.argmax(B, axis=1) + 1
            offered = np.where(B.any(axis=1), U[np.arange(size), first], -np.inf)
        else:
            offered = U[:, 1:][:, mask].max(axis=1) if mask.any() else np.full(size, -np.inf)
        x = np.maximum(U[:, 0], offered)
        total += x.sum()
        sq += np.dot(x, x)
    mean = total / samples
    var = max(sq / samples - mean * mean, 0.0)
    return float(mean), float(np.sqrt(var / samples))


# ---------------------------------------------------------------------------
# Markov-chain construction where the clairvoyant earns close to n times R*

def markov_fixture_omega(n: int, eps: float) -> np.ndarray:
    """``omega_i = eps^n (eps^{-i} - 1)`` for i = 0..n (entry 0 is 0)."""
    i = np.arange(n + 1)
    return eps ** (n - i) - eps ** n


def markov_tight_fixture(n: int, eps: float):
    """Markov-chain instance whose clairvoyant/TAOP ratio tends to n as eps -> 0.

    Consumers arrive at product n and walk down ``n, n-1, ..., 1``, leaving
    at each step with the complementary probability, so the offered product
    with the largest id is bought with probability ``omega_i``. Revenues are
    ``omega_1 / omega_i``. Returns ``(instance, ratio)`` with the closed-form
    ratio ``sum_i (1 - omega_{i-1}/omega_i)``.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0.0 < eps < 1.0:
        raise ValueError("need 0 < eps < 1")
    om = markov_fixture_omega(n, eps)
    lam = np.zeros(n + 1)
    lam[n] = om[n]
    lam[0] = 1.0 - om[n]
    rho = np.zeros((n + 1, n + 1))
    rho[0, 0] = 1.0
    for i in range(1, n + 1):
        step = om[i - 1] / om[i]
        rho[i, i - 1] = step
        rho[i, 0] += 1.0 - step
    revenues = om[1] / om[1:]
    inst = Instance(revenues, MarkovChain(lam, rho))
    ratio = float(np.sum(1.0 - om[:-1] / om[1:]))
    return inst, ratio


def markov_fixture_by_absorption(inst: Instance) -> tuple[float, float, float]:
    """``(R_bar, R*, ratio)`` for a fixture chain, all evaluated through absorption probabilities.

    In the construction the willingness indicators are nested
    (``B_i = 1`` implies ``B_j = 1`` for j > i), so
    ``Pr(I(B) = i) = omega_i - omega_{i-1}``.
    """
    if not isinstance(inst.model, MarkovChain):
        raise ModelError("expected a Markov-chain instance")
    omega = np.concatenate(([0.0], last_choice(inst.model)))
    if np.any(np.diff(omega) < 0):
        raise ModelError("willingness indicators are not nested in this chain")
    r_bar = float(inst.revenues @ np.diff(omega))
    r_star = brute_force_taop(inst).revenue if inst.n <= 12 else revenue_ordered(inst).revenue
    return r_bar, r_star, r_bar / r_star
