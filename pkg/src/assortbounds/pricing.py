"""Uniform versus clairvoyant pricing under MNL with mean-zero Gumbel noise.

With total attraction V at price zero, a uniform price p earns
``(p - 1)`` at the optimum, where ``(p - 1) e^p = V``. A clairvoyant firm
charges each consumer the full surplus ``max(U_N, U_0)`` and earns
``ln(1 + V)``. Their ratio decreases in V and tends to e as V -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sampling import gumbel, make_rng


@dataclass(frozen=True)
class PricingResult:
    p_star: float
    r_star: float
    r_clairvoyant: float
    ratio: float


def _solve_markup(V: float) -> float:
    """Root x > 0 of ``x e^(1 + x) = V`` by bisection.

    Bisection runs until the bracket stops shrinking, so the root keeps
    full relative precision even when V is tiny.
    """
    lo, hi = 0.0, 1.0 + math.log1p(V)
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if mid * math.exp(1.0 + mid) < V:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mnl_pricing(V: float) -> PricingResult:
    V = float(V)
    if not V > 0 or not math.isfinite(V):
        raise ValueError(f"total attraction must be positive and finite (got {V})")
    x = _solve_markup(V)
    r_clair = math.log1p(V)
    return PricingResult(1.0 + x, x, r_clair, r_clair / x)


def unbounded_example(a: float) -> tuple[float, float, float]:
    """Single product with ``P(U > p) = min(1, 1/p)`` on ``[1, 1 + a]``.

    Any fixed price earns at most 1 while the clairvoyant earns
    ``E[U] = 1 + ln(1 + a)``. Returns ``(r_clairvoyant, r_star, ratio)``.
    """
    a = float(a)
    if not a > 0:
        raise ValueError(f"a must be positive (got {a})")
    r_clair = 1.0 + math.log1p(a)
    return r_clair, 1.0, r_clair


def clairvoyant_pricing_mc(V: float, samples: int = 10 ** 6, seed=0) -> tuple[float, float]:
    """Monte Carlo ``E[max(U_N, U_0)]`` with ``U_N = ln V + Gumbel``; returns (mean, se)."""
    rng = make_rng(seed)
    g = gumbel(rng, (samples, 2))
    x = np.maximum(g[:, 0], math.log(V) + g[:, 1])
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(samples))
