"""Auxiliary-MNL bounds on the TAOP and heuristics for the cardinality-constrained problem."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .choice import DerivedVectors, as_assortment, derive_vectors, expected_revenue
from .models import LCMNL, Instance, ModelError
from .mnl import (
    BRUTE_LIMIT, CardinalityOracle, brute_force_constrained, brute_force_taop, mnl_constrained,
    mnl_optimal, revenue_ordered,
)

COP_MIN_GAP = 1e-9
HEURISTIC_KEYS = ("lambda", "a", "omega", "b")


@dataclass(frozen=True)
class BoundChain:
    r_lambda: float
    r_a: float
    r_o: float
    r_star: Optional[float]
    r_b: float
    r_omega_over_lambda0: float
    assortments: dict = field(default_factory=dict, compare=False)

    def values(self) -> tuple[float, ...]:
        vals = (self.r_lambda, self.r_a, self.r_o, self.r_star, self.r_b, self.r_omega_over_lambda0)
        return tuple(v for v in vals if v is not None)

    def ordered(self, slack: float = 1e-9) -> bool:
        vals = self.values()
        return all(x <= y + slack for x, y in zip(vals, vals[1:]))


def bound_chain(inst: Instance, with_exact: bool = True, vectors: Optional[DerivedVectors] = None,
                limit: int = BRUTE_LIMIT) -> BoundChain:
    """Lower and upper bounds on R* from auxiliary MNLs on lambda, a, b and omega."""
    d = vectors or derive_vectors(inst)
    r = inst.revenues
    sol = {key: mnl_optimal(r, getattr(d, attr)) for key, attr in
           (("lambda", "lambda_first"), ("a", "a"), ("b", "b"), ("omega", "omega"))}
    ro = revenue_ordered(inst)
    star = brute_force_taop(inst, limit) if with_exact and inst.n <= limit else None
    assortments = {
        "r_lambda": sol["lambda"].assortment,
        "r_a": sol["a"].assortment,
        "r_o": ro.assortment,
        "r_b": sol["b"].assortment,
        "r_omega_over_lambda0": sol["omega"].assortment,
    }
    if star is not None:
        assortments["r_star"] = star.assortment
    return BoundChain(
        sol["lambda"].tau_star, sol["a"].tau_star, ro.revenue,
        None if star is None else star.revenue,
        sol["b"].tau_star, sol["omega"].tau_star / d.lambda0, assortments,
    )


def subset_upper_bound(inst: Instance, S: Sequence[int], vectors: Optional[DerivedVectors] = None) -> float:
    """max over T subset of S of R_b(T); an upper bound on R(S) for regular models."""
    S = as_assortment(S, inst.n)
    if not S:
        return 0.0
    d = vectors or derive_vectors(inst)
    idx = np.asarray(S) - 1
    return mnl_optimal(inst.revenues[idx], d.b[idx]).tau_star


def constrained_bounds(inst: Instance, k: int, vectors: Optional[DerivedVectors] = None):
    """``(R^k_a, R^k_b, R^k_b / R^k_a)`` under the cardinality constraint ``|S| <= k``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    d = vectors or derive_vectors(inst)
    oracle = CardinalityOracle(k)
    ra = mnl_constrained(inst.revenues, d.a, oracle).tau_star
    rb = mnl_constrained(inst.revenues, d.b, oracle).tau_star
    if ra > 0:
        guarantee = rb / ra
    else:
        guarantee = 1.0 if rb == 0 else math.inf
    return ra, rb, guarantee


@dataclass(frozen=True)
class HeuristicReport:
    k: int
    revenues: dict
    assortments: dict
    max_h: float
    max_h_key: str
    baseline: Optional[float]
    baseline_assortment: Optional[tuple]
    optimum: Optional[float]
    optimum_assortment: Optional[tuple]
    cop: Optional[float]
    r_k_a: float
    r_k_b: float
    guarantee: float

    def ratio(self, key: str) -> Optional[float]:
        """Heuristic revenue as a fraction of the constrained optimum."""
        if self.optimum is None or self.optimum <= 0:
            return None
        value = self.max_h if key == "max_h" else self.revenues[key]
        return value / self.optimum


def mixture_attractions(model: LCMNL) -> np.ndarray:
    """Segment-weighted average attraction, the usual single-MNL proxy for an LC-MNL."""
    return model.v @ model.theta


def heuristic_suite(inst: Instance, k: int, with_exact: bool = True,
                    vectors: Optional[DerivedVectors] = None, limit: int = BRUTE_LIMIT) -> HeuristicReport:
    """Evaluate the four auxiliary-MNL heuristics and Max-H under ``|S| <= k``."""
    if k < 1:
        raise ValueError("heuristics need k >= 1")
    d = vectors or derive_vectors(inst)
    oracle = CardinalityOracle(k)
    r = inst.revenues
    attr = {"lambda": d.lambda_first, "a": d.a, "omega": d.omega, "b": d.b}
    sols = {key: mnl_constrained(r, attr[key], oracle) for key in HEURISTIC_KEYS}
    assortments = {key: sols[key].assortment for key in HEURISTIC_KEYS}
    revs = {key: expected_revenue(inst, assortments[key]) for key in HEURISTIC_KEYS}
    max_key = max(HEURISTIC_KEYS, key=lambda key: revs[key])

    baseline = baseline_S = None
    if isinstance(inst.model, LCMNL):
        baseline_S = mnl_constrained(r, mixture_attractions(inst.model), oracle).assortment
        baseline = expected_revenue(inst, baseline_S)

    optimum = optimum_S = None
    if with_exact and inst.n <= limit:
        best = brute_force_constrained(inst, oracle, limit)
        optimum, optimum_S = best.revenue, best.assortment

    cop = None
    if baseline is not None and optimum is not None and optimum - baseline > COP_MIN_GAP:
        cop = (revs[max_key] - baseline) / (optimum - baseline)

    ra, rb = sols["a"].tau_star, sols["b"].tau_star
    guarantee = rb / ra if ra > 0 else math.inf
    return HeuristicReport(k, revs, assortments, revs[max_key], max_key, baseline, baseline_S,
                           optimum, optimum_S, cop, ra, rb, guarantee)
