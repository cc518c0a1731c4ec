"""Exact assortment optimization for MNL models, plus brute-force references.

For an MNL with attractions v, the optimal revenue is the unique root of
``sum_i v_i (r_i - tau)^+ = tau`` and the revenue-ordered set
``{i : r_i > tau}`` attains it. Under a constraint family with a
linear-maximization oracle, the same fixed-point identity turns the
constrained problem into a one-dimensional root search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .choice import bitmask_rows, from_mask, prefix_masks, revenues_of_masks
from .models import Instance

BRUTE_LIMIT = 20
_CHUNK = 1 << 14
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class MnlSolveResult:
    tau_star: float
    assortment: tuple[int, ...]
    prefix_index: int

    @property
    def revenue(self) -> float:
        return self.tau_star


@dataclass(frozen=True)
class SolveResult:
    assortment: tuple[int, ...]
    revenue: float
    method: str


def mnl_revenue(r, v, S: Sequence[int]) -> float:
    """R_v(S) for product ids in S."""
    if len(S) == 0:
        return 0.0
    idx = np.asarray(S, dtype=int) - 1
    r, v = np.asarray(r, float), np.asarray(v, float)
    return float(np.dot(r[idx], v[idx]) / (1.0 + v[idx].sum()))


def mnl_optimal(r, v) -> MnlSolveResult:
    """Unconstrained MNL optimum for revenues sorted non-increasingly.

    ``tau*`` is the best revenue-ordered prefix value, which is the root of
    the fixed-point equation; the returned assortment is ``{i: r_i > tau*}``.
    Attractions may be zero (those products never sell).
    """
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    if r.size == 0:
        return MnlSolveResult(0.0, (), 0)
    prefix = np.cumsum(r * v) / (1.0 + np.cumsum(v))
    tau = max(0.0, float(prefix.max()))
    cut = tau * (1.0 + _TIE_RTOL)
    size = int(np.count_nonzero(r > cut))
    return MnlSolveResult(tau, tuple(range(1, size + 1)), size)


def fixed_point_residual(r, v, tau: float) -> float:
    r, v = np.asarray(r, float), np.asarray(v, float)
    return float(np.sum(v * np.clip(r - tau, 0.0, None)) - tau)


class CardinalityOracle:
    """Feasible sets are those with at most k products.

    Given weights, returns the top-k strictly positive weights; on equal
    weights the lower id wins.
    """

    def __init__(self, k: int):
        if k < 0:
            raise ValueError("cardinality k must be non-negative")
        self.k = int(k)

    def __call__(self, weights) -> tuple[int, ...]:
        w = np.asarray(weights, dtype=float)
        order = np.lexsort((np.arange(w.size), -w))
        chosen = [int(i) + 1 for i in order[: self.k] if w[i] > 0]
        return tuple(sorted(chosen))

    def feasible(self, S: Sequence[int]) -> bool:
        return len(S) <= self.k

    def __repr__(self):
        return f"CardinalityOracle(k={self.k})"


class InfeasibleOracleResult(RuntimeError):
    pass


def mnl_constrained(r, v, oracle, tol: float = 1e-12, max_iter: int = 200) -> MnlSolveResult:
    """Constrained MNL optimum by bisection on the revenue level.

    ``g(tau) = max_S sum_{i in S} v_i (r_i - tau) - tau`` over feasible S is
    decreasing with root at the constrained optimum. Bisection on
    ``[0, r_1]`` brackets it; a few Dinkelbach steps then make the returned
    value exact for the final set.
    """
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)

    def best_set(tau):
        S = oracle(v * (r - tau))
        if not oracle.feasible(S):
            raise InfeasibleOracleResult(f"oracle returned infeasible set {S}")
        return S

    def g(S, tau):
        if not S:
            return -tau
        idx = np.asarray(S) - 1
        return float(np.sum(v[idx] * (r[idx] - tau))) - tau

    if r.size == 0:
        return MnlSolveResult(0.0, (), 0)
    lo, hi = 0.0, float(r.max())
    best = best_set(lo)
    width = tol * max(1.0, hi)
    for _ in range(max_iter):
        if hi - lo <= width:
            break
        mid = 0.5 * (lo + hi)
        S = best_set(mid)
        if g(S, mid) >= 0.0:
            lo, best = mid, S
        else:
            hi = mid
    tau = mnl_revenue(r, v, best)
    for _ in range(50):
        S = best_set(tau)
        cand = mnl_revenue(r, v, S)
        if cand <= tau * (1.0 + 1e-15):
            break
        best, tau = S, cand
    return MnlSolveResult(tau, tuple(best), len(best))


# ---------------------------------------------------------------------------
# brute force over the true model

def _pick(values: np.ndarray, masks: np.ndarray) -> tuple[tuple[int, ...], float]:
    """Best offer set; near-ties go to the smaller set, then lexicographic order."""
    best = float(values.max())
    tied = np.flatnonzero(values >= best - _TIE_RTOL * abs(best))
    cands = [(int(masks[k].sum()), from_mask(masks[k]), float(values[k])) for k in tied]
    size, S, val = min(cands)
    return S, val


def _enumerate(inst: Instance, limit: int, keep: Optional[Callable[[np.ndarray], np.ndarray]] = None):
    n = inst.n
    if n > limit:
        raise ValueError(f"brute force limited to n <= {limit} (got n = {n})")
    best_S, best_val = (), 0.0
    for lo in range(0, 1 << n, _CHUNK):
        masks = bitmask_rows(lo, min(lo + _CHUNK, 1 << n), n)
        if keep is not None:
            masks = masks[keep(masks)]
        if masks.shape[0] == 0:
            continue
        S, val = _pick(revenues_of_masks(inst, masks), masks)
        better = val > best_val + _TIE_RTOL * best_val
        tie = not better and val >= best_val - _TIE_RTOL * best_val
        if better or (tie and (len(S), S) < (len(best_S), best_S)):
            best_S, best_val = S, val
    return best_S, best_val


def brute_force_taop(inst: Instance, limit: int = BRUTE_LIMIT) -> SolveResult:
    """Exact TAOP optimum by enumerating all 2^n offer sets."""
    S, val = _enumerate(inst, limit)
    return SolveResult(S, val, "brute-force")


def brute_force_constrained(inst: Instance, feasible, limit: int = BRUTE_LIMIT) -> SolveResult:
    """Exact optimum over feasible offer sets.

    ``feasible`` is a predicate on assortments, an int k (cardinality) or a
    :class:`CardinalityOracle`. Returns the empty set with revenue 0 when
    nothing better is feasible.
    """
    if isinstance(feasible, (int, np.integer)):
        feasible = CardinalityOracle(int(feasible))
    if isinstance(feasible, CardinalityOracle):
        k = feasible.k
        keep = lambda masks: masks.sum(axis=1) <= k
    else:
        pred = feasible.feasible if hasattr(feasible, "feasible") else feasible
        keep = lambda masks: np.array([bool(pred(from_mask(m))) for m in masks], dtype=bool)
    S, val = _enumerate(inst, limit, keep)
    return SolveResult(S, val, "brute-force-constrained")


def revenue_ordered(inst: Instance) -> SolveResult:
    """Best revenue-ordered assortment ``[i]`` under the true model."""
    masks = prefix_masks(inst.n)
    vals = revenues_of_masks(inst, masks)
    best = float(vals.max())
    k = int(np.flatnonzero(vals >= best - _TIE_RTOL * abs(best))[0])
    return SolveResult(tuple(range(1, k + 2)), float(vals[k]), "revenue-ordered")
