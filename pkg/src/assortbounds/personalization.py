"""Personalized assortments for LC-MNL: p-TAOP, CAP and clairvoyant-CAP.

In the customized assortment problem (CAP) the firm first picks a universe
T with at most k products and then offers each segment its best subset of
T. Under MNL segments that subset is a revenue-ordered prefix of T, so both
CAP variants reduce to prefix sums over the enumerated first-stage sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .choice import bitmask_rows, from_mask
from .mnl import mnl_optimal, revenue_ordered
from .models import LCMNL, MNL, Instance, ModelError, is_rum

CAP_LIMIT = 16
_CHUNK = 1 << 14
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class CapResult:
    first_stage: tuple[int, ...]
    value: float
    per_segment: tuple


def _lcmnl(inst: Instance) -> LCMNL:
    model = inst.model
    if isinstance(model, LCMNL):
        return model
    if isinstance(model, MNL):
        return LCMNL([1.0], model.v[:, None])
    raise ModelError(f"expected an LC-MNL instance, got {inst.kind}")


def ptaop(inst: Instance) -> float:
    """``sum_j theta_j R*_j``: each segment gets its own optimal MNL assortment."""
    lc = _lcmnl(inst)
    return float(sum(t * mnl_optimal(inst.revenues, lc.v[:, j]).tau_star
                     for j, t in enumerate(lc.theta)))


def _cap_values(r, v, masks):
    """Best prefix value of T and its length, per mask, for one MNL segment."""
    x = masks.astype(float)
    num = np.cumsum(x * (r * v), axis=1)
    den = 1.0 + np.cumsum(x * v, axis=1)
    vals = num / den
    best = vals.max(axis=1)
    pos = np.argmax(vals >= best[:, None] * (1.0 - _TIE_RTOL), axis=1)
    best = np.maximum(best, 0.0)
    return best, pos


def _clairvoyant_values(r, v, masks):
    """Beggs-Cardell clairvoyant revenue restricted to T, per mask."""
    x = masks.astype(float)
    cum = np.cumsum(x * v, axis=1)
    prev = cum - x * v
    return np.sum(x * r * v / ((1.0 + prev) * (1.0 + cum)), axis=1)


def _enumerate(inst: Instance, k: int, limit: int, objective):
    n = inst.n
    if n > limit:
        raise ValueError(f"CAP enumeration limited to n <= {limit} (got n = {n})")
    if k < 0:
        raise ValueError("k must be non-negative")
    best = None
    for lo in range(0, 1 << n, _CHUNK):
        masks = bitmask_rows(lo, min(lo + _CHUNK, 1 << n), n)
        masks = masks[masks.sum(axis=1) <= k]
        if masks.shape[0] == 0:
            continue
        vals = objective(masks)
        top = float(vals.max())
        tied = np.flatnonzero(vals >= top * (1.0 - _TIE_RTOL))
        for idx in tied:
            T = from_mask(masks[idx])
            key = (len(T), T)
            val = float(vals[idx])
            if best is None or val > best[0] * (1.0 + _TIE_RTOL) or (
                    val >= best[0] * (1.0 - _TIE_RTOL) and key < best[1]):
                best = (val, key, masks[idx])
    return best


def cap_brute(inst: Instance, k: int, limit: int = CAP_LIMIT) -> CapResult:
    """Exact CAP optimum by enumerating first-stage sets with ``|T| <= k``."""
    lc = _lcmnl(inst)
    r = inst.revenues

    def objective(masks):
        return sum(t * _cap_values(r, lc.v[:, j], masks)[0] for j, t in enumerate(lc.theta))

    val, (_, T), mask = _enumerate(inst, k, limit, objective)
    per_segment = []
    for j in range(lc.m):
        seg_val, pos = _cap_values(r, lc.v[:, j], mask[None, :])
        if seg_val[0] <= 0.0:
            per_segment.append(())
        else:
            per_segment.append(tuple(i for i in T if i <= pos[0] + 1))
    return CapResult(T, val, tuple(per_segment))


def clairvoyant_cap_brute(inst: Instance, k: int, limit: int = CAP_LIMIT) -> CapResult:
    """Exact clairvoyant-CAP optimum; ``per_segment`` holds each segment's clairvoyant revenue on T."""
    lc = _lcmnl(inst)
    r = inst.revenues

    def objective(masks):
        return sum(t * _clairvoyant_values(r, lc.v[:, j], masks) for j, t in enumerate(lc.theta))

    val, (_, T), mask = _enumerate(inst, k, limit, objective)
    per_segment = tuple(float(_clairvoyant_values(r, lc.v[:, j], mask[None, :])[0]) for j in range(lc.m))
    return CapResult(T, val, per_segment)


def log_ratio_bound(inst: Instance) -> float:
    """``(1 + ln(r_1 / r_n)) R^o``, an upper bound on the clairvoyant revenue for any RUM."""
    if not is_rum(inst.model):
        raise ModelError(f"{inst.kind} is not a random utility model")
    r = inst.revenues
    return (1.0 + math.log(r[0] / r[-1])) * revenue_ordered(inst).revenue
