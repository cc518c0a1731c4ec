"""Choice probabilities, expected revenue and the first/last-choice vectors.

The workhorse is :func:`choice_probs`, which evaluates a whole batch of offer
sets at once. An offer set is encoded as a boolean row of length n where
column ``i - 1`` flags product id ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .models import (
    GAM, LCMNL, MNL, AlphaMNL, Instance, MarkovChain, ModelError, NestedLogit, RCS,
    SamplerRUM,
)

LAMBDA0_MIN = 1e-15


def as_assortment(S: Iterable[int], n: int) -> tuple[int, ...]:
    """Normalize an offer set to a sorted tuple of distinct ids in ``1..n``."""
    ids = tuple(sorted({int(i) for i in S}))
    if ids and (ids[0] < 1 or ids[-1] > n):
        raise ValueError(f"assortment {ids} contains ids outside 1..{n}")
    return ids


def to_mask(S: Iterable[int], n: int) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    ids = as_assortment(S, n)
    if ids:
        mask[np.array(ids) - 1] = True
    return mask


def from_mask(mask: np.ndarray) -> tuple[int, ...]:
    return tuple(int(i) + 1 for i in np.flatnonzero(mask))


def bitmask_rows(lo: int, hi: int, n: int) -> np.ndarray:
    """Offer sets for integer bitmasks ``lo..hi-1``; bit k flags product k+1."""
    codes = np.arange(lo, hi, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def prefix_masks(n: int) -> np.ndarray:
    """Rows ``[1], [2], ..., [n]`` as offer sets."""
    return np.tri(n, n, dtype=bool)


# ---------------------------------------------------------------------------
# batch evaluation

def _mnl_probs(v, masks):
    V = masks @ v
    out = np.empty((masks.shape[0], v.size + 1))
    out[:, 0] = 1.0 / (1.0 + V)
    out[:, 1:] = masks * v * out[:, :1]
    return out


def _lcmnl_probs(model: LCMNL, masks):
    Vj = masks @ model.v                       # (K, m)
    w0 = model.theta / (1.0 + Vj)              # theta_j * M_j(0, S)
    out = np.empty((masks.shape[0], model.n + 1))
    out[:, 0] = w0.sum(axis=1)
    out[:, 1:] = masks * (w0 @ model.v.T)
    return out


def _alpha_probs(model: AlphaMNL, masks):
    # same arithmetic as the MNL so alpha = 1 reproduces it bit for bit
    base = _mnl_probs(model.v, masks)
    out = np.empty_like(base)
    out[:, 1:] = base[:, 1:] * model.alpha
    out[:, 0] = base[:, 0] * (1.0 + masks @ ((1.0 - model.alpha) * model.v))
    return out


def _gam_probs(model: GAM, masks):
    shadow = model.w.sum() - masks @ model.w
    denom = 1.0 + masks @ model.v + shadow
    out = np.empty((masks.shape[0], model.n + 1))
    out[:, 0] = (1.0 + shadow) / denom
    out[:, 1:] = masks * model.v / denom[:, None]
    return out


def _nl_probs(model: NestedLogit, masks):
    onehot = np.zeros((model.n, model.m))
    onehot[np.arange(model.n), model.nest] = 1.0
    Vn = masks @ (onehot * model.v[:, None])   # (K, m) per-nest attraction
    pos = Vn > 0
    safe = np.where(pos, Vn, 1.0)
    nest_weight = np.where(pos, safe ** model.gamma, 0.0)
    denom = model.v0 + nest_weight.sum(axis=1)
    # V_i^{gamma_i - 1}; only used where the product is offered so V_i > 0
    scale = np.where(pos, safe ** (model.gamma - 1.0), 0.0)
    out = np.empty((masks.shape[0], model.n + 1))
    out[:, 0] = model.v0 / denom
    out[:, 1:] = masks * model.v * scale[:, model.nest] / denom[:, None]
    return out


def _rcs_probs(model: RCS, masks):
    order = model.preference - 1
    att = model.attention[order]
    m = masks[:, order]
    logs = m * np.log1p(-att)
    before = np.cumsum(logs, axis=1) - logs    # log P(no better offered product considered)
    p_ordered = m * att * np.exp(before)
    out = np.empty((masks.shape[0], model.n + 1))
    out[:, 1:][:, order] = p_ordered
    out[:, 0] = np.exp(logs.sum(axis=1))
    return out


def markov_absorption(model: MarkovChain, mask: np.ndarray) -> np.ndarray:
    """Absorption distribution over states ``0..n`` when products in ``mask`` are offered.

    Unoffered products are transient; offered products and the outside
    state absorb. Solved by dense elimination.
    """
    n = model.n
    lam, rho = model.lambda_arrival, model.rho
    absorbing = np.concatenate(([True], mask))
    trans = np.flatnonzero(~absorbing)
    out = np.where(absorbing, lam, 0.0)
    if trans.size:
        A = np.eye(trans.size) - rho[np.ix_(trans, trans)]
        # expected visits to each transient state, then one step into absorbing ones
        visits = np.linalg.solve(A.T, lam[trans])
        out = out + np.where(absorbing, visits @ rho[trans, :], 0.0)
    return out


def _markov_probs(model: MarkovChain, masks):
    return np.array([markov_absorption(model, row) for row in masks]).reshape(masks.shape[0], model.n + 1)


def choice_probs(model, masks: np.ndarray) -> np.ndarray:
    """Choice probabilities for a batch of offer sets.

    Returns a ``(K, n + 1)`` array; column 0 is the outside option and
    column i is product id i (zero when i is not offered).
    """
    masks = np.atleast_2d(np.asarray(masks, dtype=bool))
    if isinstance(model, MNL):
        return _mnl_probs(model.v, masks)
    if isinstance(model, LCMNL):
        return _lcmnl_probs(model, masks)
    if isinstance(model, AlphaMNL):
        return _alpha_probs(model, masks)
    if isinstance(model, GAM):
        return _gam_probs(model, masks)
    if isinstance(model, NestedLogit):
        return _nl_probs(model, masks)
    if isinstance(model, RCS):
        return _rcs_probs(model, masks)
    if isinstance(model, MarkovChain):
        return _markov_probs(model, masks)
    if isinstance(model, SamplerRUM):
        if model.prob is None:
            raise ModelError(f"{model.name}: choice probabilities are only available by simulation")
        return np.asarray(model.prob(masks), dtype=float)
    raise ModelError(f"unsupported model {type(model).__name__}")


def revenues_of_masks(inst: Instance, masks: np.ndarray) -> np.ndarray:
    probs = choice_probs(inst.model, masks)
    return probs[:, 1:] @ inst.revenues


def choice_prob(inst: Instance, i: int, S: Iterable[int]) -> float:
    """P(i, S) for product id i in S, or the outside option when i == 0."""
    S = as_assortment(S, inst.n)
    if i != 0 and i not in S:
        raise ValueError(f"alternative {i} is not in the offer set {S} or the outside option")
    return float(choice_probs(inst.model, to_mask(S, inst.n))[0, i])


def expected_revenue(inst: Instance, S: Iterable[int]) -> float:
    S = as_assortment(S, inst.n)
    if not S:
        return 0.0
    return float(revenues_of_masks(inst, to_mask(S, inst.n)[None, :])[0])


def odds_ratios(inst: Instance, S: Iterable[int]) -> dict[int, float]:
    """O(i, S) = P(i, S) / P(0, S) for every i in S."""
    S = as_assortment(S, inst.n)
    p = choice_probs(inst.model, to_mask(S, inst.n))[0]
    if p[0] <= 0:
        raise ValueError("odds ratios undefined: P(0, S) = 0")
    return {i: p[i] / p[0] for i in S}


@dataclass(frozen=True, eq=False)
class DerivedVectors:
    """First-choice, last-choice and the modified vectors built from them."""

    lambda_first: np.ndarray
    lambda0: float
    omega: np.ndarray
    a: np.ndarray
    b: np.ndarray


def last_choice(model) -> np.ndarray:
    """omega_i = P(i, {i})."""
    if isinstance(model, SamplerRUM) and model.omega is not None:
        return np.asarray(model.omega, dtype=float)
    eye = np.eye(model.n, dtype=bool)
    return np.diagonal(choice_probs(model, eye)[:, 1:]).copy()


def derive_vectors(inst: Instance) -> DerivedVectors:
    model = inst.model
    full = choice_probs(model, np.ones((1, inst.n), dtype=bool))[0]
    lam0 = float(full[0])
    if not lam0 > LAMBDA0_MIN:
        raise ModelError(f"P(0, N) = {lam0:.3g}; the bounds need a positive no-purchase probability")
    lam = full[1:].copy()
    omega = last_choice(model)
    return DerivedVectors(lam, lam0, omega, lam / (1.0 - omega), omega / lam0)


def gam_to_alpha(gam: GAM) -> AlphaMNL:
    """Rewrite a GAM as an alpha-MNL with the outside attraction normalized to 1."""
    v_tilde = gam.v - gam.w
    v0_tilde = 1.0 + gam.w.sum()
    return AlphaMNL(gam.v / v_tilde, MNL(v_tilde / v0_tilde))
