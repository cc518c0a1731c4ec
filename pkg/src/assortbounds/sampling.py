"""Monte Carlo draws: utility realizations, purchase indicators B and choices.

Every sampler takes an explicit seed (an int, a ``SeedSequence`` or a
``Generator``); there is no module-level RNG state. Gumbel noise is the
mean-zero variant, location ``-euler_gamma`` and scale 1, so the outside
utility has expectation zero.
"""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

from .choice import as_assortment, to_mask
from .models import LCMNL, MNL, RCS, Instance, ModelError, SamplerRUM

GUMBEL_LOC = -np.euler_gamma


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def gumbel(rng: np.random.Generator, size) -> np.ndarray:
    """Standard mean-zero Gumbel draws, ``loc - ln(-ln u)`` with u uniform on (0, 1)."""
    u = rng.random(size)
    u = np.where(u > 0.0, u, np.nextafter(0.0, 1.0))
    return GUMBEL_LOC - np.log(-np.log(u))


def sample_utilities(inst: Instance, size: int, seed) -> np.ndarray:
    """``(size, n + 1)`` utility draws; column 0 is the outside option."""
    rng = make_rng(seed)
    model = inst.model
    if isinstance(model, MNL):
        eps = gumbel(rng, (size, inst.n + 1))
        eps[:, 1:] += np.log(model.v)
        return eps
    if isinstance(model, LCMNL):
        seg = rng.choice(model.m, size=size, p=model.theta)
        eps = gumbel(rng, (size, inst.n + 1))
        eps[:, 1:] += np.log(model.v.T)[seg]
        return eps
    if isinstance(model, SamplerRUM):
        return np.asarray(model.draw(rng, size), dtype=float)
    raise ModelError(f"{model.kind}: no utility sampler available")


def _sample_B_batch(inst: Instance, size: int, rng) -> np.ndarray:
    model = inst.model
    if isinstance(model, RCS):
        return rng.random((size, inst.n)) < model.attention
    U = sample_utilities(inst, size, rng)
    return U[:, 1:] >= U[:, :1]


def sample_B(inst: Instance, seed, size: Optional[int] = None) -> np.ndarray:
    """Purchase-willingness indicators: ``B_i = 1`` iff product i alone would be bought.

    Utility-based models share one outside draw per consumer, which keeps
    the dependence between the components. Returns shape ``(n,)`` or
    ``(size, n)``.
    """
    rng = make_rng(seed)
    B = _sample_B_batch(inst, 1 if size is None else size, rng)
    return B[0] if size is None else B


def sample_choices(inst: Instance, S: Iterable[int], size: int, seed) -> np.ndarray:
    """Chosen alternative (0 = no purchase) for ``size`` independent consumers."""
    rng = make_rng(seed)
    S = as_assortment(S, inst.n)
    if not S:
        return np.zeros(size, dtype=int)
    mask = to_mask(S, inst.n)
    model = inst.model
    if isinstance(model, RCS):
        considered = (rng.random((size, inst.n)) < model.attention) & mask
        ranked = considered[:, model.preference - 1]
        first = np.argmax(ranked, axis=1)
        return np.where(ranked.any(axis=1), model.preference[first], 0)
    U = sample_utilities(inst, size, rng)
    U[:, 1:][:, ~mask] = -np.inf
    return np.argmax(U, axis=1)


def sample_choice(inst: Instance, S: Iterable[int], seed) -> int:
    return int(sample_choices(inst, S, 1, seed)[0])
