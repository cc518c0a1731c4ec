"""Choice-model types, instance container and JSON (de)serialization.

Products are identified by 1-based ids ``1..n``; id ``0`` is the outside
(no-purchase) alternative. Assortments are sorted tuples of product ids.
All model objects are immutable once constructed, and construction runs the
parameter checks, so a model that exists is a valid model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np

SUM_TOL = 1e-12
MARKOV_MAX_N = 25


class ModelError(ValueError):
    """Raised when model parameters violate an invariant."""


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ModelError(msg)


@dataclass(frozen=True, eq=False)
class MNL:
    """Multinomial logit with outside attraction normalized to 1."""

    v: np.ndarray
    kind = "mnl"

    def __post_init__(self):
        v = _frozen(self.v)
        _require(v.ndim == 1, "mnl: v must be a vector")
        _require(bool(np.all(np.isfinite(v))) and bool(np.all(v > 0)),
                 "mnl: attraction values must be positive")
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.v.size


@dataclass(frozen=True, eq=False)
class LCMNL:
    """Latent-class MNL. ``v[i, j]`` is the attraction of product i+1 in segment j."""

    theta: np.ndarray
    v: np.ndarray
    kind = "lcmnl"

    def __post_init__(self):
        theta = _frozen(self.theta)
        v = _frozen(self.v)
        if v.ndim == 1:
            v = _frozen(v[:, None])
        _require(theta.ndim == 1 and theta.size >= 1, "lcmnl: theta must be a non-empty vector")
        _require(bool(np.all(theta > 0)), "lcmnl: segment weights must be positive")
        _require(abs(theta.sum() - 1.0) <= SUM_TOL,
                 f"lcmnl: segment weights must sum to 1 (got {theta.sum():.15g})")
        _require(v.ndim == 2 and v.shape[1] == theta.size,
                 "lcmnl: v must be an (n, m) matrix with m = len(theta)")
        _require(bool(np.all(np.isfinite(v))) and bool(np.all(v > 0)),
                 "lcmnl: attraction values must be positive")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.v.shape[0]

    @property
    def m(self) -> int:
        return self.theta.size

    def segment(self, j: int) -> MNL:
        return MNL(self.v[:, j])


@dataclass(frozen=True, eq=False)
class AlphaMNL:
    """MNL whose product choice probabilities are scaled by ``alpha``."""

    alpha: np.ndarray
    base: MNL
    kind = "alpha_mnl"

    def __post_init__(self):
        alpha = _frozen(self.alpha)
        base = self.base if isinstance(self.base, MNL) else MNL(self.base)
        _require(alpha.shape == base.v.shape, "alpha_mnl: alpha and v must have equal length")
        _require(bool(np.all(np.isfinite(alpha))) and bool(np.all(alpha >= 0)),
                 "alpha_mnl: alpha must be non-negative")
        excess = float(np.sum(np.clip(alpha - 1.0, 0.0, None) * base.v))
        _require(excess <= 1.0 + SUM_TOL,
                 f"alpha_mnl: infeasible alpha, sum (alpha_i - 1)^+ v_i = {excess:.6g} > 1")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "base", base)

    @property
    def n(self) -> int:
        return self.alpha.size

    @property
    def v(self) -> np.ndarray:
        return self.base.v


@dataclass(frozen=True, eq=False)
class GAM:
    """Generalized attraction model; ``w`` are shadow attractions of unoffered products."""

    v: np.ndarray
    w: np.ndarray
    kind = "gam"

    def __post_init__(self):
        v = _frozen(self.v)
        w = _frozen(self.w)
        _require(v.ndim == 1 and v.shape == w.shape, "gam: v and w must be vectors of equal length")
        _require(bool(np.all(v > 0)), "gam: attraction values must be positive")
        _require(bool(np.all(w >= 0)) and bool(np.all(w < v)), "gam: need 0 <= w_i < v_i")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.v.size


@dataclass(frozen=True, eq=False)
class NestedLogit:
    """Two-level nested logit over flattened products.

    ``nest[k]`` is the (0-based) nest of product k+1 and ``v[k]`` its
    attraction inside that nest. Use :meth:`from_nests` to build one from the
    per-nest attraction lists.
    """

    gamma: np.ndarray
    nest: np.ndarray
    v: np.ndarray
    v0: float = 1.0
    kind = "nested_logit"

    def __post_init__(self):
        gamma = _frozen(self.gamma)
        nest = _frozen(self.nest, dtype=int)
        v = _frozen(self.v)
        _require(gamma.ndim == 1 and gamma.size >= 1, "nested_logit: gamma must be a non-empty vector")
        _require(bool(np.all(gamma > 0)), "nested_logit: dissimilarity parameters must be positive")
        _require(nest.shape == v.shape and v.ndim == 1, "nested_logit: nest and v must align")
        _require(bool(np.all((nest >= 0) & (nest < gamma.size))), "nested_logit: nest index out of range")
        _require(bool(np.all(v > 0)), "nested_logit: attraction values must be positive")
        _require(self.v0 > 0, "nested_logit: outside attraction v0 must be positive")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "nest", nest)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "v0", float(self.v0))

    @classmethod
    def from_nests(cls, gamma, v_nested, v0=1.0, order=None) -> "NestedLogit":
        """Flatten per-nest attraction lists.

        ``order`` optionally lists ``(nest, position)`` pairs giving the
        instance ordering of the flattened products; default is nest-major.
        """
        pairs = [(i, j) for i, row in enumerate(v_nested) for j in range(len(row))]
        if order is not None:
            order = [tuple(p) for p in order]
            _require(sorted(order) == sorted(pairs), "nested_logit: order must be a permutation of (nest, product) pairs")
            pairs = order
        return cls(gamma, [i for i, _ in pairs], [v_nested[i][j] for i, j in pairs], v0)

    @property
    def n(self) -> int:
        return self.v.size

    @property
    def m(self) -> int:
        return self.gamma.size


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """Markov-chain choice model on states ``0..n`` (state 0 is the outside option).

    ``lambda_arrival[s]`` is the probability the consumer first considers
    state s; ``rho[s, t]`` the probability of moving from an unavailable
    product s to t. Row 0 must be absorbing.
    """

    lambda_arrival: np.ndarray
    rho: np.ndarray
    kind = "markov"

    def __post_init__(self):
        lam = _frozen(self.lambda_arrival)
        rho = _frozen(self.rho)
        n1 = lam.size
        _require(lam.ndim == 1 and n1 >= 2, "markov: lambda_arrival must cover the outside option and >= 1 product")
        _require(n1 - 1 <= MARKOV_MAX_N, f"markov: at most {MARKOV_MAX_N} products supported")
        _require(rho.shape == (n1, n1), "markov: rho must be (n+1) x (n+1)")
        _require(bool(np.all(lam >= 0)) and abs(lam.sum() - 1.0) <= SUM_TOL,
                 "markov: lambda_arrival must be a probability vector")
        _require(bool(np.all(rho >= 0)), "markov: transition probabilities must be non-negative")
        _require(bool(np.all(np.abs(rho.sum(axis=1) - 1.0) <= SUM_TOL)), "markov: rows of rho must sum to 1")
        _require(rho[0, 0] == 1.0, "markov: the outside state must be absorbing")
        inner = np.eye(n1 - 1) - rho[1:, 1:]
        _require(np.linalg.matrix_rank(inner) == n1 - 1,
                 "markov: chain must leave the product states with probability 1")
        object.__setattr__(self, "lambda_arrival", lam)
        object.__setattr__(self, "rho", rho)

    @property
    def n(self) -> int:
        return self.lambda_arrival.size - 1


@dataclass(frozen=True, eq=False)
class RCS:
    """Random consideration sets: independent attention coins plus a strict ranking.

    ``preference`` lists product ids from most to least preferred.
    """

    attention: np.ndarray
    preference: np.ndarray
    kind = "rcs"

    def __post_init__(self):
        att = _frozen(self.attention)
        pref = _frozen(self.preference, dtype=int)
        _require(att.ndim == 1, "rcs: attention must be a vector")
        _require(bool(np.all((att > 0) & (att < 1))), "rcs: attention probabilities must lie in (0, 1)")
        _require(sorted(pref.tolist()) == list(range(1, att.size + 1)),
                 "rcs: preference must be a permutation of the product ids")
        object.__setattr__(self, "attention", att)
        object.__setattr__(self, "preference", pref)

    @property
    def n(self) -> int:
        return self.attention.size


@dataclass(frozen=True, eq=False)
class SamplerRUM:
    """Random utility model given by a utility sampler.

    ``draw(rng, size)`` returns a ``(size, n + 1)`` array of utilities with
    column 0 the outside option. ``prob`` optionally maps a boolean offer
    matrix ``(K, n)`` to exact choice probabilities ``(K, n + 1)``; ``omega``
    optionally gives exact single-product purchase probabilities. When
    ``independent_b`` is true the purchase indicators are independent.
    """

    n_products: int
    draw: Callable[[np.random.Generator, int], np.ndarray]
    prob: Optional[Callable[[np.ndarray], np.ndarray]] = None
    omega: Optional[np.ndarray] = None
    independent_b: bool = False
    name: str = "sampler"
    kind = "sampler_rum"

    def __post_init__(self):
        _require(self.n_products >= 1, "sampler_rum: need at least one product")
        if self.omega is not None:
            om = _frozen(self.omega)
            _require(om.shape == (self.n_products,), "sampler_rum: omega has wrong length")
            object.__setattr__(self, "omega", om)

    @property
    def n(self) -> int:
        return self.n_products


ChoiceModel = Union[MNL, LCMNL, AlphaMNL, GAM, NestedLogit, MarkovChain, RCS, SamplerRUM]
MODEL_TYPES = (MNL, LCMNL, AlphaMNL, GAM, NestedLogit, MarkovChain, RCS, SamplerRUM)


def gumbel_outside_fixed(u: Sequence[float], u0: float = 0.0) -> SamplerRUM:
    """Independent Gumbel product utilities against a deterministic outside utility.

    The value gaps are independent, so purchase indicators are independent.
    Noise is mean-zero Gumbel, so choice probabilities have the closed form
    ``v_i / V(S) * (1 - exp(-V(S) e^{-u0 - gamma}))`` with ``v_i = e^{u_i}``
    and gamma the Euler constant.
    """
    u = np.asarray(u, dtype=float)
    v = np.exp(u)
    scale0 = np.exp(-u0 - np.euler_gamma)

    def draw(rng, size):
        out = np.empty((size, u.size + 1))
        out[:, 0] = u0
        out[:, 1:] = u + rng.gumbel(-np.euler_gamma, 1.0, size=(size, u.size))
        return out

    def prob(masks):
        masks = np.asarray(masks, dtype=bool)
        V = masks @ v
        buy = -np.expm1(-V * scale0)
        with np.errstate(invalid="ignore", divide="ignore"):
            share = np.where(V[:, None] > 0, masks * v / np.where(V > 0, V, 1.0)[:, None], 0.0)
        out = np.empty((masks.shape[0], u.size + 1))
        out[:, 1:] = share * buy[:, None]
        out[:, 0] = 1.0 - buy
        return out

    omega = -np.expm1(-v * scale0)
    return SamplerRUM(u.size, draw, prob=prob, omega=omega, independent_b=True,
                      name="gumbel-outside-fixed")


def normal_rum(u: Sequence[float], scale: float = 1.0) -> SamplerRUM:
    """Independent normal noise on every alternative, outside option included.

    Purchase indicators are dependent through the shared outside draw;
    choice probabilities are only available by simulation.
    """
    from scipy.stats import norm

    u = np.asarray(u, dtype=float)

    def draw(rng, size):
        out = scale * rng.standard_normal((size, u.size + 1))
        out[:, 1:] += u
        return out

    omega = norm.cdf(u / (scale * np.sqrt(2.0)))
    return SamplerRUM(u.size, draw, omega=omega, name="normal-rum")


@dataclass(frozen=True, eq=False)
class Instance:
    """Revenues sorted non-increasingly plus a choice model of matching dimension."""

    revenues: np.ndarray
    model: ChoiceModel = field(repr=False)

    def __post_init__(self):
        r = _frozen(self.revenues)
        _require(r.ndim == 1 and r.size >= 1, "instance: revenues must be a non-empty vector")
        _require(bool(np.all(np.isfinite(r))) and bool(np.all(r > 0)), "instance: revenues must be positive")
        _require(bool(np.all(np.diff(r) <= 0)), "instance: revenues must be sorted non-increasing")
        _require(isinstance(self.model, MODEL_TYPES), f"instance: unknown model type {type(self.model).__name__}")
        _require(self.model.n == r.size,
                 f"instance: model has {self.model.n} products but {r.size} revenues were given")
        object.__setattr__(self, "revenues", r)

    @property
    def n(self) -> int:
        return self.revenues.size

    @property
    def kind(self) -> str:
        return self.model.kind


def validate(model, n: int):
    """Return ``model`` if it is a valid choice model over ``n`` products.

    Dicts in the JSON model schema are parsed first.
    """
    if isinstance(model, dict):
        model = model_from_dict(model)
    if not isinstance(model, MODEL_TYPES):
        raise ModelError(f"unknown model type {type(model).__name__}")
    if model.n != n:
        raise ModelError(f"dimension mismatch: model has {model.n} products, expected {n}")
    return model


def is_regular(model) -> bool:
    """Whether choice probabilities are known to be weakly decreasing in the offer set."""
    if isinstance(model, AlphaMNL):
        return bool(np.all(model.alpha >= 1.0))
    if isinstance(model, NestedLogit):
        return bool(np.all(model.gamma <= 1.0))
    return True


def is_rum(model) -> bool:
    if isinstance(model, (AlphaMNL, GAM)):
        return False
    if isinstance(model, NestedLogit):
        return bool(np.all(model.gamma <= 1.0))
    return True


# ---------------------------------------------------------------------------
# JSON schema

def model_from_dict(d: dict[str, Any]):
    kind = d.get("kind")
    try:
        if kind == "mnl":
            return MNL(d["v"])
        if kind == "lcmnl":
            return LCMNL(d["theta"], d["v"])
        if kind == "alpha_mnl":
            base = d["base"]["v"] if "base" in d else d["v"]
            return AlphaMNL(d["alpha"], MNL(base))
        if kind == "gam":
            return GAM(d["v"], d["w"])
        if kind == "nested_logit":
            model = NestedLogit.from_nests(d["gamma"], d["v"], d.get("v0", 1.0), d.get("order"))
            if "m" in d:
                _require(int(d["m"]) == model.m, "nested_logit: m does not match len(gamma)")
            return model
        if kind == "markov":
            return MarkovChain(d["lambda_arrival"], d["rho"])
        if kind == "rcs":
            return RCS(d["attention"], d["preference"])
    except KeyError as exc:
        raise ModelError(f"{kind}: missing field {exc.args[0]!r}") from None
    raise ModelError(f"unknown model kind {kind!r}")


def model_to_dict(model) -> dict[str, Any]:
    if isinstance(model, MNL):
        return {"kind": "mnl", "v": model.v.tolist()}
    if isinstance(model, LCMNL):
        return {"kind": "lcmnl", "theta": model.theta.tolist(), "v": model.v.tolist()}
    if isinstance(model, AlphaMNL):
        return {"kind": "alpha_mnl", "alpha": model.alpha.tolist(), "base": {"v": model.v.tolist()}}
    if isinstance(model, GAM):
        return {"kind": "gam", "v": model.v.tolist(), "w": model.w.tolist()}
    if isinstance(model, NestedLogit):
        counts = [0] * model.m
        order, v_nested = [], [[] for _ in range(model.m)]
        for k, i in enumerate(model.nest.tolist()):
            order.append([i, counts[i]])
            counts[i] += 1
            v_nested[i].append(float(model.v[k]))
        return {"kind": "nested_logit", "m": model.m, "gamma": model.gamma.tolist(),
                "v": v_nested, "v0": model.v0, "order": order}
    if isinstance(model, MarkovChain):
        return {"kind": "markov", "lambda_arrival": model.lambda_arrival.tolist(), "rho": model.rho.tolist()}
    if isinstance(model, RCS):
        return {"kind": "rcs", "attention": model.attention.tolist(), "preference": model.preference.tolist()}
    raise ModelError(f"{type(model).__name__} has no JSON representation")


def instance_from_dict(d: dict[str, Any]) -> Instance:
    if "revenues" not in d or "model" not in d:
        raise ModelError("instance: expected keys 'revenues' and 'model'")
    model = model_from_dict(d["model"])
    return Instance(d["revenues"], validate(model, len(d["revenues"])))


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    return {"revenues": inst.revenues.tolist(), "model": model_to_dict(inst.model)}


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError(f"instance file is not valid JSON: {exc}") from None
    return instance_from_dict(data)


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=2), encoding="utf-8")
