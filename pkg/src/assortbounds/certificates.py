"""Sufficient conditions certifying ``R_bar <= f * R^o``.

Each check returns a :class:`Certificate`. ``holds`` means the condition
was verified and ``factor`` is the ratio bound it proves; factor 2 is the
prophet inequality itself, larger factors are weaker variants. When the
clairvoyant revenue has a closed form the bound is also checked directly
and the outcome recorded under ``witness["verified"]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .choice import choice_probs, derive_vectors, gam_to_alpha, last_choice, to_mask
from .clairvoyant import clairvoyant_exact, has_exact_clairvoyant
from .models import (
    GAM, LCMNL, MNL, AlphaMNL, Instance, ModelError, NestedLogit, is_regular, is_rum,
)
from .mnl import mnl_optimal, revenue_ordered

KINDS = ("ro-condition", "omega-condition", "phi-search", "phi-min", "alpha-mnl",
         "nested-logit", "lc-mnl", "lc-quick-phi", "log-ratio")
ALIASES = {"ro": "ro-condition", "omega": "omega-condition", "phi": "phi-search",
           "phi-min": "phi-min", "alpha": "alpha-mnl", "nl": "nested-logit", "lc": "lc-mnl",
           "lc-phi": "lc-quick-phi", "log": "log-ratio"}
COND_TOL = 1e-12
VERIFY_SLACK = 1e-9


@dataclass(frozen=True)
class Certificate:
    kind: str
    holds: bool
    factor: Optional[float]
    witness: dict = field(default_factory=dict, compare=False)

    @property
    def prophet(self) -> bool:
        """True when the plain factor-2 inequality is certified."""
        return self.holds and self.factor is not None and self.factor <= 2.0 + 1e-12


class IncompatibleCertificate(ModelError):
    pass


def _factor_from_phi(phi: float) -> Optional[float]:
    if not phi > 0:
        return None
    return 2.0 / min(phi, 1.0)


def _odds_condition(inst: Instance, omega: np.ndarray, phi: float):
    """Check ``O(i, S*_{phi omega}) >= phi omega_i`` on the auxiliary optimum."""
    sol = mnl_optimal(inst.revenues, phi * omega)
    S = sol.assortment
    p = choice_probs(inst.model, to_mask(S, inst.n))[0]
    if p[0] <= 0:
        return False, sol, {}
    margins = {i: float(p[i] / p[0] - phi * omega[i - 1]) for i in S}
    ok = all(m >= -COND_TOL * max(1.0, phi * omega[i - 1]) for i, m in margins.items())
    return ok, sol, margins


def phi_search(inst: Instance, grid=None, refine_tol: float = 1e-6):
    """Largest phi on a descending grid with ``O(i, S*_{phi omega}) >= phi omega_i``.

    The assortment ``S*_{phi omega}`` jumps as phi moves, so no monotonicity
    is assumed: the grid is scanned from the top and the first passing
    point is refined by bisection against the failing grid point above it.
    ``refine_tol = 0`` disables refinement. Returns ``(phi, certificate)``;
    phi is None when no grid point passes.
    """
    omega = last_choice(inst.model)
    if grid is None:
        grid = np.round(np.arange(100, 0, -1) * 0.01, 2)
    grid = sorted((float(g) for g in grid), reverse=True)
    prev_fail = None
    for phi in grid:
        ok, sol, margins = _odds_condition(inst, omega, phi)
        if ok:
            break
        prev_fail = phi
    else:
        return None, Certificate("phi-search", False, None,
                                 {"omega": omega, "grid_min": grid[-1] if grid else None})
    if refine_tol and prev_fail is not None:
        lo, hi = phi, prev_fail
        while hi - lo > refine_tol:
            mid = 0.5 * (lo + hi)
            ok_mid, sol_mid, margins_mid = _odds_condition(inst, omega, mid)
            if ok_mid:
                lo, sol, margins = mid, sol_mid, margins_mid
            else:
                hi = mid
        phi = lo
    witness = {"phi": phi, "omega": omega, "assortment": sol.assortment,
               "r_phi_omega": sol.tau_star, "margins": margins}
    return phi, Certificate("phi-search", True, _factor_from_phi(phi), witness)


def _require(cond: bool, kind: str, inst: Instance):
    if not cond:
        raise IncompatibleCertificate(f"certificate {kind!r} does not apply to a {inst.kind} model")


def _as_alpha(model) -> AlphaMNL:
    if isinstance(model, AlphaMNL):
        return model
    if isinstance(model, GAM):
        return gam_to_alpha(model)
    return AlphaMNL(np.ones(model.n), model)


def _as_lcmnl(model) -> LCMNL:
    return model if isinstance(model, LCMNL) else LCMNL([1.0], model.v[:, None])


def _certify(inst: Instance, kind: str) -> Certificate:
    r = inst.revenues
    model = inst.model

    if kind == "ro-condition":
        omega = last_choice(model)
        r_omega = mnl_optimal(r, omega)
        r_o = revenue_ordered(inst).revenue
        holds = r_omega.tau_star <= r_o * (1.0 + COND_TOL)
        return Certificate(kind, holds, 2.0 if holds else None,
                           {"omega": omega, "r_omega": r_omega.tau_star, "s_omega": r_omega.assortment, "r_o": r_o})

    if kind == "omega-condition":
        omega = last_choice(model)
        ok, sol, margins = _odds_condition(inst, omega, 1.0)
        return Certificate(kind, ok, 2.0 if ok else None,
                           {"omega": omega, "r_omega": sol.tau_star, "s_omega": sol.assortment, "margins": margins})

    if kind == "phi-search":
        return phi_search(inst)[1]

    if kind == "phi-min":
        _require(is_regular(model), kind, inst)
        d = derive_vectors(inst)
        ratios = d.lambda_first / (d.omega * (1.0 - d.omega))
        phi = float(ratios.min())
        lam_min = float(d.lambda_first.min())
        k_half = 0.5 / lam_min if lam_min > 0 else math.inf
        factor = _factor_from_phi(phi)
        return Certificate(kind, factor is not None, factor,
                           {"phi_min": phi, "argmin": int(ratios.argmin()) + 1, "k_over_2": k_half,
                            "lambda": d.lambda_first, "omega": d.omega})

    if kind == "alpha-mnl":
        _require(isinstance(model, (AlphaMNL, GAM, MNL)), kind, inst)
        am = _as_alpha(model)
        shaken = float(np.sum(np.clip(1.0 - am.alpha, 0.0, None) * am.v))
        phis = (1.0 + am.v) / (1.0 + shaken)
        phi = float(phis.min())
        omega = am.alpha * am.v / (1.0 + am.v)
        s_omega = mnl_optimal(r, omega).assortment
        idx = np.asarray(s_omega, dtype=int) - 1
        shaken_s = float(np.sum((1.0 - am.alpha[idx]) * am.v[idx]))
        local = bool(np.all(am.v[idx] >= shaken_s - COND_TOL)) if idx.size else True
        factor = 2.0 if local else _factor_from_phi(phi)
        return Certificate(kind, True, factor,
                           {"phi": phi, "alpha": am.alpha, "v": am.v, "s_omega": s_omega,
                            "support_condition": local})

    if kind == "nested-logit":
        _require(isinstance(model, NestedLogit), kind, inst)
        g = model.gamma[model.nest]
        nest_total = np.bincount(model.nest, weights=model.v, minlength=model.m)[model.nest]
        lhs = (model.v0 + model.v ** g) / model.v0
        rhs = np.where(g >= 1.0, 1.0, (nest_total / model.v) ** (1.0 - g))
        margins = lhs - rhs
        holds = bool(np.all(g >= 1.0)) or bool(np.all(margins >= -COND_TOL))
        return Certificate(kind, holds, 2.0 if holds else None,
                           {"margins": margins, "all_gamma_ge_1": bool(np.all(model.gamma >= 1.0))})

    if kind == "lc-mnl":
        _require(isinstance(model, (LCMNL, MNL)), kind, inst)
        lc = _as_lcmnl(model)
        omega = last_choice(lc)
        sol = mnl_optimal(r, omega)
        idx = np.asarray(sol.assortment, dtype=int) - 1
        m0 = 1.0 / (1.0 + lc.v[idx].sum(axis=0))          # M_j(0, S*_omega)
        margins = ((lc.v[idx] - omega[idx, None]) * m0 * lc.theta).sum(axis=1)
        holds = bool(np.all(margins >= -COND_TOL))
        return Certificate(kind, holds, 2.0 if holds else None,
                           {"omega": omega, "r_omega": sol.tau_star, "s_omega": sol.assortment,
                            "margins": dict(zip(sol.assortment, margins.tolist()))})

    if kind == "lc-quick-phi":
        _require(isinstance(model, (LCMNL, MNL)), kind, inst)
        lc = _as_lcmnl(model)
        omega = last_choice(lc)
        phi = float((lc.v.min(axis=1) / omega).min())
        return Certificate(kind, True, _factor_from_phi(phi), {"phi": phi, "v_min": lc.v.min(axis=1)})

    if kind == "log-ratio":
        _require(is_rum(model), kind, inst)
        factor = 1.0 + math.log(r[0] / r[-1])
        return Certificate(kind, True, factor, {"r1": float(r[0]), "rn": float(r[-1])})

    raise ValueError(f"unknown certificate kind {kind!r}; expected one of {KINDS}")


def certify(inst: Instance, kind: str, verify: bool = True) -> Certificate:
    kind = ALIASES.get(kind, kind)
    cert = _certify(inst, kind)
    if verify and cert.holds and has_exact_clairvoyant(inst):
        r_bar = clairvoyant_exact(inst).value
        r_o = cert.witness.get("r_o", None)
        if r_o is None:
            r_o = revenue_ordered(inst).revenue
        cert.witness.update(r_bar=r_bar, r_o=r_o, verified=bool(r_bar <= cert.factor * r_o + VERIFY_SLACK))
    return cert
