"""Command-line front end: ``python -m assortbounds <command> ...``.

Exit status is 0 on success, 2 when the input fails validation and 1 for
any other runtime failure. Text output rounds to 6 significant digits;
``--json`` prints the same quantities at full precision.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import experiments as ex
from .bounds import bound_chain, constrained_bounds, heuristic_suite
from .certificates import ALIASES, certify
from .clairvoyant import clairvoyant, lai_robbins_bound
from .choice import last_choice
from .mnl import (
    CardinalityOracle, brute_force_constrained, brute_force_taop, mnl_constrained, mnl_optimal,
    revenue_ordered,
)
from .models import MNL, ModelError, load_instance
from .personalization import cap_brute, clairvoyant_cap_brute, log_ratio_bound, ptaop
from .pricing import mnl_pricing, unbounded_example


def _num(x) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.6g}"


def _set(S) -> str:
    return "{" + ", ".join(str(i) for i in S) + "}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _emit(args, lines: list[str], payload: dict) -> None:
    if args.json:
        print(json.dumps(_jsonable(payload), indent=2))
    else:
        print("\n".join(lines))


def _need_k(args) -> int:
    if args.k is None:
        raise ModelError("--k is required for this command")
    if args.k < 0:
        raise ModelError("--k must be non-negative")
    return args.k


def cmd_solve(args) -> None:
    inst = load_instance(args.instance)
    if args.method == "brute":
        res = brute_force_taop(inst)
        S, val = res.assortment, res.revenue
    elif args.method == "revenue-ordered":
        res = revenue_ordered(inst)
        S, val = res.assortment, res.revenue
    elif args.method == "mnl":
        if not isinstance(inst.model, MNL):
            raise ModelError("--method mnl needs an MNL instance")
        res = mnl_optimal(inst.revenues, inst.model.v)
        S, val = res.assortment, res.tau_star
    else:
        k = _need_k(args)
        if isinstance(inst.model, MNL):
            res = mnl_constrained(inst.revenues, inst.model.v, CardinalityOracle(k))
            S, val = res.assortment, res.tau_star
        else:
            res = brute_force_constrained(inst, k)
            S, val = res.assortment, res.revenue
    _emit(args, [f"method: {args.method}", f"revenue: {_num(val)}", f"assortment: {_set(S)}"],
          {"method": args.method, "revenue": val, "assortment": list(S)})


def cmd_bounds(args) -> None:
    inst = load_instance(args.instance)
    chain = bound_chain(inst, with_exact=inst.n <= 16)
    names = ("r_lambda", "r_a", "r_o", "r_star", "r_b", "r_omega_over_lambda0")
    lines = [f"{name}: {_num(getattr(chain, name))}" for name in names]
    lines.append(f"ordered: {chain.ordered()}")
    payload = {name: getattr(chain, name) for name in names}
    payload.update(ordered=chain.ordered(), assortments=chain.assortments)
    _emit(args, lines, payload)


def cmd_constrained(args) -> None:
    inst = load_instance(args.instance)
    k = _need_k(args)
    ra, rb, guarantee = constrained_bounds(inst, k)
    lines = [f"k: {k}", f"R^k_a: {_num(ra)}", f"R^k_b: {_num(rb)}", f"guarantee: {_num(guarantee)}"]
    payload = {"k": k, "r_k_a": ra, "r_k_b": rb, "guarantee": guarantee}
    if k >= 1:
        rep = heuristic_suite(inst, k, with_exact=inst.n <= 16)
        for key, val in rep.revenues.items():
            lines.append(f"S^k_{key}: {_num(val)} {_set(rep.assortments[key])}")
        lines += [f"max_h: {_num(rep.max_h)} ({rep.max_h_key})", f"optimum: {_num(rep.optimum)}",
                  f"baseline: {_num(rep.baseline)}", f"cop: {_num(rep.cop)}"]
        payload.update(heuristics=rep.revenues, assortments=rep.assortments, max_h=rep.max_h,
                       max_h_key=rep.max_h_key, optimum=rep.optimum, baseline=rep.baseline, cop=rep.cop)
    _emit(args, lines, payload)


def cmd_clairvoyant(args) -> None:
    inst = load_instance(args.instance)
    res = clairvoyant(inst, samples=args.samples, seed=args.seed)
    omega = last_choice(inst.model)
    bound = lai_robbins_bound(omega, inst.revenues)
    r_o = revenue_ordered(inst).revenue
    lines = [f"clairvoyant: {_num(res.value)} ({res.method})"]
    if res.std_error is not None:
        lines.append(f"std_error: {_num(res.std_error)}")
    lines += [f"lai_robbins (2 R*_omega): {_num(bound)}", f"r_o: {_num(r_o)}",
              f"ratio to r_o: {_num(res.value / r_o)}"]
    _emit(args, lines, {"clairvoyant": res.value, "method": res.method, "std_error": res.std_error,
                        "lai_robbins": bound, "r_o": r_o, "ratio": res.value / r_o})


def cmd_certify(args) -> None:
    inst = load_instance(args.instance)
    cert = certify(inst, args.kind)
    verdict = f"holds, factor {_num(cert.factor)}" if cert.holds else "inconclusive"
    lines = [f"{cert.kind}: {verdict}"]
    for key in ("phi", "phi_min", "k_over_2", "r_omega", "r_o", "r_bar", "verified"):
        if key in cert.witness:
            lines.append(f"{key}: {_num(cert.witness[key])}")
    _emit(args, lines, {"kind": cert.kind, "holds": cert.holds, "factor": cert.factor,
                        "witness": cert.witness})


def cmd_personalize(args) -> None:
    inst = load_instance(args.instance)
    p = ptaop(inst)
    bound = log_ratio_bound(inst)
    lines = [f"ptaop: {_num(p)}", f"log_ratio_bound: {_num(bound)}"]
    payload = {"ptaop": p, "log_ratio_bound": bound}
    if args.k is not None:
        k = _need_k(args)
        cap = cap_brute(inst, k)
        ccap = clairvoyant_cap_brute(inst, k)
        lines += [f"cap: {_num(cap.value)} T = {_set(cap.first_stage)}",
                  f"clairvoyant_cap: {_num(ccap.value)} T = {_set(ccap.first_stage)}"]
        payload.update(cap=cap.value, cap_first_stage=cap.first_stage, cap_per_segment=cap.per_segment,
                       clairvoyant_cap=ccap.value, clairvoyant_cap_first_stage=ccap.first_stage)
    _emit(args, lines, payload)


def cmd_pricing(args) -> None:
    if (args.V is None) == (args.a is None):
        raise ModelError("give exactly one of --V or --a")
    if args.V is not None:
        try:
            res = mnl_pricing(args.V)
        except ValueError as exc:
            raise ModelError(str(exc)) from None
        lines = [f"p_star: {_num(res.p_star)}", f"r_star: {_num(res.r_star)}",
                 f"r_clairvoyant: {_num(res.r_clairvoyant)}", f"ratio: {_num(res.ratio)}"]
        payload = {"p_star": res.p_star, "r_star": res.r_star, "r_clairvoyant": res.r_clairvoyant,
                   "ratio": res.ratio}
    else:
        try:
            rc, rs, ratio = unbounded_example(args.a)
        except ValueError as exc:
            raise ModelError(str(exc)) from None
        lines = [f"r_clairvoyant: {_num(rc)}", f"r_star: {_num(rs)}", f"ratio: {_num(ratio)}"]
        payload = {"r_clairvoyant": rc, "r_star": rs, "ratio": ratio}
    _emit(args, lines, payload)


def _experiment_params(args):
    cfg = ex.load_config(args.config) if args.config else {}
    n_list = args.n or cfg.get("n_list")
    m_list = args.m or cfg.get("m_list")
    count = args.count if args.count is not None else cfg.get("instances")
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    beta = args.beta if args.beta is not None else cfg.get("beta")
    if not n_list or not m_list or count is None:
        raise ModelError("experiment needs --n, --m and --count (or a --config file)")
    return [int(n) for n in n_list], [int(m) for m in m_list], int(count), int(seed), beta


def cmd_experiment(args) -> None:
    n_list, m_list, count, seed, beta = _experiment_params(args)
    if args.which == "beta":
        if beta is None:
            raise ModelError("experiment beta needs --beta")
        report = ex.run_beta_scenario(n_list, m_list, float(beta), count, seed, workers=args.workers)
        if args.csv:
            ex.emit_csv(report, args.csv)
        if args.json:
            print(json.dumps(_jsonable({
                "beta": report.beta,
                "cells": [ex.row_dict(c) for c in report.cells],
                "cert_fraction": report.cert_fraction,
                "max_clairvoyant_pct": report.max_clairvoyant_pct,
                "rows": [ex.row_dict(r) for r in report.rows]}), indent=2))
        else:
            print(ex.format_scenario(report))
    else:
        table = ex.run_cardinality_experiment(n_list, m_list, count, seed,
                                              beta=1.0 if beta is None else float(beta), workers=args.workers)
        if args.json:
            print(json.dumps(_jsonable({"cells": [ex.row_dict(c) for c in table.cells],
                                        "rows": [ex.row_dict(r) for r in table.rows]}), indent=2))
        else:
            print(ex.format_cardinality(table))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="assortbounds",
                                     description="Assortment bounds, clairvoyant revenue and certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, instance=True):
        p = sub.add_parser(name, help=help_)
        if instance:
            p.add_argument("--instance", required=True, help="instance JSON file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    p = add("solve", cmd_solve, "optimal or heuristic assortment")
    p.add_argument("--method", choices=("brute", "revenue-ordered", "mnl", "constrained"), default="brute")
    p.add_argument("--k", type=int)

    add("bounds", cmd_bounds, "auxiliary-MNL bound chain")

    p = add("constrained", cmd_constrained, "cardinality-constrained bounds and heuristics")
    p.add_argument("--k", type=int)

    p = add("clairvoyant", cmd_clairvoyant, "clairvoyant revenue")
    p.add_argument("--samples", type=int, default=10 ** 6)
    p.add_argument("--seed", type=int, default=0)

    p = add("certify", cmd_certify, "prophet-inequality certificates")
    p.add_argument("--kind", choices=tuple(ALIASES), required=True)

    p = add("personalize", cmd_personalize, "p-TAOP and customized assortments")
    p.add_argument("--k", type=int)

    p = add("pricing", cmd_pricing, "uniform vs clairvoyant pricing", instance=False)
    p.add_argument("--V", type=float, help="total MNL attraction at price zero")
    p.add_argument("--a", type=float, help="parameter of the single-product unbounded example")

    p = add("experiment", cmd_experiment, "seeded scenario runners", instance=False)
    p.add_argument("which", choices=("beta", "cardinality"))
    p.add_argument("--beta", type=float)
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--m", type=int, nargs="+")
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--csv")
    p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ModelError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
