"""Seeded instance generation and scenario runners for the computational studies.

Instances are LC-MNL models whose utilities are scaled by a noise parameter
beta: small beta spreads attractions apart, large beta pushes them all
toward 1. Each instance has its own Philox stream whose key is derived from
``(master_seed, n, m, index)`` through ``SeedSequence``, so an instance
does not depend on which others were generated or in which process.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Optional, Sequence

import numpy as np

from .bounds import HEURISTIC_KEYS, heuristic_suite
from .certificates import certify
from .clairvoyant import clairvoyant_exact
from .mnl import brute_force_taop, revenue_ordered
from .models import LCMNL, Instance, ModelError
from .personalization import ptaop

R_MIN, R_MAX = 1.0, 10.0
BETA_MAX_N = 15
CARDINALITY_MAX_N = 14
COP_FILTER = 0.05
PCT_SLACK = 1e-7
CSV_COLUMNS = ("n", "m", "beta", "seed", "r_o", "r_star", "ptaop", "clairvoyant",
               "taop_pct", "ptaop_pct", "clairvoyant_pct", "cert_lc")


@dataclass(frozen=True)
class RtInstanceSpec:
    n: int
    m: int
    beta: float
    seed: int


def instance_seed(master_seed: int, n: int, m: int, index: int) -> int:
    """Per-instance 32-bit key derived from the master seed and the cell coordinates."""
    return int(np.random.SeedSequence([master_seed, n, m, index]).generate_state(1)[0])


def gen_rt_instance(spec: RtInstanceSpec) -> Instance:
    """LC-MNL instance with uniform segment weights and revenues spanning [1, 10]."""
    n, m, beta = spec.n, spec.m, spec.beta
    if n < 2 or m < 1:
        raise ModelError(f"need n >= 2 and m >= 1 (got n={n}, m={m})")
    if not beta > 0:
        raise ModelError(f"beta must be positive (got {beta})")
    rng = np.random.Generator(np.random.Philox(spec.seed))
    ell = 10.0 * (1.0 - rng.random((n, m)))          # (0, 10]
    sigma = 1.0 - rng.random(n)                       # (0, 1]
    down = rng.random((n, m)) < 0.5
    scale = np.where(down, 1.0 - sigma[:, None], 1.0 + sigma[:, None])
    a = np.log(scale * ell / n)
    v = np.exp(a / beta)
    interior = np.sort(rng.uniform(R_MIN, R_MAX, n - 2))[::-1]
    revenues = np.concatenate(([R_MAX], interior, [R_MIN]))
    return Instance(revenues, LCMNL(np.full(m, 1.0 / m), v))


# ---------------------------------------------------------------------------
# clairvoyant / personalization scenarios

@dataclass(frozen=True)
class ScenarioRow:
    n: int
    m: int
    beta: float
    seed: int
    r_o: float
    r_star: float
    ptaop: float
    clairvoyant: float
    taop_pct: float
    ptaop_pct: float
    clairvoyant_pct: float
    cert_lc: bool


@dataclass(frozen=True)
class CellSummary:
    n: int
    m: int
    count: int
    avg: dict
    max: dict
    cert_fraction: float


@dataclass(frozen=True)
class ScenarioReport:
    beta: float
    rows: tuple
    cells: tuple = field(default=())

    @property
    def cert_fraction(self) -> float:
        if not self.rows:
            return 0.0
        return sum(r.cert_lc for r in self.rows) / len(self.rows)

    @property
    def max_clairvoyant_pct(self) -> float:
        return max((r.clairvoyant_pct for r in self.rows), default=0.0)

    def cell(self, n: int, m: int) -> CellSummary:
        for c in self.cells:
            if (c.n, c.m) == (n, m):
                return c
        raise KeyError((n, m))


def evaluate_beta_instance(spec: RtInstanceSpec) -> ScenarioRow:
    inst = gen_rt_instance(spec)
    r_o = revenue_ordered(inst).revenue
    r_star = brute_force_taop(inst).revenue
    p = ptaop(inst)
    r_bar = clairvoyant_exact(inst).value
    cert = certify(inst, "lc-mnl", verify=False).holds
    pct = lambda x: 100.0 * x / r_o
    return ScenarioRow(spec.n, spec.m, spec.beta, spec.seed, r_o, r_star, p, r_bar,
                       pct(r_star), pct(p), pct(r_bar), cert)


def _map(func, items: Sequence, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * workers))))


def _specs(n_list, m_list, beta, count, seed):
    if count < 1:
        raise ValueError("instances per cell must be at least 1")
    return [RtInstanceSpec(int(n), int(m), float(beta), instance_seed(seed, n, m, idx))
            for n in n_list for m in m_list for idx in range(count)]


_PCT_KEYS = ("taop_pct", "ptaop_pct", "clairvoyant_pct")


def _summarize(rows: Sequence[ScenarioRow]) -> tuple:
    cells = {}
    for row in rows:
        cells.setdefault((row.n, row.m), []).append(row)
    out = []
    for (n, m), group in cells.items():
        avg = {k: float(np.mean([getattr(r, k) for r in group])) for k in _PCT_KEYS}
        mx = {k: float(np.max([getattr(r, k) for r in group])) for k in _PCT_KEYS}
        frac = sum(r.cert_lc for r in group) / len(group)
        out.append(CellSummary(n, m, len(group), avg, mx, frac))
    return tuple(out)


def run_beta_scenario(n_list: Iterable[int], m_list: Iterable[int], beta: float,
                      instances_per_cell: int, seed: int, workers: int = 1) -> ScenarioReport:
    """Revenue-ordered, TAOP, p-TAOP and clairvoyant revenues over a grid of (n, m) cells.

    Raises ``AssertionError`` if an instance that passes the LC-MNL
    certificate has a clairvoyant revenue above twice the revenue-ordered
    one; uncertified instances are only reported.
    """
    n_list, m_list = list(n_list), list(m_list)
    if max(n_list) > BETA_MAX_N:
        raise ValueError(f"brute-force reference limited to n <= {BETA_MAX_N}")
    specs = _specs(n_list, m_list, beta, instances_per_cell, seed)
    rows = tuple(_map(evaluate_beta_instance, specs, workers))
    for row in rows:
        if row.cert_lc and row.clairvoyant_pct > 200.0 + PCT_SLACK:
            raise AssertionError(f"certified instance exceeds factor 2: {row}")
    return ScenarioReport(float(beta), rows, _summarize(rows))


def _fmt_float(x: float) -> str:
    return repr(float(x))


def emit_csv(report: ScenarioReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in report.rows:
            writer.writerow([row.n, row.m, _fmt_float(row.beta), row.seed,
                             *(_fmt_float(getattr(row, c)) for c in CSV_COLUMNS[4:11]),
                             int(row.cert_lc)])


def read_csv(path) -> tuple:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        rows = []
        for rec in reader:
            rows.append(ScenarioRow(int(rec[0]), int(rec[1]), float(rec[2]), int(rec[3]),
                                    *(float(x) for x in rec[4:11]), bool(int(rec[11]))))
    return tuple(rows)


def format_scenario(report: ScenarioReport) -> str:
    lines = [f"beta = {report.beta:g}",
             f"{'n':>3} {'m':>3} {'count':>5}  {'taop avg':>9} {'ptaop avg':>9} {'clair avg':>9}"
             f"  {'taop max':>9} {'ptaop max':>9} {'clair max':>9}  {'cert':>5}"]
    for c in report.cells:
        lines.append(f"{c.n:>3} {c.m:>3} {c.count:>5}  "
                     + " ".join(f"{c.avg[k]:>9.2f}" for k in _PCT_KEYS) + "  "
                     + " ".join(f"{c.max[k]:>9.2f}" for k in _PCT_KEYS)
                     + f"  {c.cert_fraction:>5.2f}")
    lines.append(f"max clairvoyant_pct = {report.max_clairvoyant_pct:.2f}; "
                 f"lc certificate holds on {report.cert_fraction:.1%} of instances")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# cardinality-constrained heuristics

@dataclass(frozen=True)
class CardinalityRow:
    n: int
    m: int
    seed: int
    k: int
    ratios: dict
    max_h_ratio: float
    cop: Optional[float]
    baseline_gap: float
    guarantee: float


@dataclass(frozen=True)
class CardinalityCell:
    n: int
    m: int
    count: int
    avg_ratios: dict
    avg_max_h: float
    avg_cop: Optional[float]
    cop_count: int
    avg_guarantee: float


@dataclass(frozen=True)
class CardinalityTable:
    rows: tuple
    cells: tuple


def evaluate_cardinality_instance(spec: RtInstanceSpec) -> CardinalityRow:
    inst = gen_rt_instance(spec)
    k = math.ceil(spec.n / 3)
    rep = heuristic_suite(inst, k)
    ratios = {key: rep.ratio(key) for key in HEURISTIC_KEYS}
    gap = (rep.optimum - rep.baseline) / rep.optimum if rep.optimum > 0 else 0.0
    return CardinalityRow(spec.n, spec.m, spec.seed, k, ratios, rep.ratio("max_h"), rep.cop,
                          gap, rep.guarantee)


def run_cardinality_experiment(n_list: Iterable[int], m_list: Iterable[int], instances_per_cell: int,
                               seed: int, beta: float = 1.0, workers: int = 1) -> CardinalityTable:
    """Auxiliary-MNL heuristics under ``|S| <= ceil(n/3)`` relative to the brute-force optimum.

    COP averages only use instances whose mixture-MNL baseline is more than
    5% below the optimum.
    """
    n_list, m_list = list(n_list), list(m_list)
    if max(n_list) > CARDINALITY_MAX_N:
        raise ValueError(f"brute-force reference limited to n <= {CARDINALITY_MAX_N}")
    specs = _specs(n_list, m_list, beta, instances_per_cell, seed)
    rows = tuple(_map(evaluate_cardinality_instance, specs, workers))
    groups = {}
    for row in rows:
        groups.setdefault((row.n, row.m), []).append(row)
    cells = []
    for (n, m), group in groups.items():
        avg = {key: float(np.mean([r.ratios[key] for r in group])) for key in HEURISTIC_KEYS}
        cops = [r.cop for r in group if r.cop is not None and r.baseline_gap > COP_FILTER]
        cells.append(CardinalityCell(n, m, len(group), avg,
                                     float(np.mean([r.max_h_ratio for r in group])),
                                     float(np.mean(cops)) if cops else None, len(cops),
                                     float(np.mean([r.guarantee for r in group]))))
    return CardinalityTable(rows, tuple(cells))


def format_cardinality(table: CardinalityTable) -> str:
    keys = HEURISTIC_KEYS
    lines = [f"{'n':>3} {'m':>3} {'count':>5}  " + " ".join(f"{'S_' + k:>8}" for k in keys)
             + f" {'Max-H':>8} {'COP':>8} {'#COP':>5} {'guar':>8}"]
    for c in table.cells:
        cop = "-" if c.avg_cop is None else f"{c.avg_cop:.4f}"
        lines.append(f"{c.n:>3} {c.m:>3} {c.count:>5}  " + " ".join(f"{c.avg_ratios[k]:>8.4f}" for k in keys)
                     + f" {c.avg_max_h:>8.4f} {cop:>8} {c.cop_count:>5} {c.avg_guarantee:>8.4f}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# config files

_CONFIG_KEYS = {"n_list", "m_list", "beta", "instances", "seed"}


def load_config(path) -> dict:
    """Read ``{"n_list", "m_list", "beta", "instances", "seed"}``; beta may be omitted for cardinality runs."""
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ModelError("config must be a JSON object")
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise ModelError(f"unknown config keys: {sorted(unknown)}")
    for key in ("n_list", "m_list", "instances", "seed"):
        if key not in cfg:
            raise ModelError(f"config is missing {key!r}")
    if not cfg["n_list"] or not cfg["m_list"]:
        raise ModelError("n_list and m_list must be non-empty")
    if int(cfg["instances"]) < 1:
        raise ModelError("instances must be at least 1")
    return cfg


def row_dict(row) -> dict:
    return {f.name: getattr(row, f.name) for f in fields(row)}
