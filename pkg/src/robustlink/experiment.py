"""Monte-Carlo evaluation of defenses against simulated attacks."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .attack import run_attack
from .config import ScenarioConfig
from .damage import DamageGraph, build_damage_graph
from .defense import CriticalEdgeSet, idopt, idrank, ppn
from .loss import LossParams, UndefinedDPR, calibrate_theta, dpr, total_loss
from .plans import AttackKind, DefensePlan
from .scenario import AttackerTypeSample, derive_rng, draw_sample

log = logging.getLogger(__name__)

COLUMNS = [
    "scenario_class", "metric", "attack", "defense", "k_D", "seed",
    "l0", "la", "ld", "dpr", "wall_time",
]
UNDEFINED = "undefined"


def fmt(x: float) -> str:
    return f"{x:.12g}"


@dataclass
class Row:
    scenario_class: str
    metric: str
    attack: str
    defense: str
    k_D: int
    seed: int
    l0: float
    la: float
    ld: float
    dpr: float | None
    wall_time: float | None = None

    def as_csv(self) -> dict:
        return {
            "scenario_class": self.scenario_class,
            "metric": self.metric,
            "attack": self.attack,
            "defense": self.defense,
            "k_D": self.k_D,
            "seed": self.seed,
            "l0": fmt(self.l0),
            "la": fmt(self.la),
            "ld": fmt(self.ld),
            "dpr": UNDEFINED if self.dpr is None else fmt(self.dpr),
            "wall_time": "" if self.wall_time is None else f"{self.wall_time:.3f}",
        }


@dataclass
class ExperimentResult:
    rows: list[Row]
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row.as_csv())
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())

    def select(self, **match) -> list[Row]:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in match.items())]


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def _draw(args) -> AttackerTypeSample:
    cfg, stream, i = args
    return draw_sample(cfg, stream, i)


def _damage(args) -> DamageGraph:
    cfg, sample, params = args
    return build_damage_graph(
        sample.observed, sample.h_a, sample.targets, cfg.metric, params,
        sample_index=sample.index, sign=cfg.damage_sign,
    )


def _evaluate_one(args) -> dict:
    """Losses of one evaluation sample under every attack and plan.

    Each (attack, plan) pair replays the same attack coin stream.
    """
    cfg, i, params, plans = args
    s = draw_sample(cfg, "eval", i)
    m = cfg.metric
    dg = build_damage_graph(s.observed, s.h_a, s.targets, m, params, sample_index=i,
                            sign=cfg.damage_sign)
    out = {"l0": total_loss(s.observed, s.targets, m, params), "la": {}, "ld": {},
           "overlap": s.overlaps_target}
    for attack in cfg.attacks:
        def attacked_loss(plan: DefensePlan | None) -> float:
            rng = derive_rng(cfg.seed, "attack", attack, i)
            view = dg.with_protection(plan) if plan is not None else dg
            a = run_attack(attack, view, m, rng, cfg.randdel_p)
            return total_loss(s.observed.delete_edges(a.deletions), s.targets, m, params)

        out["la"][attack] = attacked_loss(None)
        for key, plan in plans:
            out["ld"][(attack, *key)] = attacked_loss(plan)
    return out


def calibrate(cfg: ScenarioConfig, samples: Sequence[AttackerTypeSample]) -> float:
    return calibrate_theta(((s.observed, s.targets) for s in samples), cfg.metric)


def make_plans(
    cfg: ScenarioConfig,
    dgs: Sequence[DamageGraph],
    samples: Sequence[AttackerTypeSample],
) -> tuple[list[tuple[tuple[str, int], DefensePlan]], dict]:
    """One plan per configured defense and budget, in config order then ascending budget."""
    plans = []
    timing = {}
    critical = None
    for name in cfg.defenses:
        for k in cfg.resolved_budgets():
            t0 = time.perf_counter()
            if name == "idopt":
                plan = idopt(dgs, k, cfg.solver.max_nodes, cfg.solver.time_limit)
            elif name == "idrank":
                plan = idrank(dgs, k)
            elif name == "ppn":
                if critical is None:
                    critical = CriticalEdgeSet.from_graphs(
                        (s.observed for s in samples), samples[0].targets.vd
                    )
                plan = ppn(critical, k, derive_rng(cfg.seed, "ppn", k))
            else:
                raise ValueError(f"unknown defense {name!r}")
            timing[(name, k)] = time.perf_counter() - t0
            plans.append(((name, k), plan))
    return plans, timing


def raw_protection_count(plan: DefensePlan, dgs: Sequence[DamageGraph]) -> int:
    """Protected edges counted once per planning sample they appear in."""
    return sum(1 for dg in dgs for e in set(dg.edges()) if e in plan.protected)


def plan_phase(cfg: ScenarioConfig, jobs: int = 1):
    """Planning samples, the calibrated loss, their damage graphs and all plans."""
    samples = _pmap(_draw, [(cfg, "plan", i) for i in range(cfg.K)], jobs)
    theta = cfg.theta if cfg.theta is not None else calibrate(cfg, samples)
    params = LossParams(cfg.beta, theta)
    dgs = _pmap(_damage, [(cfg, s, params) for s in samples], jobs)
    plans, timing = make_plans(cfg, dgs, samples)
    return samples, params, dgs, plans, timing


def evaluate_plans(cfg: ScenarioConfig, params, plans, jobs: int = 1) -> list[dict]:
    """Per-sample losses on the evaluation stream for every attack and plan.

    ``plans`` is a list of ``((name, k_D), DefensePlan)``. Each entry of the
    result holds ``l0``, ``la[attack]`` and ``ld[(attack, name, k_D)]``.
    """
    return _pmap(
        _evaluate_one,
        [(cfg, i, params, plans) for i in range(cfg.num_eval_attacks)],
        jobs,
    )


def run_experiment(
    cfg: ScenarioConfig, jobs: int = 1, record_timing: bool = False
) -> ExperimentResult:
    """Plan on ``cfg.K`` samples, then replay ``cfg.num_eval_attacks`` fresh attacks.

    Rows come per attack: first the undefended baseline (``defense="none"``),
    then every configured defense by ascending budget.
    """
    t_start = time.perf_counter()
    samples, params, dgs, plans, timing = plan_phase(cfg, jobs)
    log.info("planned %d defenses on %d samples (theta=%.6g)", len(plans), len(dgs), params.theta)

    per_sample = evaluate_plans(cfg, params, plans, jobs)
    l0 = math.fsum(r["l0"] for r in per_sample)
    rows = []
    cls, metric = cfg.scenario_class, cfg.metric.value

    def _dpr(la, ld):
        try:
            return dpr(l0, la, ld) + 0.0  # no "-0" in the output
        except UndefinedDPR:
            return None

    for attack in cfg.attacks:
        la = math.fsum(r["la"][attack] for r in per_sample)
        rows.append(Row(cls, metric, attack, "none", 0, cfg.seed, l0, la, la, _dpr(la, la),
                        0.0 if record_timing else None))
        for (name, k), _plan in plans:
            ld = math.fsum(r["ld"][(attack, name, k)] for r in per_sample)
            rows.append(Row(cls, metric, attack, name, k, cfg.seed, l0, la, ld, _dpr(la, ld),
                            timing[(name, k)] if record_timing else None))

    meta = {
        "theta": params.theta,
        "beta": params.beta,
        "candidate_universe": cfg.candidate_universe,
        "budgets": cfg.resolved_budgets(),
        "overlapping_eval_samples": sum(1 for r in per_sample if r["overlap"]),
        "plans": [
            {
                "defense": name,
                "k_D": k,
                "protected": len(plan),
                "protected_raw": raw_protection_count(plan, dgs),
                **{key: v for key, v in plan.info.items() if isinstance(v, (int, float, str))},
            }
            for (name, k), plan in plans
        ],
    }
    if record_timing:
        meta["wall_time"] = time.perf_counter() - t_start
    return ExperimentResult(rows, meta)


def percent_damage(cfg: ScenarioConfig, jobs: int = 1) -> tuple[float, ExperimentResult]:
    """``100 * (LA - L0) / L0`` under LinkDel with no defense."""
    cfg = cfg.with_(defenses=(), attacks=(AttackKind.LINKDEL.value,))
    res = run_experiment(cfg, jobs)
    row = res.rows[0]
    return 100.0 * (row.la - row.l0) / row.l0, res


def damage_table(
    cfgs: Sequence[ScenarioConfig], jobs: int = 1
) -> list[dict]:
    """Percent damage per scenario class and metric."""
    table = []
    for cfg in cfgs:
        pct, res = percent_damage(cfg, jobs)
        row = res.rows[0]
        table.append({
            "scenario_class": cfg.scenario_class,
            "metric": cfg.metric.value,
            "seed": cfg.seed,
            "l0": row.l0,
            "la": row.la,
            "percent_damage": pct,
        })
    return table
