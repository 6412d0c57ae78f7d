"""Command-line entry point: ``robustlink <subcommand> --config scenario.json ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import verify as verify_mod
from .attack import run_attack
from .config import ConfigError, ScenarioConfig, load_config
from .damage import build_damage_graph
from .experiment import damage_table, fmt, plan_phase, run_experiment
from .graph import NodePair, read_graph, write_edge_list
from .loss import LossParams, calibrate_theta, total_loss
from .oracle import DIAGNOSTIC_COLUMNS
from .plans import AttackKind, DefensePlan
from .scenario import AttackerTypeSample, TargetSet, derive_rng, draw_sample

log = logging.getLogger("robustlink")


def _config(args) -> ScenarioConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_(seed=args.seed)
    return cfg


def _write_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def cmd_generate(args) -> int:
    cfg = _config(args)
    out = Path(args.out or "samples")
    out.mkdir(parents=True, exist_ok=True)
    count = args.count if args.count is not None else cfg.K
    for i in range(count):
        s = draw_sample(cfg, args.stream, i)
        header = (
            f"nodes: {s.graph.n}\nvd_size: {len(s.targets.vd)}\n"
            f"h_a: {s.h_a.a} {s.h_a.b}\nstream: {args.stream} {i}\nseed: {cfg.seed}"
        )
        write_edge_list(out / f"{args.stream}_{i:05d}.edges", s.graph.edges(), header)
    log.info("wrote %d samples to %s", count, out)
    return 0


def _read_sample(path: str) -> AttackerTypeSample:
    meta = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") and ":" in line:
                key, value = line[1:].split(":", 1)
                meta[key.strip()] = value.strip()
    for key in ("vd_size", "h_a"):
        if key not in meta:
            raise ConfigError(path, f"missing '# {key}:' header (write samples with 'generate')")
    g = read_graph(path)
    targets = TargetSet.from_graph(g, int(meta["vd_size"]))
    h_a = NodePair(*map(int, meta["h_a"].split()))
    return AttackerTypeSample(g, targets, h_a, 0, h_a in targets.labels)


def cmd_plan(args) -> int:
    cfg = _config(args)
    defense = args.defense or cfg.defenses[0]
    budgets = [args.budget] if args.budget is not None else cfg.resolved_budgets()
    if not budgets:
        raise ConfigError("budgets", "no budget given on the command line or in the config")
    cfg = cfg.with_(defenses=(defense,), budgets=tuple(budgets), budget_fractions=())
    _, params, _, plans, _ = plan_phase(cfg, args.jobs)
    log.info("theta=%s beta=%s", fmt(params.theta), fmt(params.beta))
    if len(plans) == 1:
        path = args.out or f"{defense}_{budgets[0]}.plan"
        plans[0][1].save(path)
        log.info("wrote %s", path)
        return 0
    out = Path(args.out or "plans")
    out.mkdir(parents=True, exist_ok=True)
    for (name, k), plan in plans:
        plan.save(out / f"{name}_{k}.plan")
    log.info("wrote %d plans to %s", len(plans), out)
    return 0


def _loss_params(cfg: ScenarioConfig) -> LossParams:
    if cfg.theta is not None:
        return LossParams(cfg.beta, cfg.theta)
    samples = [draw_sample(cfg, "plan", i) for i in range(cfg.K)]
    return LossParams(cfg.beta, calibrate_theta(((s.observed, s.targets) for s in samples), cfg.metric))


def cmd_attack(args) -> int:
    cfg = _config(args)
    s = _read_sample(args.graph)
    plan = DefensePlan.load(args.plan) if args.plan else None
    params = _loss_params(cfg)
    kind = AttackKind(args.kind)
    dg = build_damage_graph(s.observed, s.h_a, s.targets, cfg.metric, params, plan,
                            sign=cfg.damage_sign)
    rng = derive_rng(cfg.seed, "attack", kind.value, "cli")
    a = run_attack(kind, dg, cfg.metric, rng, cfg.randdel_p)
    before = total_loss(s.observed, s.targets, cfg.metric, params)
    after = total_loss(s.observed.delete_edges(a.deletions), s.targets, cfg.metric, params)
    header = (
        f"attack: {kind.value}\nh_a: {s.h_a.a} {s.h_a.b}\ndeletions: {len(a)}\n"
        f"loss_before: {fmt(before)}\nloss_after: {fmt(after)}"
    )
    if args.out:
        write_edge_list(args.out, a.deletions, header)
    print(f"{kind.value}: {len(a)} deletions, loss {fmt(before)} -> {fmt(after)}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    res = run_experiment(cfg, jobs=args.jobs, record_timing=args.timing)
    _write_text(res.to_csv(), args.out)
    if args.meta:
        Path(args.meta).write_text(json.dumps(res.meta, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_damage_table(args) -> int:
    cfg = _config(args)
    classes = args.classes.split(",")
    cfgs = [cfg.with_(scenario_class=c) for c in classes]
    rows = damage_table(cfgs, jobs=args.jobs)
    cols = ["scenario_class", "metric", "seed", "l0", "la", "percent_damage"]
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(
            fmt(r[c]) if isinstance(r[c], float) else str(r[c]) for c in cols
        ))
    _write_text("\n".join(lines) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    names = args.suites.split(",") if args.suites else list(verify_mod.SUITES)
    seed = args.seed or 0
    ok = True
    diagnostics = []
    for name in names:
        if name not in verify_mod.SUITES:
            raise ConfigError("suites", f"unknown suite {name!r}")
        res = verify_mod.SUITES[name](seed=seed)
        print(res.summary())
        for f in res.failures[:5]:
            print(f"  {f}")
        ok &= res.passed
        diagnostics.extend(res.diagnostics)
    if args.out and diagnostics:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=DIAGNOSTIC_COLUMNS, lineterminator="\n")
            w.writeheader()
            for row in diagnostics:
                w.writerow({k: fmt(v) if isinstance(v, float) else v for k, v in row.items()})
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario JSON file")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", help="output path (stdout or a default name when omitted)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="robustlink", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write sampled graphs as edge lists")
    g.add_argument("--count", type=int, help="number of samples (default: K)")
    g.add_argument("--stream", default="plan", choices=["plan", "eval"])
    g.set_defaults(func=cmd_generate, needs_config=True)

    pl = sub.add_parser("plan", parents=[common], help="compute a defense plan")
    pl.add_argument("--defense", choices=["idopt", "idrank", "ppn"])
    pl.add_argument("--budget", type=int)
    pl.set_defaults(func=cmd_plan, needs_config=True)

    a = sub.add_parser("attack", parents=[common], help="attack one sample graph")
    a.add_argument("--graph", required=True, help="sample written by 'generate'")
    a.add_argument("--plan", help="defense plan written by 'plan'")
    a.add_argument("--kind", default="linkdel", choices=[k.value for k in AttackKind])
    a.set_defaults(func=cmd_attack, needs_config=True)

    e = sub.add_parser("evaluate", parents=[common], help="full pipeline to CSV")
    e.add_argument("--timing", action="store_true", help="fill the wall_time column")
    e.add_argument("--meta", help="also write run metadata as JSON")
    e.set_defaults(func=cmd_evaluate, needs_config=True)

    d = sub.add_parser("damage-table", parents=[common], help="percent damage per scenario class")
    d.add_argument("--classes", default="TCA,RCA,TSA,RSA")
    d.set_defaults(func=cmd_damage_table, needs_config=True)

    v = sub.add_parser("verify", parents=[common], help="run the oracle cross-checks")
    v.add_argument("--suites", help=f"comma list from {','.join(verify_mod.SUITES)}")
    v.set_defaults(func=cmd_verify, needs_config=False)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.needs_config and not args.config:
        print(f"robustlink {args.command}: --config is required", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
