"""Scenario configuration files (JSON)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .damage import AFTER_MINUS_BEFORE, BEFORE_MINUS_AFTER
from .metrics import MetricKind
from .plans import AttackKind
from .scenario import CLUSTER_POOL_FACTOR, BASource, EdgeListSource, GraphSource, PowerLawSource, ScenarioClass

DEFENSE_KINDS = ("idopt", "idrank", "ppn")


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class SolverLimits:
    max_nodes: int | None = 2000
    time_limit: float | None = 10.0


@dataclass(frozen=True)
class ScenarioConfig:
    source: GraphSource
    scenario_class: str = "TCA"
    vd_size: int = 10
    cluster_pool: float = CLUSTER_POOL_FACTOR
    seed: int = 0
    K: int = 100
    num_eval_attacks: int = 100
    metric: MetricKind = MetricKind.COMMON_NEIGHBORS
    beta: float = 2.0
    theta: float | None = None  # None: calibrate on the planning samples
    budgets: tuple[int, ...] = ()
    budget_fractions: tuple[float, ...] = ()
    attacks: tuple[str, ...] = ("linkdel",)
    defenses: tuple[str, ...] = DEFENSE_KINDS
    randdel_p: float = 0.5
    solver: SolverLimits = field(default_factory=SolverLimits)
    damage_sign: str = AFTER_MINUS_BEFORE

    def __post_init__(self):
        if self.vd_size < 2:
            raise ConfigError("vd_size", "must be at least 2")
        if not self.cluster_pool >= 1:
            raise ConfigError("cluster_pool", "must be at least 1")
        if self.K < 1:
            raise ConfigError("K", "must be at least 1")
        if self.num_eval_attacks < 1:
            raise ConfigError("num_eval_attacks", "must be at least 1")
        if not self.beta > 0:
            raise ConfigError("loss.beta", "must be positive")
        if self.vd_size > self.graph_size:
            raise ConfigError("vd_size", f"exceeds the sample graph size {self.graph_size}")

    @property
    def graph_size(self) -> int:
        src = self.source
        return src.sample_size if isinstance(src, EdgeListSource) else src.n

    @property
    def candidate_universe(self) -> int:
        """Node pairs joining a target node to a non-target node."""
        return self.vd_size * (self.graph_size - self.vd_size)

    def resolved_budgets(self) -> list[int]:
        ks = set(self.budgets)
        ks.update(round(f * self.candidate_universe) for f in self.budget_fractions)
        return sorted(ks)

    def with_(self, **changes) -> ScenarioConfig:
        return replace(self, **changes)


def _source(d: dict) -> GraphSource:
    if not isinstance(d, dict):
        raise ConfigError("source", "must be an object with a 'kind' key")
    kind = d.get("kind")
    try:
        if kind == "ba":
            n, m = int(d["n"]), int(d["m_attach"])
            if not 1 <= m < n:
                raise ConfigError("source.m_attach", f"need 1 <= m_attach < n (n={n})")
            return BASource(n, m)
        if kind == "powerlaw":
            n, gamma = int(d["n"]), float(d["gamma"])
            if n < 2:
                raise ConfigError("source.n", "must be at least 2")
            if not gamma > 1:
                raise ConfigError("source.gamma", "must exceed 1")
            return PowerLawSource(n, gamma)
        if kind == "edgelist":
            c = float(d.get("restart_prob", 0.15))
            if not 0 < c < 1:
                raise ConfigError("source.restart_prob", "must lie in (0, 1)")
            return EdgeListSource(str(d["path"]), int(d["sample_size"]), c)
    except KeyError as exc:
        raise ConfigError(f"source.{exc.args[0]}", "missing") from None
    raise ConfigError("source.kind", f"unknown graph source {kind!r}")


def config_from_dict(d: dict, base_dir: Path | None = None) -> ScenarioConfig:
    d = dict(d)
    if "source" not in d:
        raise ConfigError("source", "missing")
    source = _source(d["source"])
    if isinstance(source, EdgeListSource) and base_dir is not None:
        p = Path(source.path)
        if not p.is_absolute():
            source = replace(source, path=str(base_dir / p))

    cls = d.get("scenario_class", "TCA")
    try:
        ScenarioClass(cls)
    except ValueError:
        raise ConfigError("scenario_class", f"unknown scenario {cls!r}") from None

    try:
        metric = MetricKind.parse(d.get("metric", "cn"))
    except ValueError as exc:
        raise ConfigError("metric", str(exc)) from None

    loss = d.get("loss", {})
    beta = float(loss.get("beta", 2.0))
    theta_raw = loss.get("theta", "auto")
    if theta_raw == "auto" or theta_raw is None:
        theta = None
    else:
        try:
            theta = float(theta_raw)
        except (TypeError, ValueError):
            raise ConfigError("loss.theta", "must be a number or 'auto'") from None

    attacks = tuple(d.get("attacks", ["linkdel"]))
    for i, a in enumerate(attacks):
        try:
            AttackKind(a)
        except ValueError:
            raise ConfigError(f"attacks[{i}]", f"unknown attack {a!r}") from None
    defenses = tuple(d.get("defenses", list(DEFENSE_KINDS)))
    for i, name in enumerate(defenses):
        if name not in DEFENSE_KINDS:
            raise ConfigError(f"defenses[{i}]", f"unknown defense {name!r}")

    budgets = tuple(int(k) for k in d.get("budgets", []))
    for i, k in enumerate(budgets):
        if k < 0:
            raise ConfigError(f"budgets[{i}]", "must be non-negative")
    fractions = tuple(float(f) for f in d.get("budget_fractions", []))
    for i, f in enumerate(fractions):
        if not 0 <= f <= 1:
            raise ConfigError(f"budget_fractions[{i}]", "must lie in [0, 1]")

    p = float(d.get("randdel_p", 0.5))
    if not 0 <= p <= 1:
        raise ConfigError("randdel_p", "must lie in [0, 1]")
    solver = d.get("solver", {})
    limits = SolverLimits(
        max_nodes=solver.get("max_nodes", SolverLimits.max_nodes),
        time_limit=solver.get("time_limit", SolverLimits.time_limit),
    )
    sign = d.get("damage_sign", AFTER_MINUS_BEFORE)
    if sign not in (AFTER_MINUS_BEFORE, BEFORE_MINUS_AFTER):
        raise ConfigError("damage_sign", f"unknown convention {sign!r}")

    known = {
        "source", "scenario_class", "vd_size", "cluster_pool", "seed", "K", "num_eval_attacks", "metric",
        "loss", "budgets", "budget_fractions", "attacks", "defenses", "randdel_p",
        "solver", "damage_sign",
    }
    unknown = sorted(set(d) - known)
    if unknown:
        raise ConfigError(unknown[0], "unknown key")

    return ScenarioConfig(
        source=source,
        scenario_class=cls,
        vd_size=int(d.get("vd_size", 10)),
        cluster_pool=float(d.get("cluster_pool", CLUSTER_POOL_FACTOR)),
        seed=int(d.get("seed", 0)),
        K=int(d.get("K", 100)),
        num_eval_attacks=int(d.get("num_eval_attacks", 100)),
        metric=metric,
        beta=beta,
        theta=theta,
        budgets=budgets,
        budget_fractions=fractions,
        attacks=attacks,
        defenses=defenses,
        randdel_p=p,
        solver=limits,
        damage_sign=sign,
    )


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    return config_from_dict(data, base_dir=path.parent)
