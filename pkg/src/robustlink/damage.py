"""Damage graphs: per-edge loss changes around the attacker's target pair."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from .graph import Graph, NodePair, two_hop_affected_pairs
from .loss import LossParams, pair_loss, pair_losses
from .metrics import MetricKind, similarity
from .plans import AttackPlan, DefensePlan
from .scenario import TargetSet

AFTER_MINUS_BEFORE = "after_minus_before"
BEFORE_MINUS_AFTER = "before_minus_after"


@dataclass(frozen=True)
class DamageTuple:
    """Common neighbor ``w`` and the damages of cutting it from either endpoint.

    ``c1`` belongs to edge ``(v1, w)`` and ``c2`` to ``(v2, w)``. Positive
    damage means the deletion raises the analyst's loss.
    """

    w: int
    c1: float
    c2: float
    prot1: bool = False
    prot2: bool = False

    @property
    def c_min(self) -> float:
        return min(self.c1, self.c2)

    @property
    def critical(self) -> bool:
        return not self.prot1 and not self.prot2


@dataclass(frozen=True)
class DamageGraph:
    v1: int
    v2: int
    tuples: tuple[DamageTuple, ...]
    deg1: int = 0
    deg2: int = 0
    sample_index: int = 0

    def edge1(self, t: DamageTuple) -> NodePair:
        return NodePair(self.v1, t.w)

    def edge2(self, t: DamageTuple) -> NodePair:
        return NodePair(self.v2, t.w)

    def edges(self) -> list[NodePair]:
        out = []
        for t in self.tuples:
            out.append(self.edge1(t))
            out.append(self.edge2(t))
        return out

    def damage_map(self) -> dict[NodePair, float]:
        out = {}
        for t in self.tuples:
            out[self.edge1(t)] = t.c1
            out[self.edge2(t)] = t.c2
        return out

    @property
    def num_critical(self) -> int:
        return sum(1 for t in self.tuples if t.critical)

    def with_protection(self, plan: DefensePlan | frozenset | None) -> DamageGraph:
        """Same damages, protection flags read from ``plan``."""
        protected = _protected_set(plan)
        tuples = tuple(
            replace(
                t,
                prot1=NodePair(self.v1, t.w) in protected,
                prot2=NodePair(self.v2, t.w) in protected,
            )
            for t in self.tuples
        )
        return replace(self, tuples=tuples)

    def to_dict(self) -> dict:
        return {
            "v1": self.v1,
            "v2": self.v2,
            "deg1": self.deg1,
            "deg2": self.deg2,
            "sample_index": self.sample_index,
            "tuples": [
                {"w": t.w, "c1": t.c1, "c2": t.c2, "prot1": t.prot1, "prot2": t.prot2}
                for t in self.tuples
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> DamageGraph:
        return cls(
            v1=int(d["v1"]),
            v2=int(d["v2"]),
            tuples=tuple(
                DamageTuple(int(t["w"]), float(t["c1"]), float(t["c2"]),
                            bool(t.get("prot1", False)), bool(t.get("prot2", False)))
                for t in d["tuples"]
            ),
            deg1=int(d.get("deg1", 0)),
            deg2=int(d.get("deg2", 0)),
            sample_index=int(d.get("sample_index", 0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _protected_set(plan) -> frozenset:
    if plan is None:
        return frozenset()
    if isinstance(plan, DefensePlan):
        return plan.protected
    return frozenset(NodePair(*p) for p in plan)


def edge_damage(
    g: Graph,
    edge: tuple[int, int],
    targets: TargetSet,
    m: MetricKind,
    p: LossParams,
    base: dict | None = None,
) -> float:
    """Loss after deleting ``edge`` minus loss before, touching only affected pairs."""
    if base is None:
        base = pair_losses(g, targets, m, p)
    g2 = g.delete_edges([edge])
    terms = [
        pair_loss(similarity(m, g2, *pair), targets.labels[pair], p) - base[pair]
        for pair in two_hop_affected_pairs(g, edge, targets.pairs)
    ]
    return math.fsum(terms)


def build_damage_graph(
    g: Graph,
    h_a: tuple[int, int],
    targets: TargetSet,
    m: MetricKind,
    p: LossParams,
    plan: DefensePlan | None = None,
    sample_index: int = 0,
    sign: str = AFTER_MINUS_BEFORE,
) -> DamageGraph:
    """Damage graph of ``h_a = (v1, v2)``; ``v1`` is the smaller id.

    ``g`` is the analyst's observed graph. ``h_a`` must be one of its edges or
    a linked target pair (the latter are true edges the analyst never observes).
    ``sign`` flips the convention for auditing: ``before_minus_after`` reports
    loss reductions as positive damage.
    """
    v1, v2 = NodePair(*h_a)
    if not g.has_edge(v1, v2) and targets.labels.get((v1, v2), -1) < 0:
        raise ValueError(f"attack target ({v1}, {v2}) is not an edge")
    if sign not in (AFTER_MINUS_BEFORE, BEFORE_MINUS_AFTER):
        raise ValueError(f"unknown damage sign convention {sign!r}")
    flip = -1.0 if sign == BEFORE_MINUS_AFTER else 1.0
    base = pair_losses(g, targets, m, p)
    tuples = []
    for w in g.common_neighbors(v1, v2):
        c1 = edge_damage(g, (v1, w), targets, m, p, base)
        c2 = edge_damage(g, (v2, w), targets, m, p, base)
        tuples.append(DamageTuple(w, flip * c1, flip * c2))
    dg = DamageGraph(v1, v2, tuple(tuples), g.degree(v1), g.degree(v2), sample_index)
    return dg.with_protection(plan) if plan else dg


def plan_damage(dg: DamageGraph, attack: AttackPlan) -> float:
    """Total damage of an attack under the independent-damage approximation."""
    damages = dg.damage_map()
    terms = []
    for e in sorted(attack.deletions):
        if e not in damages:
            raise ValueError(f"attack deletes {e!r}, which is not in the damage graph")
        terms.append(damages[e])
    return math.fsum(terms)
