"""Reliable-query planners: IDOpt, IDRank and the PPN baseline."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import ilp
from .damage import DamageGraph
from .graph import Graph, NodePair
from .plans import DefensePlan


@dataclass(frozen=True)
class CriticalEdgeSet:
    """Edges with exactly one endpoint among the analyst's target nodes."""

    edges: frozenset

    @classmethod
    def from_graphs(cls, graphs: Iterable[Graph], vd: Sequence[int]) -> CriticalEdgeSet:
        vd_set = set(vd)
        edges = set()
        for g in graphs:
            for u in vd_set:
                for w in g.neighbors(u):
                    if w not in vd_set:
                        edges.add(NodePair(u, w))
        return cls(frozenset(edges))

    def __len__(self) -> int:
        return len(self.edges)


def tuple_cost(c1: float, c2: float, x1: int, x2: int) -> float:
    """Damage the analyst expects from one tuple given which of its edges are protected."""
    if x1 and x2:
        return 0.0
    if x1:
        return c2
    if x2:
        return c1
    return min(c1, c2)


def expected_damage(dgs: Sequence[DamageGraph], protected) -> float:
    """Total expected damage of a protection set against best-responding attackers."""
    protected = protected.protected if isinstance(protected, DefensePlan) else protected
    terms = []
    for dg in dgs:
        for t in dg.tuples:
            terms.append(
                tuple_cost(t.c1, t.c2, dg.edge1(t) in protected, dg.edge2(t) in protected)
            )
    return math.fsum(terms)


def _check_unprotected(dgs: Sequence[DamageGraph]) -> None:
    for dg in dgs:
        if any(t.prot1 or t.prot2 for t in dg.tuples):
            raise ValueError("planners expect damage graphs built without protection")


def idrank_scores(dgs: Sequence[DamageGraph]) -> dict[NodePair, float]:
    scores: dict[NodePair, list[float]] = {}
    for dg in dgs:
        for t in dg.tuples:
            c = t.c_min
            if c > 0:
                scores.setdefault(dg.edge1(t), []).append(c)
                scores.setdefault(dg.edge2(t), []).append(c)
    return {e: math.fsum(v) for e, v in scores.items()}


def idrank(dgs: Sequence[DamageGraph], k_D: int) -> DefensePlan:
    """Protect the ``k_D`` edges with the largest accumulated positive tuple weight."""
    _check_unprotected(dgs)
    scores = idrank_scores(dgs)
    ranked = sorted(scores, key=lambda e: (-scores[e], e))
    chosen = ranked[:k_D]
    return DefensePlan(frozenset(chosen), k_D, "idrank", {"candidates": len(scores)})


def idopt(
    dgs: Sequence[DamageGraph],
    k_D: int,
    max_nodes: int | None = None,
    time_limit: float | None = None,
) -> DefensePlan:
    """Minimize total expected damage over all samples with the exact 0-1 solver.

    The IDRank plan seeds the search, so a truncated run is never worse than
    IDRank on the expected-damage objective.
    """
    _check_unprotected(dgs)
    prog = ilp.from_damage_graphs(dgs, k_D)
    seed_plan = idrank(dgs, k_D)
    initial = [1 if e in seed_plan.protected else 0 for e in prog.names]
    sol = ilp.solve(prog, max_nodes=max_nodes, time_limit=time_limit, initial=initial)
    chosen = frozenset(e for e, x in zip(prog.names, sol.assignment) if x)
    info = {
        "objective": sol.objective,
        "status": sol.status,
        "gap": sol.gap,
        "variables": prog.num_vars,
        "nodes": sol.nodes,
    }
    return DefensePlan(chosen, k_D, "idopt", info)


def pair_protection_plan(dg: DamageGraph, k_D: int) -> DefensePlan:
    """Optimal single-sample plan against tie-breaking attackers on symmetric metrics.

    Protects both edges of the ``k_D // 2`` positive-weight tuples with the
    largest weight. An odd spare slot goes to the cheaper-to-cut side of the
    next positive tuple and is reported in ``info["odd_slot"]``.
    """
    positive = sorted((t for t in dg.tuples if t.c_min > 0), key=lambda t: (-t.c_min, t.w))
    take = min(len(positive), k_D // 2)
    chosen = set()
    for t in positive[:take]:
        chosen.add(dg.edge1(t))
        chosen.add(dg.edge2(t))
    info = {"n_positive": len(positive), "odd_slot": None}
    if k_D % 2 and take < len(positive) and len(chosen) < k_D:
        t = positive[take]
        e = dg.edge1(t) if t.c1 <= t.c2 else dg.edge2(t)
        chosen.add(e)
        info["odd_slot"] = e
    return DefensePlan(frozenset(chosen), k_D, "pair_protection", info)


def ppn(critical: CriticalEdgeSet, k_D: int, rng: random.Random) -> DefensePlan:
    """Uniformly random subset of the critical edges."""
    pool = sorted(critical.edges)
    chosen = rng.sample(pool, min(k_D, len(pool)))
    return DefensePlan(frozenset(chosen), k_D, "ppn", {"pool": len(pool)})
