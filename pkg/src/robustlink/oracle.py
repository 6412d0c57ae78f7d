"""Brute-force ground truth for the attacker, the defender and the MaxCut gadget.

Nothing here uses the independent-damage machinery for its own answers, so
these routines can check :mod:`robustlink.attack`, :mod:`robustlink.defense`
and :mod:`robustlink.ilp` from outside.
"""

from __future__ import annotations

import csv
import itertools
import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .damage import DamageGraph
from .graph import Graph, NodePair
from .ilp import BinaryProgram
from .loss import LossParams, total_loss
from .metrics import MetricKind, similarity
from .plans import AttackKind, AttackPlan, DefensePlan
from .scenario import TargetSet

ATTACK_GUARD = 20
DEFENSE_GUARD = 16
GADGET_GUARD = 8


class GuardExceeded(ValueError):
    pass


@dataclass(frozen=True)
class ExactAttackResult:
    min_similarity: float
    # every similarity minimizer, in enumeration order
    optimal_plans: tuple[AttackPlan, ...]
    defender_favorite: AttackPlan
    defender_loss: float
    # smallest additive damage among the minimizers, from scratch recomputation
    min_independent_damage: float
    edge_damages: dict

    @property
    def num_minimizers(self) -> int:
        return len(self.optimal_plans)


def _tuple_edges(g: Graph, h_a) -> list[NodePair]:
    v1, v2 = NodePair(*h_a)
    out = []
    for w in g.common_neighbors(v1, v2):
        out.append(NodePair(v1, w))
        out.append(NodePair(v2, w))
    return out


def scratch_damage(g: Graph, e, targets: TargetSet, m: MetricKind, p: LossParams) -> float:
    """Loss change of one deletion, recomputing the whole loss both times."""
    return total_loss(g.delete_edges([e]), targets, m, p) - total_loss(g, targets, m, p)


def brute_attack(
    g: Graph,
    h_a,
    plan: DefensePlan | None,
    m: MetricKind,
    k_A: int | None,
    targets: TargetSet,
    p: LossParams,
    guard: int = ATTACK_GUARD,
) -> ExactAttackResult:
    """Enumerate every per-common-neighbor choice: keep it, or cut one unprotected side.

    The attacker never removes both edges of a common neighbor, and uses at
    most ``k_A`` deletions (default: one per common neighbor). The defender
    favorite minimizes the exact total loss among similarity minimizers
    (first in enumeration order on ties).
    """
    m = MetricKind.parse(m)
    v1, v2 = NodePair(*h_a)
    protected = plan.protected if plan is not None else frozenset()
    common = g.common_neighbors(v1, v2)
    options = []
    for w in common:
        opts = [()]
        for e in (NodePair(v1, w), NodePair(v2, w)):
            if e not in protected:
                opts.append((e,))
        options.append(opts)
    deletable = sum(len(o) - 1 for o in options)
    if deletable > guard:
        raise GuardExceeded(f"{deletable} deletable edges exceed the guard of {guard}")
    if k_A is None:
        k_A = len(common)

    best = math.inf
    minimizers: list[tuple[NodePair, ...]] = []
    for choice in itertools.product(*options):
        subset = tuple(e for part in choice for e in part)
        if len(subset) > k_A:
            continue
        s = similarity(m, g.delete_edges(subset), v1, v2)
        if s < best:
            best, minimizers = s, [subset]
        elif s == best:
            minimizers.append(subset)

    damages = {
        e: scratch_damage(g, e, targets, m, p)
        for e in _tuple_edges(g, (v1, v2)) if e not in protected
    }
    min_c = min(math.fsum(damages[e] for e in sorted(sub)) for sub in minimizers)
    losses = [total_loss(g.delete_edges(sub), targets, m, p) for sub in minimizers]
    fav = min(range(len(minimizers)), key=lambda i: losses[i])
    plans = tuple(AttackPlan.of(sub, AttackKind.LINKDEL) for sub in minimizers)
    return ExactAttackResult(best, plans, plans[fav], losses[fav], min_c, damages)


def _candidate_edges(dgs: Sequence[DamageGraph]) -> list[NodePair]:
    return sorted({e for dg in dgs for e in dg.edges()})


def _subsets(n: int, k: int) -> list[tuple[int, ...]]:
    out = []
    for size in range(min(n, k) + 1):
        out.extend(itertools.combinations(range(n), size))
    return out


def brute_defense(
    dgs: Sequence[DamageGraph],
    k_D: int,
    attacker: str = "tuple_rule",
    contexts: Sequence | None = None,
    guard: int = DEFENSE_GUARD,
) -> tuple[DefensePlan, float]:
    """Best protection set by enumerating every budget-feasible subset.

    ``attacker="tuple_rule"`` scores each subset with the per-tuple response of a
    tie-breaking attacker (cheaper edge of unprotected tuples, the remaining
    edge of half-protected ones). ``attacker="exact"`` instead runs
    :func:`brute_attack` on each sample and sums the exact losses; it needs
    ``contexts``, one ``(graph, h_a, targets, metric, loss_params)`` per
    damage graph. Ties go to the smallest, then lexicographically first, subset.
    """
    edges = _candidate_edges(dgs)
    if len(edges) > guard:
        raise GuardExceeded(f"{len(edges)} candidate edges exceed the guard of {guard}")
    subsets = _subsets(len(edges), k_D)
    if attacker == "tuple_rule":
        masks = np.zeros((len(subsets), max(1, len(edges))), dtype=bool)
        for r, s in enumerate(subsets):
            masks[r, list(s)] = True
        index = {e: i for i, e in enumerate(edges)}
        total = np.zeros(len(subsets))
        for dg in dgs:
            for t in dg.tuples:
                x1 = masks[:, index[dg.edge1(t)]]
                x2 = masks[:, index[dg.edge2(t)]]
                cost = np.where(
                    x1 & x2, 0.0, np.where(x1, t.c2, np.where(x2, t.c1, min(t.c1, t.c2)))
                )
                total += cost
        values = total
    elif attacker == "exact":
        if contexts is None or len(contexts) != len(dgs):
            raise ValueError("exact attacker needs one context per damage graph")
        values = []
        for s in subsets:
            plan = DefensePlan(frozenset(edges[i] for i in s), k_D)
            values.append(
                math.fsum(
                    brute_attack(g, h_a, plan, m, None, targets, p).defender_loss
                    for g, h_a, targets, m, p in contexts
                )
            )
        values = np.asarray(values)
    else:
        raise ValueError(f"unknown attacker model {attacker!r}")
    best = float(values.min())
    pick = int(np.flatnonzero(values <= best + 1e-12)[0])
    chosen = frozenset(edges[i] for i in subsets[pick])
    return DefensePlan(chosen, k_D, "brute", {"objective": float(values[pick])}), float(values[pick])


def enumerate_program(prog: BinaryProgram) -> tuple[float, tuple[int, ...]]:
    """Exhaustive minimum of a binary program over all budget-feasible assignments."""
    n = prog.num_vars
    if n > 22:
        raise GuardExceeded(f"{n} variables is too many to enumerate")
    codes = np.arange(1 << n, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(n)) & 1).astype(float) if n else np.zeros((1, 0))
    feasible = bits.sum(axis=1) <= prog.budget
    bits = bits[feasible]
    values = np.full(len(bits), prog.constant)
    for i, a in prog.linear_terms.items():
        values += a * bits[:, i]
    for (i, j), b in prog.pair_terms.items():
        values += b * bits[:, i] * bits[:, j]
    k = int(values.argmin())
    return float(values[k]), tuple(int(v) for v in bits[k])


@dataclass(frozen=True)
class GadgetInstance:
    base_graph: Graph
    lifted: Graph
    h_d: tuple[NodePair, ...]
    v1: int
    v2: int


def gadget_from_graph(base: Graph) -> GadgetInstance:
    """Attach two new nodes to every base node; target pairs mirror the base edges.

    Base edges are not copied into the lifted graph: the target pairs must be
    non-edges whose only possible common neighbors are the two new nodes.
    """
    if base.n > GADGET_GUARD:
        raise GuardExceeded(f"gadget base has {base.n} nodes; limit is {GADGET_GUARD}")
    k = base.n
    v1, v2 = k, k + 1
    edges = [(u, v1) for u in range(k)] + [(u, v2) for u in range(k)]
    return GadgetInstance(base, Graph(k + 2, edges), tuple(base.edges()), v1, v2)


def max_cut(g: Graph) -> int:
    best = 0
    edges = list(g.edges())
    for mask in range(1 << max(0, g.n - 1)):  # fix the last node's side
        best = max(best, sum(1 for a, b in edges if ((mask >> a) & 1) != ((mask >> b) & 1)))
    return best


def verify_gadget(inst: GadgetInstance) -> tuple[float, int, bool]:
    """Smallest total CN similarity over target pairs across all cut-at-one-side attacks.

    Every base node loses exactly one of its two attachment edges. Returns the
    minimum, the MaxCut of the base graph and whether ``min == |E| - maxcut``.
    """
    k = inst.base_graph.n
    best = math.inf
    for mask in range(1 << k):
        cut = [(u, inst.v1) if (mask >> u) & 1 else (u, inst.v2) for u in range(k)]
        g = inst.lifted.delete_edges(cut)
        s = math.fsum(similarity(MetricKind.COMMON_NEIGHBORS, g, a, b) for a, b in inst.h_d)
        best = min(best, s)
    if k == 0:
        best = 0.0
    mc = max_cut(inst.base_graph)
    return best, mc, best == len(inst.h_d) - mc


def random_attack_instance(
    rng: random.Random,
    m: MetricKind,
    max_tuples: int = 6,
    protect_prob: float = 0.3,
):
    """Small random instance with ``h_a = (0, 1)`` and at most ``max_tuples`` common neighbors.

    Nodes ``0 .. vd_size-1`` are the targets, so ``h_a`` is one of them. The
    returned graph is the observed one: linked target pairs are removed after
    labelling. Returns ``(observed, h_a, targets, loss_params, plan)``.
    """
    n = rng.randint(max(5, max_tuples // 2 + 4), max_tuples + 7)
    vd_size = rng.randint(3, min(n - 1, 6))
    k = rng.randint(1, min(max_tuples, n - 2))
    common = rng.sample(range(2, n), k)
    edges = {NodePair(0, 1)}
    for w in common:
        edges.add(NodePair(0, w))
        edges.add(NodePair(1, w))
    density = rng.uniform(0.1, 0.6)
    for u in range(n):
        for v in range(u + 1, n):
            if v <= 1:
                continue
            if u <= 1:
                # extra endpoint neighbors change degrees without adding common ones
                if v in common:
                    continue
                if rng.random() < density / 2:
                    edges.add(NodePair(u, v))
                continue
            if rng.random() < density:
                edges.add(NodePair(u, v))
    g = Graph(n, edges)
    extra = [w for w in g.common_neighbors(0, 1) if w not in common]
    g = g.delete_edges((1, w) for w in extra)
    targets = TargetSet.from_graph(g, vd_size)
    observed = g.delete_edges(pair for pair in targets.pairs if targets.labels[pair] > 0)
    params = LossParams(beta=rng.uniform(0.5, 2.0), theta=rng.uniform(0.0, 2.0))
    tuple_edges = _tuple_edges(observed, (0, 1))
    protected = frozenset(e for e in tuple_edges if rng.random() < protect_prob)
    plan = DefensePlan(protected, len(protected))
    return observed, NodePair(0, 1), targets, params, plan


def random_damage_graphs(
    rng: random.Random, max_edges: int = 16, max_samples: int = 5, pool_nodes: int = 8
) -> list[DamageGraph]:
    """Random unprotected damage graphs over a shared node pool with overlapping edges."""
    from .damage import DamageTuple

    while True:
        k = rng.randint(1, max_samples)
        dgs = []
        for i in range(k):
            v1, v2 = sorted(rng.sample(range(3), 2))
            ws = rng.sample(range(3, pool_nodes), rng.randint(1, 3))
            tuples = tuple(
                DamageTuple(w, round(rng.uniform(-2, 3), 3), round(rng.uniform(-2, 3), 3))
                for w in sorted(ws)
            )
            dgs.append(DamageGraph(v1, v2, tuples, sample_index=i))
        if len({e for dg in dgs for e in dg.edges()}) <= max_edges:
            return dgs


DIAGNOSTIC_COLUMNS = [
    "instance", "metric", "min_similarity", "linkdel_similarity",
    "damage_independent", "damage_exact", "gap",
]


def write_diagnostics(path, rows: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=DIAGNOSTIC_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in DIAGNOSTIC_COLUMNS})
