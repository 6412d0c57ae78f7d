"""Edge-deletion attacks on a damage graph."""

from __future__ import annotations

import math
import random
from typing import NamedTuple

from .damage import DamageGraph, DamageTuple
from .metrics import MetricKind, score_from_counts
from .plans import AttackKind, AttackPlan


class UnsupportedBudget(ValueError):
    pass


class PartitionCounts(NamedTuple):
    k1: int
    k2: int


def partition_scores(
    m: MetricKind, d1: int, d2: int, n_surviving_common: int, kA_prime: int
) -> list[float]:
    """Post-attack similarity for every split ``k1 = 0 .. kA_prime``."""
    scores = []
    for k1 in range(kA_prime + 1):
        k2 = kA_prime - k1
        assert d1 - k1 >= 0 and d2 - k2 >= 0, "more deletions than incident edges"
        scores.append(score_from_counts(m, n_surviving_common, d1 - k1, d2 - k2))
    return scores


def optimal_partition_counts(
    m: MetricKind,
    d1: int,
    d2: int,
    n_common: int,
    n_surviving_common: int,
    kA_prime: int,
) -> PartitionCounts:
    """How many critical deletions to place at ``v1`` versus ``v2``.

    ``d1``/``d2`` are the endpoint degrees before the critical deletions.
    Enumerates every split and returns the similarity minimizer with the
    smallest ``k1``.
    """
    if m.is_symmetric:
        raise ValueError(f"{m.value} is symmetric; every split is optimal")
    if not 0 <= kA_prime <= n_common:
        raise ValueError(f"need 0 <= kA_prime <= n_common, got {kA_prime} > {n_common}")
    scores = partition_scores(m, d1, d2, n_surviving_common, kA_prime)
    best = min(scores)
    k1 = scores.index(best)
    return PartitionCounts(k1, kA_prime - k1)


def _greedy_split(critical: list[DamageTuple], k1: int) -> tuple[list, list]:
    # v1-side cuts go to the k1 tuples where cutting at v1 is relatively cheapest
    order = sorted(critical, key=lambda t: (t.c1 - t.c2, t.w))
    return order[:k1], order[k1:]


def _partial_assignment(reachable: list[DamageTuple], k1: int, k2: int):
    """Cheapest way to cut exactly ``k1`` tuples at v1 and ``k2`` at v2, leaving the rest.

    Dynamic program over tuples; only used for degenerate splits where leaving a
    tuple intact ties with cutting it.
    """
    inf = math.inf
    # best[a][b]: minimal damage using a v1-cuts and b v2-cuts so far
    best = [[inf] * (k2 + 1) for _ in range(k1 + 1)]
    best[0][0] = 0.0
    choices = []
    for t in reachable:
        nxt = [row[:] for row in best]
        pick = [[0] * (k2 + 1) for _ in range(k1 + 1)]
        for a in range(k1 + 1):
            for b in range(k2 + 1):
                cur = best[a][b]
                if cur == inf:
                    continue
                if not t.prot1 and a < k1 and cur + t.c1 < nxt[a + 1][b]:
                    nxt[a + 1][b] = cur + t.c1
                    pick[a + 1][b] = 1
                if not t.prot2 and b < k2 and cur + t.c2 < nxt[a][b + 1]:
                    nxt[a][b + 1] = cur + t.c2
                    pick[a][b + 1] = 2
        # a cell keeps pick 0 when skipping the tuple was at least as cheap
        choices.append(pick)
        best = nxt
    if best[k1][k2] == inf:
        return None
    side1, side2 = [], []
    a, b = k1, k2
    for t, pick in zip(reversed(reachable), reversed(choices)):
        if pick[a][b] == 1:
            side1.append(t)
            a -= 1
        elif pick[a][b] == 2:
            side2.append(t)
            b -= 1
    return side1, side2


def _asymmetric_cuts(dg: DamageGraph, m: MetricKind):
    reachable = [t for t in dg.tuples if not (t.prot1 and t.prot2)]
    surviving = len(dg.tuples) - len(reachable)
    only1 = [t for t in reachable if t.prot2]  # only the v1 edge can go
    only2 = [t for t in reachable if t.prot1]
    critical = [t for t in reachable if not t.prot1 and not t.prot2]
    cap1, cap2 = len(only1) + len(critical), len(only2) + len(critical)
    n_reach = len(reachable)

    cells = []
    for k1 in range(cap1 + 1):
        for k2 in range(min(cap2, n_reach - k1) + 1):
            left = n_reach - k1 - k2
            cells.append((score_from_counts(m, surviving + left, dg.deg1 - k1, dg.deg2 - k2), k1, k2))
    best = min(c[0] for c in cells)

    choice = None
    for _, k1, k2 in (c for c in cells if c[0] == best):
        if k1 + k2 == n_reach:
            if k1 < len(only1) or k2 < len(only2):
                continue
            s1, s2 = _greedy_split(critical, k1 - len(only1))
            side1, side2 = only1 + s1, only2 + s2
        else:
            found = _partial_assignment(reachable, k1, k2)
            if found is None:
                continue
            side1, side2 = found
        cost = math.fsum([t.c1 for t in side1] + [t.c2 for t in side2])
        if choice is None or cost < choice[0]:
            choice = (cost, side1, side2)
    return choice[1], choice[2]


def linkdel(dg: DamageGraph, m: MetricKind, k_A: int | None = None) -> AttackPlan:
    """Similarity-minimizing deletions, breaking ties in the analyst's favor.

    Each common neighbor loses at most one of its two edges. For symmetric
    metrics every reachable tuple is cut: half-protected tuples lose their
    open edge and critical tuples their cheaper one (ties go to ``v1``).
    For asymmetric metrics every feasible number of cuts per side is scored
    with the metric formula; among the similarity minimizers the cheapest
    assignment wins. In the usual case all tuples are cut and the ``v1``-side
    cuts go to the tuples with the smallest ``c1 - c2``.
    """
    m = MetricKind.parse(m)
    reachable = sum(1 for t in dg.tuples if not (t.prot1 and t.prot2))
    if k_A is None:
        k_A = len(dg.tuples)
    if k_A < reachable:
        raise UnsupportedBudget(
            f"k_A={k_A} cannot cut all {reachable} reachable common neighbors"
        )
    if not m.is_symmetric:
        side1, side2 = _asymmetric_cuts(dg, m)
        deletions = [dg.edge1(t) for t in side1] + [dg.edge2(t) for t in side2]
        return AttackPlan.of(deletions, AttackKind.LINKDEL)
    deletions = []
    for t in dg.tuples:
        if t.prot1 and t.prot2:
            continue
        if t.prot1:
            deletions.append(dg.edge2(t))
        elif t.prot2:
            deletions.append(dg.edge1(t))
        else:
            deletions.append(dg.edge1(t) if t.c1 <= t.c2 else dg.edge2(t))
    return AttackPlan.of(deletions, AttackKind.LINKDEL)


def unbiased_del(dg: DamageGraph, rng: random.Random) -> AttackPlan:
    """Cut each reachable common neighbor, picking the side of critical tuples by a fair coin.

    One uniform draw is consumed per tuple regardless of protection so that
    runs against different defenses see the same coin flips.
    """
    deletions = []
    for t in dg.tuples:
        u = rng.random()
        if t.prot1 and t.prot2:
            continue
        if t.prot1:
            deletions.append(dg.edge2(t))
        elif t.prot2:
            deletions.append(dg.edge1(t))
        else:
            deletions.append(dg.edge1(t) if u < 0.5 else dg.edge2(t))
    return AttackPlan.of(deletions, AttackKind.UNBIASEDDEL)


def rand_del(dg: DamageGraph, p: float, rng: random.Random) -> AttackPlan:
    """Delete each unprotected tuple edge independently with probability ``p``."""
    if not 0 <= p <= 1:
        raise ValueError(f"deletion probability must lie in [0, 1], got {p}")
    deletions = []
    for t in dg.tuples:
        u1, u2 = rng.random(), rng.random()
        if not t.prot1 and u1 < p:
            deletions.append(dg.edge1(t))
        if not t.prot2 and u2 < p:
            deletions.append(dg.edge2(t))
    return AttackPlan.of(deletions, AttackKind.RANDDEL)


def run_attack(
    kind: AttackKind | str,
    dg: DamageGraph,
    m: MetricKind,
    rng: random.Random | None = None,
    p: float = 0.5,
) -> AttackPlan:
    kind = AttackKind(kind)
    if kind is AttackKind.LINKDEL:
        return linkdel(dg, m)
    if rng is None:
        raise ValueError(f"{kind.value} needs a random generator")
    if kind is AttackKind.UNBIASEDDEL:
        return unbiased_del(dg, rng)
    return rand_del(dg, p, rng)
