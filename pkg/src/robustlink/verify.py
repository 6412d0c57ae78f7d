"""Randomized cross-checks of the fast routines against the brute-force oracles.

Each suite returns a :class:`SuiteResult`; the ``verify`` subcommand and the
acceptance tests both run them.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

from . import ilp, oracle
from .attack import linkdel, optimal_partition_counts
from .damage import build_damage_graph, plan_damage
from .defense import expected_damage, idopt, idrank, pair_protection_plan
from .graph import Graph
from .loss import total_loss
from .metrics import MetricKind, score_from_counts, similarity
from .scenario import derive_rng

ASYMMETRIC = [m for m in MetricKind if not m.is_symmetric]


@dataclass
class SuiteResult:
    name: str
    instances: int = 0
    failures: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.instances > 0 and not self.failures

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.instances - len(self.failures)}/{self.instances}"


def attacker_suite(instances: int = 200, seed: int = 0, max_tuples: int = 6) -> SuiteResult:
    """LinkDel against exhaustive per-tuple enumeration, every metric in turn."""
    res = SuiteResult("attacker")
    metrics = list(MetricKind)
    for i in range(instances):
        m = metrics[i % len(metrics)]
        rng = derive_rng(seed, "attacker", i)
        g, h_a, targets, p, plan = oracle.random_attack_instance(rng, m, max_tuples)
        dg = build_damage_graph(g, h_a, targets, m, p, plan)
        a = linkdel(dg, m)
        sim = similarity(m, g.delete_edges(a.deletions), *h_a)
        exact = oracle.brute_attack(g, h_a, plan, m, None, targets, p)
        c = plan_damage(dg, a)
        best_c = min(plan_damage(dg, q) for q in exact.optimal_plans)
        scale = max(1.0, abs(c))
        exact_c = exact.defender_loss - total_loss(g, targets, m, p)
        res.instances += 1
        res.diagnostics.append({
            "instance": i,
            "metric": m.value,
            "min_similarity": exact.min_similarity,
            "linkdel_similarity": sim,
            "damage_independent": c,
            "damage_exact": exact_c,
            "gap": exact_c - c,
        })
        if sim != exact.min_similarity:
            res.failures.append((i, m.value, "similarity", sim, exact.min_similarity))
        elif c != best_c:
            res.failures.append((i, m.value, "damage", c, best_c))
        elif abs(c - exact.min_independent_damage) > 1e-9 * scale:
            res.failures.append((i, m.value, "scratch damage", c, exact.min_independent_damage))
    return res


def partition_suite(instances: int = 500, seed: int = 0) -> SuiteResult:
    """Split counts against a direct sweep over every (k1, k2)."""
    res = SuiteResult("partition")
    rng = derive_rng(seed, "partition")
    for i in range(instances):
        m = ASYMMETRIC[i % len(ASYMMETRIC)]
        n_common = rng.randint(0, 12)
        kA = rng.randint(0, n_common)
        surviving = n_common - kA
        d1 = n_common + rng.randint(0, 10)
        d2 = n_common + rng.randint(0, 10)
        got = optimal_partition_counts(m, d1, d2, n_common, surviving, kA)
        best = None
        for k1 in range(kA + 1):
            k2 = kA - k1
            s = score_from_counts(m, surviving, d1 - k1, d2 - k2)
            if best is None or s < best[0]:
                best = (s, k1, k2)
        res.instances += 1
        if (got.k1, got.k2) != best[1:]:
            res.failures.append((i, m.value, tuple(got), best[1:]))
    return res


def random_program(rng: random.Random, max_vars: int = 18) -> ilp.BinaryProgram:
    n = rng.randint(1, max_vars)
    linear = {i: rng.uniform(-5, 5) for i in range(n) if rng.random() < 0.9}
    pairs = {}
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < 0.25:
            pairs[(i, j)] = rng.uniform(-5, 5)
    return ilp.BinaryProgram(n, linear, pairs, rng.randint(0, n), rng.uniform(-3, 3))


def ilp_suite(instances: int = 500, seed: int = 0, max_vars: int = 18) -> SuiteResult:
    """Branch and bound against exhaustive enumeration."""
    res = SuiteResult("ilp")
    rng = derive_rng(seed, "ilp")
    for i in range(instances):
        prog = random_program(rng, max_vars)
        sol = ilp.solve(prog)
        best, _ = oracle.enumerate_program(prog)
        res.instances += 1
        if sol.status != ilp.OPTIMAL or abs(sol.objective - best) > 1e-9:
            res.failures.append((i, sol.status, sol.objective, best))
    return res


def defense_suite(instances: int = 100, seed: int = 0) -> SuiteResult:
    """IDOpt against exhaustive protection sets; IDRank against the single-sample rule."""
    res = SuiteResult("defense")
    rng = derive_rng(seed, "defense")
    for i in range(instances):
        dgs = oracle.random_damage_graphs(rng)
        k_D = rng.randint(0, 6)
        plan = idopt(dgs, k_D)
        _, best = oracle.brute_defense(dgs, k_D)
        got = expected_damage(dgs, plan)
        res.instances += 1
        if abs(got - best) > 1e-9:
            res.failures.append((i, "idopt", got, best))
        single = dgs[:1]
        n_pos = sum(1 for t in single[0].tuples if t.c_min > 0)
        k_even = 2 * n_pos + 2 * rng.randint(0, 2)
        if idrank(single, k_even).protected != pair_protection_plan(single[0], k_even).protected:
            res.failures.append((i, "idrank", k_even))
    return res


def gadget_suite(random_instances: int = 100, seed: int = 0, max_nodes: int = 7) -> SuiteResult:
    """Every simple graph on at most 5 nodes, then random graphs up to ``max_nodes``."""
    res = SuiteResult("gadget")
    for k in range(0, 6):
        pairs = list(itertools.combinations(range(k), 2))
        for mask in range(1 << len(pairs)):
            base = Graph(k, [pairs[j] for j in range(len(pairs)) if (mask >> j) & 1])
            _, _, ok = oracle.verify_gadget(oracle.gadget_from_graph(base))
            res.instances += 1
            if not ok:
                res.failures.append(("exhaustive", k, mask))
    rng = derive_rng(seed, "gadget")
    for i in range(random_instances):
        k = rng.randint(1, max_nodes)
        p = rng.random()
        edges = [e for e in itertools.combinations(range(k), 2) if rng.random() < p]
        min_sh, mc, ok = oracle.verify_gadget(oracle.gadget_from_graph(Graph(k, edges)))
        res.instances += 1
        if not ok:
            res.failures.append(("random", i, min_sh, mc))
    return res


SUITES = {
    "attacker": attacker_suite,
    "partition": partition_suite,
    "ilp": ilp_suite,
    "defense": defense_suite,
    "gadget": gadget_suite,
}


def run_all(seed: int = 0, scale: float = 1.0) -> list[SuiteResult]:
    """Run every suite; ``scale`` shrinks or grows the random instance counts."""
    n = lambda base: max(1, math.ceil(base * scale))  # noqa: E731
    return [
        attacker_suite(n(200), seed),
        partition_suite(n(500), seed),
        ilp_suite(n(500), seed),
        defense_suite(n(100), seed),
        gadget_suite(n(100), seed),
    ]
