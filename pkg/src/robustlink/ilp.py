"""Exact 0-1 minimization of a quadratic pseudo-boolean objective under a cardinality budget.

The programs come from damage graphs: every tuple contributes a constant,
two linear terms and one product of its two edge variables. The only
constraint is ``sum(x) <= budget``.
"""

from __future__ import annotations

import json
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Sequence

from .damage import DamageGraph
from .graph import NodePair

OPTIMAL = "optimal"
INCUMBENT = "incumbent"
PRUNE_EPS = 1e-12


@dataclass
class BinaryProgram:
    num_vars: int
    linear_terms: dict[int, float] = field(default_factory=dict)
    pair_terms: dict[tuple[int, int], float] = field(default_factory=dict)
    budget: int = 0
    constant: float = 0.0
    names: list | None = None

    def __post_init__(self):
        if self.budget < 0:
            raise ValueError("budget must be non-negative")
        for i, j in self.pair_terms:
            if not 0 <= i < j < self.num_vars:
                raise ValueError(f"pair term ({i}, {j}) must satisfy 0 <= i < j < num_vars")
        for i in self.linear_terms:
            if not 0 <= i < self.num_vars:
                raise ValueError(f"linear term {i} out of range")

    def evaluate(self, x: Sequence[int]) -> float:
        terms = [self.constant]
        terms.extend(a * x[i] for i, a in self.linear_terms.items())
        terms.extend(b * x[i] * x[j] for (i, j), b in self.pair_terms.items())
        return math.fsum(terms)

    def to_dict(self) -> dict:
        d = {
            "constant": self.constant,
            "linear": {str(i): a for i, a in sorted(self.linear_terms.items())},
            "pairs": {f"{i},{j}": b for (i, j), b in sorted(self.pair_terms.items())},
            "budget": self.budget,
            "num_vars": self.num_vars,
        }
        if self.names is not None:
            d["names"] = [list(n) for n in self.names]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> BinaryProgram:
        linear = {int(k): float(v) for k, v in d.get("linear", {}).items()}
        pairs = {}
        for k, v in d.get("pairs", {}).items():
            i, j = (int(s) for s in k.split(","))
            pairs[(i, j)] = float(v)
        n = d.get("num_vars")
        if n is None:
            n = 1 + max([*linear, *(j for _, j in pairs)], default=-1)
        names = [NodePair(*p) for p in d["names"]] if "names" in d else None
        return cls(int(n), linear, pairs, int(d.get("budget", 0)), float(d.get("constant", 0.0)), names)


@dataclass(frozen=True)
class Solution:
    assignment: tuple[int, ...]
    objective: float
    status: str
    gap: float = 0.0
    bound: float = -math.inf
    nodes: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def from_damage_graphs(dgs: Sequence[DamageGraph], k_D: int) -> BinaryProgram:
    """Expected-damage program over deduplicated edge variables.

    A tuple with damages ``c1, c2`` and ``m = min(c1, c2)`` costs
    ``m + (c2 - m) x1 + (c1 - m) x2 + (m - c1 - c2) x1 x2``, where ``x1``
    protects the edge to ``v1``.
    """
    names = sorted({e for dg in dgs for e in dg.edges()})
    index = {e: i for i, e in enumerate(names)}
    constant: list[float] = []
    linear: dict[int, list[float]] = {}
    pairs: dict[tuple[int, int], list[float]] = {}
    for dg in dgs:
        for t in dg.tuples:
            i, j = index[dg.edge1(t)], index[dg.edge2(t)]
            m = min(t.c1, t.c2)
            constant.append(m)
            linear.setdefault(i, []).append(t.c2 - m)
            linear.setdefault(j, []).append(t.c1 - m)
            key = (i, j) if i < j else (j, i)
            pairs.setdefault(key, []).append(m - t.c1 - t.c2)
    return BinaryProgram(
        num_vars=len(names),
        linear_terms={i: math.fsum(v) for i, v in linear.items()},
        pair_terms={k: math.fsum(v) for k, v in pairs.items()},
        budget=k_D,
        constant=math.fsum(constant),
        names=names,
    )


class _Search:
    def __init__(self, prog: BinaryProgram, max_nodes: int | None, time_limit: float | None):
        self.prog = prog
        n = prog.num_vars
        self.n = n
        self.lin = [0.0] * n
        for i, a in prog.linear_terms.items():
            self.lin[i] = a
        self.nbrs: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for (i, j), b in prog.pair_terms.items():
            self.nbrs[i].append((j, b))
            self.nbrs[j].append((i, b))
        mass = [abs(self.lin[i]) + sum(abs(b) for _, b in self.nbrs[i]) for i in range(n)]
        self.order = sorted(range(n), key=lambda i: (-mass[i], i))
        self.val = [-1] * n
        self.max_nodes = max_nodes
        self.deadline = None if time_limit is None else time.monotonic() + time_limit
        self.nodes = 0
        self.aborted = False
        self.best_x: list[int] = [0] * n
        self.best_obj = prog.evaluate(self.best_x)

    def offer(self, x: list[int]) -> None:
        obj = self.prog.evaluate(x)
        if obj < self.best_obj - PRUNE_EPS:
            self.best_obj = obj
            self.best_x = list(x)

    def greedy(self) -> list[int]:
        """Repeatedly apply the best single or paired flip per unit of budget."""
        n, lin, nbrs = self.n, self.lin, self.nbrs
        x = [0] * n
        delta = list(lin)  # objective change from setting x_i = 1 alone
        left = self.prog.budget
        while left > 0:
            best, move = 0.0, None
            for i in range(n):
                if not x[i] and delta[i] < best:
                    best, move = delta[i], (i,)
            if left >= 2:
                for (i, j), b in self.prog.pair_terms.items():
                    if x[i] or x[j]:
                        continue
                    d = (delta[i] + delta[j] + b) / 2
                    if d < best - PRUNE_EPS:
                        best, move = d, (i, j)
            if move is None:
                break
            for i in move:
                x[i] = 1
                left -= 1
                for j, b in nbrs[i]:
                    delta[j] += b
        return x

    def bound(self, left: int) -> float:
        val, lin, nbrs = self.val, self.lin, self.nbrs
        fixed = [self.prog.constant]
        loose = 0.0  # per-term minima, ignoring the budget
        gains = []
        for i in range(self.n):
            vi = val[i]
            if vi == 1:
                fixed.append(lin[i])
                for j, b in nbrs[i]:
                    if val[j] == 1 and i < j:
                        fixed.append(b)
            elif vi == -1:
                a = lin[i]
                half = 0.0
                loose += min(0.0, a)
                for j, b in nbrs[i]:
                    vj = val[j]
                    if vj == 1:
                        a += b
                        loose += min(0.0, b)
                    elif vj == -1 and b < 0:
                        half += b / 2
                        if i < j:
                            loose += b
                g = a + half
                if g < 0:
                    gains.append(g)
        base = math.fsum(fixed)
        gains.sort()
        return max(base + loose, base + math.fsum(gains[:left]))

    def out_of_time(self) -> bool:
        if self.max_nodes is not None and self.nodes >= self.max_nodes:
            return True
        return self.deadline is not None and time.monotonic() > self.deadline

    def dfs(self, depth: int, left: int) -> None:
        if self.aborted:
            return
        self.nodes += 1
        if self.out_of_time():
            self.aborted = True
            return
        if depth == self.n or left == 0:
            x = [1 if v == 1 else 0 for v in self.val]
            self.offer(x)
            return
        if self.bound(left) >= self.best_obj - PRUNE_EPS:
            return
        i = self.order[depth]
        a = self.lin[i] + sum(b for j, b in self.nbrs[i] if self.val[j] == 1)
        a += sum(min(0.0, b) for j, b in self.nbrs[i] if self.val[j] == -1)
        for v in ((1, 0) if a < 0 else (0, 1)):
            if v == 1 and left == 0:
                continue
            self.val[i] = v
            self.dfs(depth + 1, left - v)
            self.val[i] = -1
            if self.aborted:
                return


def solve(
    prog: BinaryProgram,
    max_nodes: int | None = None,
    time_limit: float | None = None,
    initial: Sequence[int] | None = None,
) -> Solution:
    """Depth-first branch and bound.

    Returns status ``optimal`` when the search tree was exhausted, otherwise
    the best assignment found with ``gap = objective - root bound``.
    """
    search = _Search(prog, max_nodes, time_limit)
    search.offer(search.greedy())
    if initial is not None:
        x = [int(bool(v)) for v in initial]
        if len(x) != prog.num_vars or sum(x) > prog.budget:
            raise ValueError("initial assignment has wrong length or breaks the budget")
        search.offer(x)
    root_bound = search.bound(prog.budget)
    limit = sys.getrecursionlimit()
    if limit < prog.num_vars + 200:
        sys.setrecursionlimit(prog.num_vars + 200)
    try:
        search.dfs(0, prog.budget)
    finally:
        sys.setrecursionlimit(limit)
    obj = prog.evaluate(search.best_x)
    if search.aborted:
        return Solution(tuple(search.best_x), obj, INCUMBENT, max(0.0, obj - root_bound),
                        root_bound, search.nodes)
    return Solution(tuple(search.best_x), obj, OPTIMAL, 0.0, obj, search.nodes)
