"""Graph sources, target-set construction and attacker-type sampling.

Everything here is a pure function of its inputs and a ``random.Random``
instance. Per-sample generators come from :func:`derive_rng`, so sample ``i``
of a stream is the same no matter which process draws it or in what order.
"""

from __future__ import annotations

import enum
import functools
import hashlib
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .graph import Graph, NodePair, read_edge_list

# clustering targets come from the top ceil(factor * |V_D|) nodes by degree
CLUSTER_POOL_FACTOR = 1.2
MAX_TARGET_RESAMPLES = 50
MAX_WALK_RESTARTS = 10


class ScenarioClass(enum.Enum):
    TCA = "TCA"
    TSA = "TSA"
    RCA = "RCA"
    RSA = "RSA"

    @property
    def targeted(self) -> bool:
        return self in (ScenarioClass.TCA, ScenarioClass.TSA)

    @property
    def vd_mode(self) -> str:
        return "clustering" if self in (ScenarioClass.TCA, ScenarioClass.RCA) else "sparse"


@dataclass(frozen=True)
class BASource:
    n: int
    m_attach: int

    def draw(self, rng: random.Random) -> Graph:
        return gen_ba(self.n, self.m_attach, rng)


@dataclass(frozen=True)
class PowerLawSource:
    n: int
    gamma: float

    def draw(self, rng: random.Random) -> Graph:
        return gen_powerlaw_config(self.n, self.gamma, rng)


@dataclass(frozen=True)
class EdgeListSource:
    path: str
    sample_size: int
    restart_prob: float = 0.15

    def __post_init__(self):
        if not 0 < self.restart_prob < 1:
            raise ValueError(f"restart_prob must lie in (0, 1), got {self.restart_prob}")

    def draw(self, rng: random.Random) -> Graph:
        return rw_sample(_load_cached(self.path), self.sample_size, self.restart_prob, rng)


GraphSource = Union[BASource, PowerLawSource, EdgeListSource]


@functools.lru_cache(maxsize=8)
def _load_cached(path: str) -> Graph:
    return read_edge_list(Path(path))[0]


@dataclass(frozen=True)
class TargetSet:
    """The analyst's target nodes, every pair among them, and their labels.

    ``vd`` is always ``0 .. size-1``: sample graphs are relabelled so that the
    chosen nodes occupy those ids.
    """

    vd: tuple[int, ...]
    pairs: tuple[NodePair, ...]
    labels: dict = field(compare=False)

    @classmethod
    def from_graph(cls, g: Graph, size: int) -> TargetSet:
        vd = tuple(range(size))
        pairs = tuple(NodePair(i, j) for i in range(size) for j in range(i + 1, size))
        labels = {p: 1 if g.has_edge(*p) else -1 for p in pairs}
        return cls(vd, pairs, labels)

    def edge_fraction(self) -> float:
        if not self.pairs:
            return 0.0
        return sum(1 for y in self.labels.values() if y > 0) / len(self.pairs)


@dataclass(frozen=True)
class AttackerTypeSample:
    """One draw of the attacker's private information.

    ``graph`` is the true network; ``observed`` is what the analyst's queries
    reveal, i.e. ``graph`` without any pair among the target nodes (those
    pairs are what the analyst is trying to predict, so they are never queried).
    """

    graph: Graph
    targets: TargetSet
    h_a: NodePair
    index: int = 0
    # set when the attacker's target pair is itself one of the analyst's targets
    overlaps_target: bool = False
    observed: Graph = field(default=None, compare=False)

    def __post_init__(self):
        if self.observed is None:
            object.__setattr__(self, "observed", observed_graph(self.graph, self.targets))


def observed_graph(g: Graph, targets: TargetSet) -> Graph:
    """The queried part of ``g``: every target pair is left unobserved."""
    return g.delete_edges(p for p in targets.pairs if targets.labels[p] > 0)


def derive_rng(seed: int, *keys) -> random.Random:
    """Independent generator for ``(seed, *keys)``, stable across runs and processes."""
    text = ":".join(str(k) for k in (seed, *keys))
    digest = hashlib.sha256(text.encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "little"))


def gen_ba(n: int, m_attach: int, rng: random.Random) -> Graph:
    """Preferential-attachment graph grown from a star on ``m_attach + 1`` nodes.

    Node ids follow arrival order, so low ids are the oldest (typically
    highest-degree) nodes.
    """
    if not 1 <= m_attach < n:
        raise ValueError(f"need 1 <= m_attach < n, got m_attach={m_attach}, n={n}")
    edges = [(0, i) for i in range(1, m_attach + 1)]
    # every node appears once per incident edge, so uniform picks are degree-proportional
    repeated = [0] * m_attach + list(range(1, m_attach + 1))
    for source in range(m_attach + 1, n):
        chosen: set[int] = set()
        while len(chosen) < m_attach:
            chosen.add(rng.choice(repeated))
        for t in sorted(chosen):
            edges.append((source, t))
            repeated.append(t)
        repeated.extend([source] * m_attach)
    return Graph(n, edges)


def powerlaw_degrees(n: int, gamma: float, rng: random.Random) -> list[int]:
    """I.i.d. degrees from ``P(k) ~ k**-gamma`` on ``[1, n-1]`` with an even sum.

    Parity is fixed by redrawing one random entry until its parity flips.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not gamma > 1:
        raise ValueError(f"need gamma > 1, got {gamma}")
    support = range(1, n)
    weights = [k ** -gamma for k in support]
    degrees = rng.choices(support, weights=weights, k=n)
    if sum(degrees) % 2:
        i = rng.randrange(n)
        parity = degrees[i] % 2
        while degrees[i] % 2 == parity:
            degrees[i] = rng.choices(support, weights=weights)[0]
    return degrees


def gen_powerlaw_config(n: int, gamma: float, rng: random.Random) -> Graph:
    """Configuration-model graph with i.i.d. degrees, ``P(k) ~ k**-gamma`` on ``[1, n-1]``.

    Self-loops and repeated stub matches are dropped after matching.
    """
    degrees = powerlaw_degrees(n, gamma, rng)
    stubs = [u for u, d in enumerate(degrees) for _ in range(d)]
    rng.shuffle(stubs)
    edges = {NodePair(u, v) for u, v in zip(stubs[::2], stubs[1::2]) if u != v}
    return Graph(n, sorted(edges))


def rw_sample(g: Graph, target_n: int, restart_prob: float, rng: random.Random) -> Graph:
    """Induced subgraph on the first ``target_n`` nodes visited by a restart walk.

    The walk starts in the largest component. If no new node shows up within
    ``100 * target_n`` steps it jumps to a fresh random start node; after
    ``MAX_WALK_RESTARTS`` such jumps it gives up. Returned ids follow
    ascending original ids.
    """
    if not 1 <= target_n <= g.n:
        raise ValueError(f"target_n must lie in [1, {g.n}], got {target_n}")
    if not 0 < restart_prob < 1:
        raise ValueError(f"restart_prob must lie in (0, 1), got {restart_prob}")
    component = g.components()[0]
    adj = g._adj
    start = rng.choice(component)
    visited = {start}
    current = start
    stale = 0
    restarts = 0
    patience = 100 * target_n
    while len(visited) < target_n:
        nbrs = adj[current]
        if not nbrs or rng.random() < restart_prob:
            current = start
        else:
            current = rng.choice(sorted(nbrs))
        if current in visited:
            stale += 1
            if stale > patience:
                restarts += 1
                if restarts > MAX_WALK_RESTARTS:
                    raise RuntimeError(
                        f"random walk stalled at {len(visited)} of {target_n} nodes"
                    )
                start = current = rng.choice(component)
                visited.add(start)
                stale = 0
        else:
            visited.add(current)
            stale = 0
    return g.subgraph(sorted(visited))


def _vd_candidates(g: Graph, mode: str, size: int, pool_factor: float) -> list[int]:
    if mode == "sparse":
        return list(range(g.n))
    if mode == "clustering":
        pool = min(g.n, max(math.ceil(pool_factor * size), size))
        by_degree = sorted(range(g.n), key=lambda u: (-len(g._adj[u]), u))
        return sorted(by_degree[:pool])
    raise ValueError(f"unknown target-set mode {mode!r}")


def assign_vd(
    g: Graph,
    mode: str,
    size: int,
    rng: random.Random,
    pool_factor: float = CLUSTER_POOL_FACTOR,
) -> tuple[Graph, TargetSet]:
    """Pick the analyst's target nodes and relabel them to ids ``0 .. size-1``.

    ``clustering`` draws uniformly from the ``ceil(pool_factor * size)``
    highest-degree nodes (ties by id), ``sparse`` from all nodes. Unchosen nodes keep their ids, except those
    displaced from ``0 .. size-1``, which move into the vacated slots in
    ascending order.
    """
    if size > g.n:
        raise ValueError(f"target set size {size} exceeds node count {g.n}")
    if size < 0:
        raise ValueError("target set size must be non-negative")
    chosen = sorted(rng.sample(_vd_candidates(g, mode, size, pool_factor), size))
    chosen_set = set(chosen)
    displaced = [u for u in range(size) if u not in chosen_set]
    vacated = [u for u in chosen if u >= size]
    order = chosen + list(range(size, g.n))
    for old_slot, node in zip(vacated, displaced):
        order[old_slot] = node
    relabelled = g.relabel(order)
    return relabelled, TargetSet.from_graph(relabelled, size)


def draw_target_edge(
    g: Graph, targets: TargetSet, targeted: bool, rng: random.Random
) -> NodePair | None:
    """Uniform edge within the target nodes (targeted) or over all edges."""
    if targeted:
        eligible = [p for p in targets.pairs if targets.labels[p] > 0]
    else:
        eligible = list(g.edges())
    if not eligible:
        return None
    return eligible[rng.randrange(len(eligible))]


def sample_attacker_type(cfg, rng: random.Random, index: int = 0) -> AttackerTypeSample:
    """Draw one attacker type: a fresh graph with the analyst's targets and ``H_A``.

    ``cfg`` needs ``source``, ``scenario_class`` and ``vd_size``; ``cluster_pool``
    is optional.
    """
    cls = ScenarioClass(cfg.scenario_class)
    pool_factor = getattr(cfg, "cluster_pool", CLUSTER_POOL_FACTOR)
    for _ in range(MAX_TARGET_RESAMPLES):
        g = cfg.source.draw(rng)
        g, targets = assign_vd(g, cls.vd_mode, cfg.vd_size, rng, pool_factor)
        h_a = draw_target_edge(g, targets, cls.targeted, rng)
        if h_a is not None:
            return AttackerTypeSample(g, targets, h_a, index, h_a in targets.labels)
    raise RuntimeError(
        f"no eligible attack target after {MAX_TARGET_RESAMPLES} graph draws "
        f"({cls.value}, |V_D|={cfg.vd_size})"
    )


def draw_sample(cfg, stream: str, index: int) -> AttackerTypeSample:
    """Sample ``index`` of a named stream (``"plan"``, ``"eval"``, ...)."""
    return sample_attacker_type(cfg, derive_rng(cfg.seed, stream, index), index)
