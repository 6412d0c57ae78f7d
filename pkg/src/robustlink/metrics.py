"""Local similarity metrics for link prediction."""

from __future__ import annotations

import enum
import math

from .graph import Graph


class MetricClass(enum.Enum):
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"


class MetricKind(enum.Enum):
    COMMON_NEIGHBORS = "cn"
    ADAMIC_ADAR = "aa"
    RESOURCE_ALLOCATION = "ra"
    JACCARD = "jaccard"
    SORENSEN = "sorensen"
    SALTON = "salton"
    HUB_PROMOTED = "hpi"
    HUB_DEPRESSED = "hdi"
    LEICHT_HOLME_NEWMAN = "lhn"

    @classmethod
    def parse(cls, name: str | MetricKind) -> MetricKind:
        if isinstance(name, MetricKind):
            return name
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown metric {name!r}; expected one of {valid}") from None

    @property
    def metric_class(self) -> MetricClass:
        return metric_class(self)

    @property
    def is_symmetric(self) -> bool:
        return self in _SYMMETRIC


_SYMMETRIC = frozenset(
    {
        MetricKind.COMMON_NEIGHBORS,
        MetricKind.ADAMIC_ADAR,
        MetricKind.RESOURCE_ALLOCATION,
        MetricKind.JACCARD,
        MetricKind.SORENSEN,
    }
)


def metric_class(m: MetricKind) -> MetricClass:
    return MetricClass.SYMMETRIC if m in _SYMMETRIC else MetricClass.ASYMMETRIC


def score_from_counts(m: MetricKind, n_common: int, d1: int, d2: int) -> float:
    """Evaluate a count-based metric from ``|N(u,v)|`` and the two degrees.

    Not defined for Adamic-Adar and Resource Allocation, which need the
    degrees of the individual common neighbors.
    """
    if n_common == 0:
        return 0.0
    if m is MetricKind.COMMON_NEIGHBORS:
        return float(n_common)
    if m is MetricKind.JACCARD:
        return n_common / (d1 + d2 - n_common)
    if m is MetricKind.SORENSEN:
        return 2 * n_common / (d1 + d2)
    if m is MetricKind.SALTON:
        return n_common / math.sqrt(d1 * d2)
    if m is MetricKind.HUB_PROMOTED:
        return n_common / min(d1, d2)
    if m is MetricKind.HUB_DEPRESSED:
        return n_common / max(d1, d2)
    if m is MetricKind.LEICHT_HOLME_NEWMAN:
        return n_common / (d1 * d2)
    raise ValueError(f"{m.value} is not a count-based metric")


def similarity(m: MetricKind, g: Graph, u: int, v: int) -> float:
    """Similarity of ``(u, v)`` in ``g``.

    Any common neighbor has degree at least 2, so the Adamic-Adar logarithm
    (natural base) and the Resource Allocation reciprocal are always defined.
    Ratio metrics return 0 whenever there is no common neighbor, which covers
    the isolated-endpoint case.
    """
    if u == v:
        raise ValueError("similarity needs two distinct nodes")
    adj = g._adj
    if not (0 <= u < len(adj) and 0 <= v < len(adj)):
        raise ValueError(f"pair ({u}, {v}) out of range")
    au, av = adj[u], adj[v]
    if m is MetricKind.ADAMIC_ADAR:
        return sum(1.0 / math.log(len(adj[w])) for w in sorted(au & av))
    if m is MetricKind.RESOURCE_ALLOCATION:
        return sum(1.0 / len(adj[w]) for w in sorted(au & av))
    return score_from_counts(m, len(au & av), len(au), len(av))
