"""Reliable-query defenses for similarity-based link prediction under edge-deletion attacks."""

from .graph import Graph, NodePair
from .metrics import MetricKind, MetricClass, similarity
from .loss import LossParams
from .plans import AttackKind, AttackPlan, DefensePlan

__all__ = [
    "Graph",
    "NodePair",
    "MetricKind",
    "MetricClass",
    "similarity",
    "LossParams",
    "AttackKind",
    "AttackPlan",
    "DefensePlan",
]
__version__ = "0.1.0"
