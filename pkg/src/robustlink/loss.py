"""Exponential prediction loss, sample averages and the damage prevention ratio."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import Graph
from .metrics import MetricKind, similarity
from .scenario import TargetSet

DPR_TOLERANCE = 1e-12


@dataclass(frozen=True)
class LossParams:
    beta: float = 2.0
    theta: float = 0.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta}")


class UndefinedDPR(ValueError):
    """Raised when the attack did not move the loss, so DPR has no denominator."""

    def __init__(self, l0: float, la: float):
        super().__init__(f"DPR undefined: attacked loss {la!r} equals baseline {l0!r}")
        self.l0 = l0
        self.la = la


def pair_loss(sim: float, y: int, p: LossParams) -> float:
    return math.exp(-y * p.beta * (sim - p.theta))


def pair_losses(g: Graph, targets: TargetSet, m: MetricKind, p: LossParams) -> dict:
    return {
        pair: pair_loss(similarity(m, g, *pair), targets.labels[pair], p)
        for pair in targets.pairs
    }


def total_loss(g_hat: Graph, targets: TargetSet, m: MetricKind, p: LossParams) -> float:
    """Sum of pair losses over the target pairs of ``targets`` on ``g_hat``."""
    return math.fsum(pair_losses(g_hat, targets, m, p).values())


def average_loss(
    samples: Sequence[tuple[Graph, TargetSet]], m: MetricKind, p: LossParams
) -> float:
    if not samples:
        raise ValueError("average loss needs at least one sample")
    return math.fsum(total_loss(g, t, m, p) for g, t in samples) / len(samples)


def dpr(l0: float, la: float, ld: float) -> float:
    """Fraction of the attack damage ``la - l0`` prevented by a defense."""
    if abs(la - l0) <= DPR_TOLERANCE:
        raise UndefinedDPR(l0, la)
    return (la - ld) / (la - l0)


def calibrate_theta(samples: Iterable[tuple[Graph, TargetSet]], m: MetricKind) -> float:
    """Midpoint between the mean similarity of linked and unlinked target pairs."""
    pos, neg = [], []
    count = 0
    for g, targets in samples:
        count += 1
        for pair in targets.pairs:
            s = similarity(m, g, *pair)
            (pos if targets.labels[pair] > 0 else neg).append(s)
    if not count:
        raise ValueError("theta calibration needs at least one sample")
    if not pos or not neg:
        raise ValueError(
            "theta calibration needs both linked and unlinked target pairs "
            f"(got {len(pos)} linked, {len(neg)} unlinked)"
        )
    return 0.5 * (math.fsum(pos) / len(pos) + math.fsum(neg) / len(neg))
