"""Defender and attacker plans."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .graph import NodePair, read_graph, write_edge_list


class AttackKind(enum.Enum):
    LINKDEL = "linkdel"
    UNBIASEDDEL = "unbiaseddel"
    RANDDEL = "randdel"


@dataclass(frozen=True)
class DefensePlan:
    """Reliable queries: node pairs the attacker cannot delete."""

    protected: frozenset = frozenset()
    budget: int = 0
    method: str = "none"
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        canon = frozenset(NodePair(*p) for p in self.protected)
        object.__setattr__(self, "protected", canon)
        if self.budget < 0:
            raise ValueError("budget must be non-negative")
        if len(canon) > self.budget:
            raise ValueError(f"plan protects {len(canon)} pairs but budget is {self.budget}")

    def __contains__(self, pair) -> bool:
        return pair in self.protected

    def __len__(self) -> int:
        return len(self.protected)

    def sorted_pairs(self) -> list[NodePair]:
        return sorted(self.protected)

    def save(self, path: str | Path) -> None:
        header = f"defense: {self.method}\nbudget: {self.budget}\nprotected: {len(self)}"
        write_edge_list(path, self.protected, header=header)

    @classmethod
    def load(cls, path: str | Path, budget: int | None = None) -> DefensePlan:
        g = read_graph(path)
        pairs = list(g.edges())
        method = "loaded"
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.startswith("# budget:") and budget is None:
                    budget = int(line.split(":", 1)[1])
                elif line.startswith("# defense:"):
                    method = line.split(":", 1)[1].strip()
        return cls(frozenset(pairs), len(pairs) if budget is None else budget, method)


@dataclass(frozen=True)
class AttackPlan:
    deletions: frozenset
    kind: AttackKind

    @classmethod
    def of(cls, deletions: Iterable, kind: AttackKind | str) -> AttackPlan:
        return cls(frozenset(NodePair(*d) for d in deletions), AttackKind(kind))

    def __len__(self) -> int:
        return len(self.deletions)

    def sorted_pairs(self) -> list[NodePair]:
        return sorted(self.deletions)
