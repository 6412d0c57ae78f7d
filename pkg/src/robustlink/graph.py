"""Immutable undirected simple graphs over compact integer node ids."""

from __future__ import annotations

from operator import itemgetter
from pathlib import Path
from typing import Iterable, Iterator


class NodePair(tuple):
    """Unordered node pair stored as ``(a, b)`` with ``a < b``.

    Hashes and compares like the plain tuple ``(a, b)``, so ``NodePair(3, 1)``
    and ``(1, 3)`` are interchangeable as dict keys.
    """

    __slots__ = ()

    def __new__(cls, u: int, v: int) -> NodePair:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(f"node pair needs two distinct nodes, got ({u}, {v})")
        if u < 0 or v < 0:
            raise ValueError(f"node ids must be non-negative, got ({u}, {v})")
        return tuple.__new__(cls, (u, v) if u < v else (v, u))

    a = property(itemgetter(0))
    b = property(itemgetter(1))

    def __getnewargs__(self):
        return (self[0], self[1])

    def __repr__(self) -> str:
        return f"NodePair({self[0]}, {self[1]})"

    def other(self, node: int) -> int:
        if node == self[0]:
            return self[1]
        if node == self[1]:
            return self[0]
        raise ValueError(f"{node} is not an endpoint of {self!r}")


class Graph:
    """Undirected simple graph with ``n`` nodes labelled ``0 .. n-1``.

    Instances are never mutated. :meth:`delete_edges` returns a new graph that
    shares the untouched adjacency sets with its parent, which keeps the many
    single-edge what-if deletions used by the damage computation cheap.
    """

    __slots__ = ("_adj", "_m")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("node count must be non-negative")
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} nodes")
            adj[u].add(v)
            adj[v].add(u)
        self._adj: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in adj)
        self._m = sum(len(s) for s in adj) // 2

    @classmethod
    def _from_adjacency(cls, adj: tuple[frozenset[int], ...], m: int) -> Graph:
        g = cls.__new__(cls)
        g._adj = adj
        g._m = m
        return g

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def num_edges(self) -> int:
        return self._m

    def _check(self, u: int) -> None:
        if not 0 <= u < len(self._adj):
            raise ValueError(f"node {u} not in graph with {len(self._adj)} nodes")

    def neighbors(self, u: int) -> frozenset[int]:
        self._check(u)
        return self._adj[u]

    def degree(self, u: int) -> int:
        self._check(u)
        return len(self._adj[u])

    def degrees(self) -> list[int]:
        return [len(s) for s in self._adj]

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < len(self._adj) and v in self._adj[u]

    def common_neighbors(self, u: int, v: int) -> list[int]:
        """Common neighbors of ``u`` and ``v`` in ascending order."""
        if u == v:
            raise ValueError("common neighbors need two distinct nodes")
        self._check(u)
        self._check(v)
        return sorted(self._adj[u] & self._adj[v])

    def edges(self) -> Iterator[NodePair]:
        """All edges in ascending canonical order."""
        for u, nbrs in enumerate(self._adj):
            for v in sorted(nbrs):
                if u < v:
                    yield NodePair(u, v)

    def delete_edges(self, removals: Iterable[tuple[int, int]]) -> Graph:
        """Return a copy without the given pairs. Non-edges are ignored."""
        touched: dict[int, set[int]] = {}
        removed = 0
        for u, v in removals:
            if u == v or not self.has_edge(u, v):
                continue
            su = touched.get(u)
            if su is None:
                su = touched[u] = set(self._adj[u])
            if v not in su:
                continue
            sv = touched.get(v)
            if sv is None:
                sv = touched[v] = set(self._adj[v])
            su.discard(v)
            sv.discard(u)
            removed += 1
        if not removed:
            return self
        adj = list(self._adj)
        for node, s in touched.items():
            adj[node] = frozenset(s)
        return Graph._from_adjacency(tuple(adj), self._m - removed)

    def relabel(self, order: list[int]) -> Graph:
        """Relabel so that old node ``order[i]`` becomes node ``i``."""
        if sorted(order) != list(range(self.n)):
            raise ValueError("relabel order must be a permutation of all nodes")
        new_id = [0] * self.n
        for new, old in enumerate(order):
            new_id[old] = new
        adj = tuple(frozenset(new_id[x] for x in self._adj[old]) for old in order)
        return Graph._from_adjacency(adj, self._m)

    def subgraph(self, nodes: Iterable[int]) -> Graph:
        """Induced subgraph on ``nodes``; ids are compacted in the given order."""
        nodes = list(nodes)
        index = {old: new for new, old in enumerate(nodes)}
        if len(index) != len(nodes):
            raise ValueError("duplicate nodes in subgraph request")
        edges = [
            (index[u], index[v])
            for u in nodes
            for v in self._adj[u]
            if v in index and u < v
        ]
        return Graph(len(nodes), edges)

    def components(self) -> list[list[int]]:
        """Connected components, largest first (ties by smallest member)."""
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in self._adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        comps.sort(key=lambda c: (-len(c), c[0]))
        return comps

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj == other._adj

    def __hash__(self) -> int:
        return hash(self._adj)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self._m})"


def degree(g: Graph, u: int) -> int:
    return g.degree(u)


def common_neighbors(g: Graph, u: int, v: int) -> list[int]:
    return g.common_neighbors(u, v)


def delete_edges(g: Graph, removals: Iterable[tuple[int, int]]) -> Graph:
    return g.delete_edges(removals)


def two_hop_affected_pairs(
    g: Graph, e: tuple[int, int], candidates: Iterable[tuple[int, int]]
) -> list[NodePair]:
    """Candidates whose local similarity can change when edge ``e`` is deleted.

    Deleting ``(p, q)`` only changes the degrees of ``p`` and ``q`` and the
    common-neighbor sets of pairs containing one of them. A pair ``(x, y)`` is
    therefore affected iff an endpoint of ``e`` is ``x``, ``y`` or one of their
    common neighbors. Candidates keep their input order.
    """
    p, q = e
    adj = g._adj
    out = []
    for pair in candidates:
        x, y = pair
        if p == x or p == y or q == x or q == y:
            out.append(NodePair(x, y))
            continue
        ax, ay = adj[x], adj[y]
        if (p in ax and p in ay) or (q in ax and q in ay):
            out.append(NodePair(x, y))
    return out


def read_edge_list(path: str | Path) -> tuple[Graph, list[int]]:
    """Load a whitespace-separated edge list.

    Node ids are compacted to ``0 .. n-1`` in ascending order of the original
    ids. Returns the graph and the id map (``id_map[new] == original``).
    Self-loops and duplicate edges are dropped.
    """
    raw: list[tuple[int, int]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ValueError(f"{path}:{lineno}: expected two node ids")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: node ids must be integers") from None
            if u < 0 or v < 0:
                raise ValueError(f"{path}:{lineno}: node ids must be non-negative")
            raw.append((u, v))
    id_map = sorted({x for e in raw for x in e})
    index = {old: new for new, old in enumerate(id_map)}
    edges = {NodePair(index[u], index[v]) for u, v in raw if u != v}
    return Graph(len(id_map), edges), id_map


def write_edge_list(
    path: str | Path, edges: Iterable[tuple[int, int]], header: str | None = None
) -> None:
    """Write pairs one per line in ascending canonical order."""
    pairs = sorted(NodePair(u, v) for u, v in edges)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for a, b in pairs:
            fh.write(f"{a} {b}\n")


def write_id_map(path: str | Path, id_map: list[int]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# compact_id original_id\n")
        for new, old in enumerate(id_map):
            fh.write(f"{new} {old}\n")


def read_graph(path: str | Path, n: int | None = None) -> Graph:
    """Load an edge list whose ids are already compact (as written by this package).

    Unlike :func:`read_edge_list` no relabelling happens; ``n`` defaults to
    ``max id + 1`` or the ``# nodes: N`` header when present.
    """
    edges = []
    header_n = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("nodes:"):
                    header_n = int(body.split(":", 1)[1])
                continue
            u, v = line.split()[:2]
            edges.append((int(u), int(v)))
    if n is None:
        n = header_n if header_n is not None else 1 + max((max(e) for e in edges), default=-1)
    return Graph(n, edges)
