"""k-shortcut graphs: the base graph plus an exact-distance edge from every node to its ball."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..graphcore import WeightedGraph, dijkstra, k_closest


class DistanceBook:
    """Exact distances learnt from announced balls, queryable in both directions."""

    def __init__(self, balls: Mapping[int, Sequence[tuple[int, int]]]):
        self.balls = {u: list(entries) for u, entries in balls.items()}
        self._d: dict[int, dict[int, int]] = {}
        for u, entries in self.balls.items():
            for z, d in entries:
                self._d.setdefault(u, {})[z] = d
                self._d.setdefault(z, {})[u] = d

    def get(self, a: int, b: int) -> int | None:
        if a == b:
            return 0
        return self._d.get(a, {}).get(b)

    def known_from(self, a: int) -> dict[int, int]:
        return self._d.get(a, {})

    def via_ball(self, u: int, v: int) -> int | None:
        """``min over z in S^k(u)`` of ``d(u, z) + d(z, v)``, over the terms that are known."""
        best = None
        for z, dz in self.balls.get(u, ()):
            dzv = self.get(z, v)
            if dzv is not None and (best is None or dz + dzv < best):
                best = dz + dzv
        return best


def shortcut_weight(book: DistanceBook, u: int, v: int, w_uv: int | None) -> int | None:
    """Reweighted ``w'(u, v)``, minimised over both orientations of the pair."""
    cands = [c for c in (w_uv, book.via_ball(u, v), book.via_ball(v, u)) if c is not None]
    return min(cands) if cands else None


@dataclass
class ShortcutGraph:
    base: WeightedGraph
    k: int
    balls: dict[int, list[tuple[int, int]]]
    # (a, b) with a < b -> w' numerator, over base edges and shortcut edges
    weights: dict[tuple[int, int], int]
    shortcuts: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def p(self) -> int:
        return self.base.p

    def neighbors(self, u: int) -> list[tuple[int, int]]:
        return self._adj[u]

    def __post_init__(self):
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.base.n)]
        for (a, b), w in sorted(self.weights.items()):
            adj[a].append((b, w))
            adj[b].append((a, w))
        self._adj = adj

    def max_weight(self) -> int:
        return max(self.weights.values())


def shortcut_from_balls(g: WeightedGraph, k: int, balls: Mapping[int, Sequence[tuple[int, int]]]) -> ShortcutGraph:
    book = DistanceBook(balls)
    pairs = {(u, v) for u, v, _ in g.edges}
    shortcuts = []
    for u, entries in book.balls.items():
        for z, d in entries:
            if z != u:
                shortcuts.append((u, z, d))
                pairs.add((min(u, z), max(u, z)))
    weights = {}
    for a, b in pairs:
        weights[(a, b)] = shortcut_weight(book, a, b, g.edge_weight(a, b))
    return ShortcutGraph(g, k, {u: list(e) for u, e in book.balls.items()}, weights, sorted(shortcuts))


def exact_balls(g: WeightedGraph, k: int) -> dict[int, list[tuple[int, int]]]:
    balls = {}
    for u in range(g.n):
        dist = dijkstra(g, u)
        balls[u] = [(z, dist[z]) for z in k_closest(g, u, k)]
    return balls


def build_shortcut_graph(g: WeightedGraph, k: int) -> ShortcutGraph:
    return shortcut_from_balls(g, k, exact_balls(g, k))
