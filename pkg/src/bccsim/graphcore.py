"""Weighted graphs with exact rational weights and sequential shortest-path oracles.

Every edge weight is ``q / p`` for a per-graph denominator ``p`` and an integer
numerator ``q`` in ``[1, p**2]``.  All distance arithmetic in this module is
done on integer numerators; use :meth:`WeightedGraph.weight` to turn a
numerator into a :class:`fractions.Fraction` at the boundary.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heappop, heappush
from typing import Iterable, Sequence

INT63_MAX = 2**63 - 1


class GraphError(ValueError):
    pass


class DuplicateEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class WeightOutOfRange(GraphError):
    pass


class Disconnected(GraphError):
    pass


class NodeOutOfRange(GraphError):
    pass


class KTooLarge(GraphError):
    pass


class _Unreachable:
    """Marker for the infinite h-hop distance. Never compares to numbers."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNREACHABLE"

    def __reduce__(self):
        return (_Unreachable, ())


UNREACHABLE = _Unreachable()


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    p: int
    edges: tuple[tuple[int, int, int], ...]
    adj: tuple[tuple[tuple[int, int], ...], ...] = field(repr=False, compare=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, u: int) -> tuple[tuple[int, int], ...]:
        """``(v, q)`` pairs for the edges incident to ``u``, sorted by ``v``."""
        return self.adj[u]

    def weight(self, numerator) -> Fraction:
        return Fraction(numerator, self.p)

    def edge_weight(self, u: int, v: int) -> int | None:
        for x, q in self.adj[u]:
            if x == v:
                return q
        return None


def make_graph(n: int, p: int, edge_list: Iterable[Sequence[int]]) -> WeightedGraph:
    """Validate and build an undirected connected graph.

    ``edge_list`` holds ``(u, v, q)`` triples meaning an edge of weight ``q/p``.
    """
    if n < 1:
        raise GraphError(f"need at least one node, got n={n}")
    if p < 1:
        raise GraphError(f"denominator must be positive, got p={p}")
    # distances are sums of at most n-1 edges of numerator <= p^2
    if n * p * p > INT63_MAX:
        raise WeightOutOfRange(f"n*p^2 = {n * p * p} does not fit in 63 bits")
    seen: set[tuple[int, int]] = set()
    edges = []
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for u, v, q in edge_list:
        u, v, q = int(u), int(v), int(q)
        if not (0 <= u < n and 0 <= v < n):
            raise NodeOutOfRange(f"edge ({u}, {v}) outside [0, {n})")
        if u == v:
            raise SelfLoop(f"self-loop at node {u}")
        if not 1 <= q <= p * p:
            raise WeightOutOfRange(f"numerator {q} of edge ({u}, {v}) outside [1, {p * p}]")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {key} given twice")
        seen.add(key)
        edges.append((key[0], key[1], q))
        adj[u].append((v, q))
        adj[v].append((u, q))
    edges.sort()
    frozen_adj = tuple(tuple(sorted(a)) for a in adj)
    if _component_size(frozen_adj, 0) != n:
        raise Disconnected(f"graph on {n} nodes is not connected")
    return WeightedGraph(n, p, tuple(edges), frozen_adj)


def _component_size(adj, s: int) -> int:
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v, _ in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen)


def dijkstra(g: WeightedGraph, s: int) -> list[int]:
    """Exact distance numerators from ``s`` to every node."""
    dist: list[int | None] = [None] * g.n
    heap = [(0, s)]
    while heap:
        d, u = heappop(heap)
        if dist[u] is not None:
            continue
        dist[u] = d
        for v, q in g.adj[u]:
            if dist[v] is None:
                heappush(heap, (d + q, v))
    return dist  # type: ignore[return-value]


def exact_apsp(g: WeightedGraph) -> list[list[int]]:
    return [dijkstra(g, s) for s in range(g.n)]


def exact_diameter(g: WeightedGraph) -> Fraction:
    return g.weight(max(max(row) for row in exact_apsp(g)))


def hop_distances(g: WeightedGraph, s: int) -> list[int]:
    """Unweighted BFS hop counts from ``s``."""
    dist = [-1] * g.n
    dist[s] = 0
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v, _ in g.adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def hop_diameter(g: WeightedGraph) -> int:
    return max(max(hop_distances(g, s)) for s in range(g.n))


def k_closest(g: WeightedGraph, u: int, k: int) -> list[int]:
    """The ``k`` nodes closest to ``u``, ordered by (distance, id); ``u`` comes first."""
    if k > g.n:
        raise KTooLarge(f"k={k} exceeds n={g.n}")
    dist = dijkstra(g, u)
    return sorted(range(g.n), key=lambda v: (dist[v], v))[:k]


def h_hop_distances(g: WeightedGraph, s: int, h: int) -> list:
    """Bellman-Ford with ``h`` rounds: minimum weight over paths of at most ``h`` edges."""
    dist: list = [UNREACHABLE] * g.n
    dist[s] = 0
    for _ in range(h):
        nxt = list(dist)
        changed = False
        for u in range(g.n):
            du = dist[u]
            if du is UNREACHABLE:
                continue
            for v, q in g.adj[u]:
                if nxt[v] is UNREACHABLE or du + q < nxt[v]:
                    nxt[v] = du + q
                    changed = True
        dist = nxt
        if not changed:
            break
    return dist


def h_hop_distance(g: WeightedGraph, u: int, v: int, h: int):
    if h < 0:
        raise ValueError("hop budget must be non-negative")
    return h_hop_distances(g, u, h)[v]


# -- text format: "n m p" header, then m lines "u v q" -----------------------


def dumps_graph(g: WeightedGraph) -> str:
    lines = [f"{g.n} {g.m} {g.p}"]
    lines.extend(f"{u} {v} {q}" for u, v, q in g.edges)
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> WeightedGraph:
    tokens = text.split()
    if len(tokens) < 3:
        raise GraphError("missing 'n m p' header")
    n, m, p = (int(t) for t in tokens[:3])
    body = tokens[3:]
    if len(body) != 3 * m:
        raise GraphError(f"header announces {m} edges, found {len(body) / 3:g}")
    triples = [tuple(int(t) for t in body[i:i + 3]) for i in range(0, len(body), 3)]
    return make_graph(n, p, triples)


def write_graph(g: WeightedGraph, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(dumps_graph(g))


def read_graph(path) -> WeightedGraph:
    with open(path) as fh:
        return loads_graph(fh.read())


@dataclass(frozen=True)
class IntGraph:
    """Undirected graph with arbitrary positive integer weights (no connectivity requirement)."""

    n: int
    edges: tuple[tuple[int, int, int], ...]
    adj: tuple[tuple[tuple[int, int], ...], ...] = field(repr=False, compare=False)
    p: int = 1

    def neighbors(self, u: int) -> tuple[tuple[int, int], ...]:
        return self.adj[u]


def make_int_graph(n: int, edge_list: Iterable[Sequence[int]]) -> IntGraph:
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    edges = []
    seen = set()
    for u, v, w in edge_list:
        if not (0 <= u < n and 0 <= v < n):
            raise NodeOutOfRange(f"edge ({u}, {v}) outside [0, {n})")
        if u == v:
            raise SelfLoop(f"self-loop at node {u}")
        if w < 1:
            raise WeightOutOfRange(f"integer weight must be >= 1, got {w}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {key} given twice")
        seen.add(key)
        edges.append((key[0], key[1], int(w)))
        adj[u].append((v, int(w)))
        adj[v].append((u, int(w)))
    return IntGraph(n, tuple(sorted(edges)), tuple(tuple(sorted(a)) for a in adj))


def int_dijkstra(g, s: int, cap: int | None = None) -> dict[int, int]:
    """Dijkstra on any graph exposing ``neighbors``; drops nodes farther than ``cap``."""
    dist: dict[int, int] = {}
    heap = [(0, s)]
    while heap:
        d, u = heappop(heap)
        if u in dist:
            continue
        if cap is not None and d > cap:
            break
        dist[u] = d
        for v, w in g.neighbors(u):
            if v not in dist:
                heappush(heap, (d + w, v))
    return dist
