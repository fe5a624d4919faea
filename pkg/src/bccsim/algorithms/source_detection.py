"""(S, H, K)-source detection, unweighted and with integer edge delays.

Each node keeps the best known distance to every source it has heard of and,
once per round, announces the lexicographically smallest ``(distance, source)``
pair among its current top ``K`` that it has not announced before.  Weighted
edges behave like subdivided paths: a pair crossing an edge of weight ``w``
reaches the far endpoint ``w - 1`` rounds later with distance increased by
``w``.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from ..graphcore import IntGraph, WeightedGraph, hop_diameter, int_dijkstra, make_int_graph
from ..simulator import Codec, Mode, NodeProgram, Payload, SimConfig, SimulationTrace, default_bits, run


class SourceDetector:
    """Per-node state machine, reused by the standalone program and by APSP."""

    def __init__(self, node: int, is_source: bool, H: int, K: int, weights: Mapping[int, int]):
        self.node = node
        self.H = H
        self.K = K
        self.weights = weights  # neighbour -> integer edge weight
        self.best: dict[int, int] = {node: 0} if is_source else {}
        self.sent: set[tuple[int, int]] = set()
        self.pending: dict[int, list[tuple[int, int]]] = {}
        self.idle = not is_source

    def top(self) -> list[tuple[int, int]]:
        return sorted((d, s) for s, d in self.best.items())[: self.K]

    def outgoing(self) -> tuple[int, int] | None:
        if self.idle:
            return None
        for d, s in self.top():
            if (d, s) not in self.sent and d < self.H:
                self.sent.add((d, s))
                return d, s
        self.idle = True
        return None

    def incoming(self, rnd: int, sender: int, d: int, s: int) -> None:
        w = self.weights.get(sender)
        if w is None or d + w > self.H:
            return
        self.pending.setdefault(rnd + w - 1, []).append((d + w, s))

    def settle(self, rnd: int) -> None:
        for d, s in self.pending.pop(rnd, ()):
            if d < self.best.get(s, d + 1):
                self.best[s] = d
                self.idle = False

    def result(self) -> list[tuple[int, int]]:
        return [(d, s) for d, s in self.top() if d <= self.H]


class SourceDetectionProgram(NodeProgram):
    def __init__(self, node, n, detector: SourceDetector, rounds: int):
        super().__init__(node, n)
        self.detector = detector
        self.rounds = rounds
        if rounds == 0:
            self.output = detector.result()
            self.halted = True

    def send(self, rnd):
        pair = self.detector.outgoing()
        if pair is None:
            return None
        return Payload("source", pair)

    def receive(self, rnd, inbox):
        det = self.detector
        for sender, (_, (d, s)) in inbox:
            det.incoming(rnd, sender, d, s)
        det.settle(rnd)
        if rnd >= self.rounds:
            self.output = det.result()
            self.halted = True


def _run_detection(graph, sources: Sequence[int], H: int, K: int, rounds: int, mode: Mode,
                   B: int | None) -> tuple[list[list[tuple[int, int]]], SimulationTrace]:
    src = set(sources)
    if not src:
        raise ValueError("source set must be non-empty")
    if H < 1 or K < 1:
        raise ValueError("H and K must be at least 1")
    n = graph.n
    p = getattr(graph, "p", 1)
    codec = Codec(n, p, 1, max_hop=H)
    B = B or max(default_bits(n, p), codec.required_bits(["source"]))
    programs = []
    for u in range(n):
        weights = {v: w for v, w in graph.neighbors(u)}
        det = SourceDetector(u, u in src, H, K, weights)
        programs.append(SourceDetectionProgram(u, n, det, rounds))
    trace = run(programs, graph, SimConfig(mode, B), Codec(n, p, B, max_hop=H))
    return trace.outputs, trace


def source_detection(comm: WeightedGraph, sources: Sequence[int], H: int, K: int,
                     mode: Mode = Mode.CONGEST, B: int | None = None):
    """Unweighted source detection on the hop structure of ``comm``.

    Nodes are assumed to know the hop diameter ``D`` and ``|S|`` and run
    exactly ``min(H, D) + min(K, |S|)`` rounds.  Returns the per-node lists of
    ``(hops, source)`` pairs and the trace.
    """
    unit = make_int_graph(comm.n, [(u, v, 1) for u, v, _ in comm.edges])
    rounds = min(H, hop_diameter(comm)) + min(K, len(set(sources)))
    return _run_detection(unit, sources, H, K, rounds, mode, B)


def weighted_diameter(g: IntGraph) -> int | None:
    best = 0
    for s in range(g.n):
        dist = int_dijkstra(g, s)
        if len(dist) < g.n:
            return None
        best = max(best, max(dist.values()))
    return best


def weighted_source_detection(g: IntGraph, sources: Sequence[int], H: int, K: int,
                              mode: Mode = Mode.CONGEST, B: int | None = None):
    """Source detection where an edge of weight ``w`` delays transmissions by ``w`` rounds."""
    D = weighted_diameter(g)
    rounds = (H if D is None else min(H, D)) + min(K, len(set(sources)))
    return _run_detection(g, sources, H, K, rounds, mode, B)


def detection_reference(g, sources: Iterable[int], H: int, K: int) -> list[list[tuple[int, int]]]:
    """Dijkstra from every source, capped at ``H``; keep the ``K`` best pairs per node."""
    found: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for s in sorted(set(sources)):
        for v, d in int_dijkstra(g, s, cap=H).items():
            found[v].append((d, s))
    return [sorted(lst)[:K] for lst in found]
