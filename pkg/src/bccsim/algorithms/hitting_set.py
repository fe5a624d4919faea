"""Deterministic k-hitting sets: greedy selection and its BCC node program."""

from __future__ import annotations

from dataclasses import dataclass
from heapq import heappop, heappush
from typing import Iterable, Mapping

from ..graphcore import KTooLarge, WeightedGraph, k_closest
from ..simulator import Codec, Mode, NodeProgram, Payload, SimConfig, SimulationTrace, default_bits, run


class EmptySetInFamily(ValueError):
    pass


def greedy_hitting_set(family: Mapping[int, Iterable[int]]) -> list[int]:
    """Greedy hitting set, returned in ascending id order.

    Repeatedly picks the element lying in the most sets not yet hit, breaking
    ties by the smallest id, until every set is hit.
    """
    sets = {key: frozenset(members) for key, members in family.items()}
    for key, members in sets.items():
        if not members:
            raise EmptySetInFamily(f"set {key} is empty")
    counts: dict[int, int] = {}
    holders: dict[int, list] = {}
    for key, members in sets.items():
        for x in members:
            counts[x] = counts.get(x, 0) + 1
            holders.setdefault(x, []).append(key)
    uncovered = set(sets)
    chosen = []
    while uncovered:
        best = min(counts, key=lambda x: (-counts[x], x))
        chosen.append(best)
        for key in holders[best]:
            if key in uncovered:
                uncovered.discard(key)
                for x in sets[key]:
                    counts[x] -= 1
    return sorted(chosen)


def is_hitting_set(S: Iterable[int], family: Mapping[int, Iterable[int]]) -> bool:
    hit = set(S)
    return all(hit.intersection(members) for members in family.values())


def local_ball(n: int, u: int, k: int, known_edges: Iterable[tuple[int, int, int]]) -> list[tuple[int, int]]:
    """The ``k`` closest ``(node, distance)`` pairs around ``u`` in the known subgraph."""
    adj: dict[int, list[tuple[int, int]]] = {}
    for a, b, q in known_edges:
        adj.setdefault(a, []).append((b, q))
        adj.setdefault(b, []).append((a, q))
    dist: dict[int, int] = {}
    heap = [(0, u)]
    while heap and len(dist) < k:
        d, x = heappop(heap)
        if x in dist:
            continue
        dist[x] = d
        for y, q in adj.get(x, ()):
            if y not in dist:
                heappush(heap, (d + q, y))
    # heap pops in (distance, id) order, so dist preserves the tie-break
    return list(dist.items())


class BallProgram(NodeProgram):
    """First ``2k`` rounds shared by the hitting-set and APSP programs.

    Rounds ``1..k``: broadcast the i-th lightest incident edge.  Rounds
    ``k+1..2k``: broadcast the i-th entry of the local ball ``S^k(u)`` with its
    distance.  Afterwards ``balls`` maps every node to its announced ball.
    """

    def __init__(self, node: int, n: int, k: int, incident: Iterable[tuple[int, int]]):
        super().__init__(node, n)
        self.k = k
        self.incident = sorted(((q, v) for v, q in incident))
        self.known_edges: set[tuple[int, int, int]] = {
            (min(node, v), max(node, v), q) for q, v in self.incident
        }
        self.ball: list[tuple[int, int]] = []
        self.balls: dict[int, list[tuple[int, int]]] = {}

    def send(self, rnd: int) -> Payload | None:
        k = self.k
        if rnd <= k:
            if rnd <= len(self.incident):
                q, v = self.incident[rnd - 1]
                return Payload("edge", (self.node, v, q))
            return None
        if rnd <= 2 * k:
            if rnd == k + 1:
                self.ball = local_ball(self.n, self.node, k, self.known_edges)
                self.balls[self.node] = list(self.ball)
            z, d = self.ball[rnd - k - 1]
            return Payload("ball", (z, d))
        return self.send_after_balls(rnd)

    def receive(self, rnd, inbox):
        k = self.k
        if rnd <= k:
            for _, (kind, (a, b, q)) in inbox:
                self.known_edges.add((min(a, b), max(a, b), q))
        elif rnd <= 2 * k:
            for sender, (kind, (z, d)) in inbox:
                self.balls.setdefault(sender, []).append((z, d))
            if rnd == 2 * k:
                self.on_balls_complete()
        else:
            self.receive_after_balls(rnd, inbox)

    def on_balls_complete(self):
        pass

    def send_after_balls(self, rnd):
        return None

    def receive_after_balls(self, rnd, inbox):
        pass


class HittingSetProgram(BallProgram):
    def on_balls_complete(self):
        family = {v: [z for z, _ in entries] for v, entries in self.balls.items()}
        self.output = {
            "hitting_set": greedy_hitting_set(family),
            "ball": [z for z, _ in self.ball],
        }
        self.halted = True


@dataclass
class HittingSetResult:
    S: list[int]
    family: dict[int, list[int]]
    rounds_used: int
    trace: SimulationTrace | None = None


def hitting_set_bits(n: int, p: int) -> int:
    codec = Codec(n, p, 1)
    return max(default_bits(n, p), codec.required_bits(["edge", "ball"]))


def hitting_set_distributed(g: WeightedGraph, k: int, B: int | None = None) -> HittingSetResult:
    """Run the two-phase hitting-set program on the simulator in BCC mode."""
    if k > g.n:
        raise KTooLarge(f"k={k} exceeds n={g.n}")
    if k < 1:
        raise ValueError("k must be at least 1")
    B = B or hitting_set_bits(g.n, g.p)
    programs = [HittingSetProgram(u, g.n, k, g.neighbors(u)) for u in range(g.n)]
    trace = run(programs, g, SimConfig(Mode.BCC, B))
    sets = {tuple(out["hitting_set"]) for out in trace.outputs}
    if len(sets) != 1:
        raise AssertionError("nodes disagree on the hitting set")
    family = {u: out["ball"] for u, out in enumerate(trace.outputs)}
    return HittingSetResult(list(sets.pop()), family, trace.rounds, trace)


def hitting_set_reference(g: WeightedGraph, k: int) -> HittingSetResult:
    """Sequential pipeline: exact balls from Dijkstra, then greedy."""
    family = {u: k_closest(g, u, k) for u in range(g.n)}
    return HittingSetResult(greedy_hitting_set(family), family, 0)
