"""Set-disjointness diameter gadget and cut-bandwidth audits.

Node layout for parameter ``k`` (``n = 4k + 2``)::

    l_0 .. l_{2k-1}      ids 0 .. 2k-1       side A
    c_L                  id  2k              side A
    r_0 .. r_{2k-1}      ids 2k+1 .. 4k      side B
    c_R                  id  4k+1            side B

``l_0..l_{k-1}`` form L1 and ``l_k..l_{2k-1}`` form L2 (likewise R1, R2).
Bit ``i`` of an input is encoded by the pair ``(i mod k, k + i // k)``; the
corresponding edge is present when the bit is 0.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .graphcore import WeightedGraph, dumps_graph, exact_apsp, exact_diameter, make_graph
from .simulator import SimulationTrace, cut_traffic


class InvalidParameter(ValueError):
    pass


class IndexOutOfRange(InvalidParameter):
    pass


def k_of_n(n: int) -> int:
    return n // 10


def bit_index_map(i: int, k: int) -> tuple[int, int]:
    if not 0 <= i < k * k:
        raise IndexOutOfRange(f"bit index {i} outside [0, {k * k})")
    return i % k, k + i // k


@dataclass(frozen=True)
class DisjointnessInstance:
    k: int
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        size = self.k * self.k
        if len(self.a) != size or len(self.b) != size:
            raise InvalidParameter(f"inputs must have k^2 = {size} bits")
        if set(self.a) - {0, 1} or set(self.b) - {0, 1}:
            raise InvalidParameter("inputs must be bit strings")

    @classmethod
    def from_hex(cls, k: int, a: str, b: str) -> "DisjointnessInstance":
        """Bit ``i`` is bit ``i`` (least significant first) of the hex integer."""
        ia, ib = int(a, 16), int(b, 16)
        size = k * k
        if ia >> size or ib >> size:
            raise InvalidParameter(f"hex input wider than k^2 = {size} bits")
        return cls(k, tuple((ia >> i) & 1 for i in range(size)), tuple((ib >> i) & 1 for i in range(size)))

    def to_hex(self) -> tuple[str, str]:
        def pack(bits):
            return format(sum(bit << i for i, bit in enumerate(bits)), "x")
        return pack(self.a), pack(self.b)

    @classmethod
    def random(cls, k: int, rng: random.Random, disjoint: bool | None = None) -> "DisjointnessInstance":
        """Uniform random bits; ``disjoint=True`` clears b wherever a is set."""
        size = k * k
        a = tuple(rng.randint(0, 1) for _ in range(size))
        b = tuple(rng.randint(0, 1) for _ in range(size))
        if disjoint:
            b = tuple(y & (1 - x) for x, y in zip(a, b))
        elif disjoint is False and not any(x & y for x, y in zip(a, b)):
            i = rng.randrange(size)
            a = a[:i] + (1,) + a[i + 1:]
            b = b[:i] + (1,) + b[i + 1:]
        return cls(k, a, b)


def disjointness(inst: DisjointnessInstance) -> int:
    return 0 if any(x and y for x, y in zip(inst.a, inst.b)) else 1


@dataclass(frozen=True)
class GadgetGraph:
    graph: WeightedGraph
    k: int
    weighted: bool
    side: tuple[str, ...]
    role: tuple[str, ...]
    cut: tuple[tuple[int, int], ...]

    @property
    def n(self) -> int:
        return self.graph.n

    def l(self, v: int) -> int:
        return v

    def r(self, v: int) -> int:
        return 2 * self.k + 1 + v

    @property
    def c_left(self) -> int:
        return 2 * self.k

    @property
    def c_right(self) -> int:
        return 4 * self.k + 1

    def side_nodes(self, side: str) -> list[int]:
        return [u for u, s in enumerate(self.side) if s == side]

    def labels_json(self) -> str:
        return json.dumps({"side": list(self.side), "role": list(self.role)})


def build_gab(inst: DisjointnessInstance, p: int = 16, weighted: bool = True) -> GadgetGraph:
    k = inst.k
    if k < 2:
        raise InvalidParameter("gadget needs k >= 2")
    if weighted and p < 2:
        raise InvalidParameter("weighted gadget needs p >= 2 so that 1/p < 1")
    if not weighted:
        p = 1
    unit, light = p, 1  # numerators of weight 1 and 1/p

    def l(v):
        return v

    def r(v):
        return 2 * k + 1 + v

    c_l, c_r = 2 * k, 4 * k + 1
    edges = []
    for side_of, centre, bits in ((l, c_l, inst.a), (r, c_r, inst.b)):
        for v in range(2 * k):
            edges.append((centre, side_of(v), unit))
        for lo in (0, k):
            for x, y in combinations(range(lo, lo + k), 2):
                edges.append((side_of(x), side_of(y), unit))
        for i, bit in enumerate(bits):
            if bit == 0:
                x, y = bit_index_map(i, k)
                edges.append((side_of(x), side_of(y), unit))
    cut = [(l(v), r(v)) for v in range(2 * k)] + [(c_l, c_r)]
    edges.extend((x, y, light) for x, y in cut)
    g = make_graph(4 * k + 2, p, edges)

    side = ["A"] * (2 * k + 1) + ["B"] * (2 * k + 1)
    role = [f"L1:{v}" if v < k else f"L2:{v}" for v in range(2 * k)] + ["c_L"]
    role += [f"R1:{v}" if v < k else f"R2:{v}" for v in range(2 * k)] + ["c_R"]
    return GadgetGraph(g, k, weighted, tuple(side), tuple(role), tuple(cut))


def audit_structure(gadget: GadgetGraph, inst: DisjointnessInstance) -> list[str]:
    """Structural problems found in ``gadget``; empty when it matches the construction."""
    problems = []
    g, k = gadget.graph, gadget.k
    unit = g.p if gadget.weighted else 1
    if g.n != 4 * k + 2:
        problems.append(f"node count {g.n} != {4 * k + 2}")
    cut = set(gadget.cut)
    if len(cut) != 2 * k + 1:
        problems.append(f"{len(cut)} cut edges, expected {2 * k + 1}")
    for u, v, q in g.edges:
        crosses = gadget.side[u] != gadget.side[v]
        if crosses != ((u, v) in cut):
            problems.append(f"edge ({u}, {v}) crosses={crosses} but cut membership disagrees")
        expected = 1 if crosses else unit
        if q != expected:
            problems.append(f"edge ({u}, {v}) has numerator {q}, expected {expected}")
    for i in range(k * k):
        x, y = bit_index_map(i, k)
        for bits, f in ((inst.a, gadget.l), (inst.b, gadget.r)):
            present = g.edge_weight(f(x), f(y)) is not None
            if present != (bits[i] == 0):
                problems.append(f"input edge for bit {i} present={present} but bit={bits[i]}")
    for centre, f in ((gadget.c_left, gadget.l), (gadget.c_right, gadget.r)):
        for v in range(2 * k):
            if g.edge_weight(centre, f(v)) is None:
                problems.append(f"centre {centre} not adjacent to {f(v)}")
    return problems


@dataclass(frozen=True)
class GapReport:
    observed: Fraction
    predicted: Fraction
    consistent: bool
    disjoint: int
    refined: Fraction | None = None

    @property
    def refined_consistent(self) -> bool:
        return self.refined is not None and self.observed == self.refined


def predicted_diameter(inst: DisjointnessInstance, p: int) -> Fraction:
    """Dichotomy as stated for the weighted gadget: 1 + 1/p when disjoint, else 2 + 1/p."""
    return Fraction(p + 1, p) if disjointness(inst) else Fraction(2 * p + 1, p)


def refined_diameter(inst: DisjointnessInstance, p: int) -> Fraction:
    """Exact weighted diameter, including the disjoint-with-ones case.

    When some bit is 1 but the inputs are disjoint, the missing edge's
    endpoints on that side are joined only by a two-cut-edge detour of
    weight 1 + 2/p.
    """
    if not disjointness(inst):
        return Fraction(2 * p + 1, p)
    if any(inst.a) or any(inst.b):
        return Fraction(p + 2, p)
    return Fraction(p + 1, p)


def verify_diameter_gap(gadget: GadgetGraph, inst: DisjointnessInstance) -> GapReport:
    if not gadget.weighted:
        raise InvalidParameter("weighted gadget required")
    p = gadget.graph.p
    observed = exact_diameter(gadget.graph)
    predicted = predicted_diameter(inst, p)
    return GapReport(observed, predicted, observed == predicted, disjointness(inst), refined_diameter(inst, p))


def verify_unweighted_gap(gadget: GadgetGraph, inst: DisjointnessInstance) -> GapReport:
    if gadget.weighted:
        raise InvalidParameter("unweighted gadget required")
    observed = exact_diameter(gadget.graph)
    predicted = Fraction(2) if disjointness(inst) else Fraction(3)
    return GapReport(observed, predicted, observed == predicted, disjointness(inst))


def witness_pairs(gadget: GadgetGraph, inst: DisjointnessInstance) -> list[tuple[int, int, Fraction]]:
    """``(l_{u_i}, r_{v_i}, distance)`` for every index with ``a(i) = b(i) = 1``."""
    dist = exact_apsp(gadget.graph)
    out = []
    for i, (x, y) in enumerate(zip(inst.a, inst.b)):
        if x and y:
            u, v = bit_index_map(i, inst.k)
            lu, rv = gadget.l(u), gadget.r(v)
            out.append((lu, rv, gadget.graph.weight(dist[lu][rv])))
    return out


def approximation_separates(p: int) -> bool:
    """``(2 - 1/p) * (1 + 1/p) < 2 + 1/p``: a (2 - 1/p)-approximation tells the two cases apart."""
    return (2 - Fraction(1, p)) * (1 + Fraction(1, p)) < 2 + Fraction(1, p)


@dataclass
class AuditReport:
    per_round: list[dict]
    budget: int
    total_cut_bits: int

    @property
    def within_budget(self) -> bool:
        return all(r["within_budget"] for r in self.per_round)


def bandwidth_audit(trace: SimulationTrace, gadget: GadgetGraph) -> AuditReport:
    """Per-round bits crossing the A/B cut versus the ``n * B`` budget."""
    budget = gadget.n * trace.B
    bits = cut_traffic(trace, gadget.side_nodes("A"))
    rows = [
        {"round": t + 1, "cut_bits": c, "budget": budget, "within_budget": c <= budget}
        for t, c in enumerate(bits)
    ]
    return AuditReport(rows, budget, sum(bits))


def gadget_files(spec: dict) -> tuple[DisjointnessInstance, GadgetGraph, str, str]:
    """Build from a gadget spec ``{k, p, a, b, weighted}``; returns graph text and labels JSON."""
    inst = DisjointnessInstance.from_hex(int(spec["k"]), str(spec["a"]), str(spec["b"]))
    gadget = build_gab(inst, int(spec.get("p", 16)), bool(spec.get("weighted", True)))
    return inst, gadget, dumps_graph(gadget.graph), gadget.labels_json()
