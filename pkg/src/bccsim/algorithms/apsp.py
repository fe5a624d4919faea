"""Deterministic (2+o(1))-approximate APSP in the broadcast congested clique.

Pipeline, as executed by every node:

1. ``k`` rounds of lightest-edge broadcasts and ``k`` rounds of ball
   broadcasts (shared with the hitting-set program), giving every node all
   balls ``S^k(v)`` with exact distances, the hub set ``R`` and the
   shortcut-graph weights ``w'`` of its incident edges.
2. One round to agree on ``W``, the largest shortcut-graph weight.
3. For every rounding level, weighted source detection from ``R`` on the
   shortcut graph with ``K = |R|``.
4. ``|R|`` rounds in which each node broadcasts its best estimate to every
   hub; the final estimate combines shortcut weights and hub detours.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

from ..graphcore import UNREACHABLE, WeightedGraph, int_dijkstra, make_int_graph
from ..simulator import Codec, Mode, Payload, SimConfig, SimulationTrace, default_bits, run
from .hitting_set import BallProgram, greedy_hitting_set
from .rounding import ceil_log2, default_epsilon, horizon, max_level, rescale, rounded_weight
from .shortcut import DistanceBook, ShortcutGraph, build_shortcut_graph, shortcut_weight
from .source_detection import SourceDetector, weighted_source_detection

THEOREM = "theorem"
LISTING = "listing"


def ceil_sqrt(n: int) -> int:
    r = isqrt(n)
    return r if r * r == n else r + 1


@dataclass(frozen=True)
class ApspParams:
    k: int
    h: int
    eps: Fraction
    horizon_mode: str = THEOREM

    def __post_init__(self):
        if self.horizon_mode not in (THEOREM, LISTING):
            raise ValueError(f"unknown horizon mode {self.horizon_mode!r}")

    @classmethod
    def for_n(cls, n: int, horizon_mode: str = THEOREM) -> "ApspParams":
        s = ceil_sqrt(n)
        return cls(min(s, n), 4 * s, default_epsilon(n), horizon_mode)

    @property
    def qualify(self) -> int:
        """Largest rounded distance a level may report and still qualify."""
        return horizon(self.h, self.eps)

    @property
    def hop_budget(self) -> int:
        return self.qualify if self.horizon_mode == THEOREM else self.h

    def level_rounds(self, hubs: int) -> int:
        if self.horizon_mode == THEOREM:
            return self.hop_budget + hubs
        return self.h + hubs + 1


def _best_level(found: dict[int, int], limit: int, h: int, eps: Fraction):
    """``(estimate, level, rounded)`` minimising the rescaled distance over qualifying levels."""
    best = None
    for i, x in sorted(found.items()):
        if x > limit:
            continue
        est = rescale(x, h, eps, i)
        if best is None or est < best[0]:
            best = (est, i, x)
    return best


# -- MSSP -------------------------------------------------------------------


def _level_graph(sg: ShortcutGraph, h: int, eps: Fraction, i: int, budget: int):
    edges = []
    for (a, b), q in sorted(sg.weights.items()):
        w = rounded_weight(q, h, eps, i)
        if w <= budget:
            edges.append((a, b, w))
    return make_int_graph(sg.n, edges)


def mssp_approx(sg: ShortcutGraph, R, h: int, eps: Fraction | None = None,
                mode: Mode = Mode.BCC, horizon_mode: str = THEOREM):
    """Approximate distances from every hub by per-level weighted source detection.

    Returns ``(estimates, rounds)`` where ``estimates[(r, u)]`` is a weight-unit
    fraction or ``UNREACHABLE`` when no level qualifies.
    """
    hubs = sorted(set(R))
    if not hubs:
        raise ValueError("hub set must be non-empty")
    eps = eps if eps is not None else default_epsilon(sg.n)
    params = ApspParams(0, h, eps, horizon_mode)
    budget = params.hop_budget
    found: dict[tuple[int, int], dict[int, int]] = {}
    rounds = 0
    for i in range(max_level(h, sg.max_weight()) + 1):
        lg = _level_graph(sg, h, eps, i, budget)
        lists, trace = weighted_source_detection(lg, hubs, budget, len(hubs), mode)
        rounds += trace.rounds
        for u, lst in enumerate(lists):
            for d, r in lst:
                found.setdefault((r, u), {})[i] = d
    out = {}
    for r in hubs:
        for u in range(sg.n):
            best = _best_level(found.get((r, u), {}), params.qualify, h, eps)
            out[(r, u)] = UNREACHABLE if best is None else best[0] / sg.p
    return out, rounds


def mssp_reference(sg: ShortcutGraph, R, h: int, eps: Fraction, horizon_mode: str = THEOREM):
    """Same estimates as :func:`mssp_approx`, from capped Dijkstra per level, in numerator units."""
    params = ApspParams(0, h, eps, horizon_mode)
    budget = params.hop_budget
    found: dict[tuple[int, int], dict[int, int]] = {}
    for i in range(max_level(h, sg.max_weight()) + 1):
        lg = _level_graph(sg, h, eps, i, budget)
        for r in sorted(set(R)):
            for u, d in int_dijkstra(lg, r, cap=budget).items():
                found.setdefault((r, u), {})[i] = d
    out = {}
    for (r, u), levels in found.items():
        best = _best_level(levels, params.qualify, h, eps)
        if best is not None:
            out[(r, u)] = best
    return out


# -- result type ------------------------------------------------------------


@dataclass
class ApproxDistanceMatrix:
    n: int
    p: int
    values: list[list[Fraction]]
    provenance: list[list[object]]
    k: int
    h: int
    eps: Fraction
    hubs: list[int]
    levels: int
    rounds: int = 0
    extra: dict = field(default_factory=dict)

    def __getitem__(self, uv):
        u, v = uv
        return self.values[u][v]

    def max_ratio(self, exact: list[list[int]]) -> Fraction:
        """Largest ``estimate / exact`` over distinct pairs (``exact`` in numerator units)."""
        worst = Fraction(1)
        for u in range(self.n):
            for v in range(self.n):
                if u != v:
                    worst = max(worst, self.values[u][v] * self.p / exact[u][v])
        return worst


def diameter_estimate(m: ApproxDistanceMatrix) -> Fraction:
    return max(max(row) for row in m.values)


def _combine(u: int, n: int, w_row, hub_est) -> tuple[list[Fraction], list[object]]:
    """Row ``u`` of the final estimate, in numerator units.

    ``w_row[v]`` is ``min(w'(u,v), w'(v,u))`` or ``None``; ``hub_est[x][r]`` the
    estimate of ``d(x, r)`` broadcast by ``x``.
    """
    row: list = [None] * n
    prov: list = [None] * n
    mine = hub_est.get(u, {})
    for v in range(n):
        if v == u:
            row[v], prov[v] = Fraction(0), "self"
            continue
        best, tag = None, None
        if w_row[v] is not None:
            best, tag = Fraction(w_row[v]), "shortcut"
        theirs = hub_est.get(v, {})
        for r in sorted(mine):
            if r in theirs:
                cand = mine[r] + theirs[r]
                if best is None or cand < best:
                    best, tag = cand, ("hub", r)
        row[v], prov[v] = best, tag
    return row, prov


# -- distributed program ----------------------------------------------------


class ApspProgram(BallProgram):
    def __init__(self, node, n, incident, params: ApspParams):
        super().__init__(node, n, params.k, incident)
        self.params = params
        self.w_local = {v: q for v, q in incident}
        self.start_w = 2 * params.k + 1

    # phase 1 ends: hubs, incident shortcut weights
    def on_balls_complete(self):
        u = self.node
        self.book = DistanceBook(self.balls)
        self.hubs = greedy_hitting_set({v: [z for z, _ in e] for v, e in self.balls.items()})
        nbrs = set(self.w_local)
        nbrs.update(z for z, _ in self.balls[u] if z != u)
        nbrs.update(v for v, e in self.balls.items() if v != u and any(z == u for z, _ in e))
        self.gk = {v: shortcut_weight(self.book, u, v, self.w_local.get(v)) for v in sorted(nbrs)}
        self.W = max(self.gk.values(), default=1)

    def send_after_balls(self, rnd):
        if rnd == self.start_w:
            return Payload("maxw", (self.W,))
        if rnd < self.hub_start:
            return self._detect_send(rnd)
        j = rnd - self.hub_start
        r = self.hubs[j]
        best = self.estimates.get(r)
        if best is None:
            return None
        _, level, x = best
        return Payload("hub", (r, level, x))

    def receive_after_balls(self, rnd, inbox):
        if rnd == self.start_w:
            for _, (_, (w,)) in inbox:
                self.W = max(self.W, w)
            self._plan()
            return
        if rnd < self.hub_start:
            self._detect_receive(rnd, inbox)
            return
        params = self.params
        for sender, (_, (r, level, x)) in inbox:
            self.hub_est.setdefault(sender, {})[r] = rescale(x, params.h, params.eps, level)
        if rnd == self.hub_start + len(self.hubs) - 1:
            self._finish()

    def _plan(self):
        params = self.params
        self.levels = max_level(params.h, self.W) + 1
        self.per_level = params.level_rounds(len(self.hubs))
        self.det_start = self.start_w + 1
        self.hub_start = self.det_start + self.levels * self.per_level
        self.found: dict[int, dict[int, int]] = {}
        self.detector = None
        self.estimates = {}
        self.hub_est: dict[int, dict[int, Fraction]] = {}

    def _level_of(self, rnd):
        i, offset = divmod(rnd - self.det_start, self.per_level)
        return i, offset

    def _detect_send(self, rnd):
        i, offset = self._level_of(rnd)
        if offset == 0:
            params = self.params
            budget = params.hop_budget
            weights = {}
            for v, q in self.gk.items():
                w = rounded_weight(q, params.h, params.eps, i)
                if w <= budget:
                    weights[v] = w
            self.detector = SourceDetector(self.node, self.node in self.hubs, budget, len(self.hubs), weights)
        pair = self.detector.outgoing()
        return None if pair is None else Payload("source", pair)

    def _detect_receive(self, rnd, inbox):
        i, offset = self._level_of(rnd)
        det = self.detector
        for sender, (_, (d, s)) in inbox:
            det.incoming(rnd, sender, d, s)
        det.settle(rnd)
        if offset == self.per_level - 1:
            for d, s in det.result():
                self.found.setdefault(s, {})[i] = d
            self.detector = None
            if i == self.levels - 1:
                params = self.params
                for r in self.hubs:
                    best = _best_level(self.found.get(r, {}), params.qualify, params.h, params.eps)
                    if best is not None:
                        self.estimates[r] = best
                self.hub_est[self.node] = {r: b[0] for r, b in self.estimates.items()}
                if not self.hubs:
                    self._finish()

    def _finish(self):
        u, n = self.node, self.n
        w_row = [shortcut_weight(self.book, u, v, self.w_local.get(v)) if v != u else 0 for v in range(n)]
        row, prov = _combine(u, n, w_row, self.hub_est)
        self.output = {
            "row": row,
            "provenance": prov,
            "hubs": list(self.hubs),
            "levels": self.levels,
        }
        self.halted = True


def apsp_codec(n: int, p: int, params: ApspParams, B: int | None = None) -> Codec:
    # W <= n * p^2 bounds the level count before W is known
    top_level = max_level(params.h, n * p * p)
    probe = Codec(n, p, 1, max_hop=params.qualify, max_level=top_level)
    need = probe.required_bits(["edge", "ball", "maxw", "source", "hub"])
    B = B or max(default_bits(n, p), need)
    return Codec(n, p, B, max_hop=params.qualify, max_level=top_level)


def apsp_approx(g: WeightedGraph, horizon_mode: str = THEOREM, B: int | None = None,
                params: ApspParams | None = None) -> tuple[ApproxDistanceMatrix, SimulationTrace]:
    """Run the full approximate-APSP pipeline on the simulator in BCC mode."""
    params = params or ApspParams.for_n(g.n, horizon_mode)
    codec = apsp_codec(g.n, g.p, params, B)
    programs = [ApspProgram(u, g.n, g.neighbors(u), params) for u in range(g.n)]
    trace = run(programs, g, SimConfig(Mode.BCC, codec.B), codec)
    outs = trace.outputs
    values = [[x / g.p for x in out["row"]] for out in outs]
    matrix = ApproxDistanceMatrix(
        g.n, g.p, values, [out["provenance"] for out in outs], params.k, params.h, params.eps,
        outs[0]["hubs"], outs[0]["levels"], trace.rounds,
    )
    return matrix, trace


def apsp_reference(g: WeightedGraph, horizon_mode: str = THEOREM,
                   params: ApspParams | None = None) -> ApproxDistanceMatrix:
    """Sequential evaluation of the same estimator (exact balls, Dijkstra per level)."""
    params = params or ApspParams.for_n(g.n, horizon_mode)
    sg = build_shortcut_graph(g, params.k)
    hubs = greedy_hitting_set({u: [z for z, _ in e] for u, e in sg.balls.items()})
    est = mssp_reference(sg, hubs, params.h, params.eps, horizon_mode)
    hub_est: dict[int, dict[int, Fraction]] = {}
    for (r, u), (value, _, _) in est.items():
        hub_est.setdefault(u, {})[r] = value
    book = DistanceBook(sg.balls)
    values, prov = [], []
    for u in range(g.n):
        w_row = [shortcut_weight(book, u, v, g.edge_weight(u, v)) if v != u else 0 for v in range(g.n)]
        row, pr = _combine(u, g.n, w_row, hub_est)
        values.append([x / g.p for x in row])
        prov.append(pr)
    levels = max_level(params.h, sg.max_weight()) + 1
    return ApproxDistanceMatrix(g.n, g.p, values, prov, params.k, params.h, params.eps, hubs, levels)


def approximation_bound(eps: Fraction) -> Fraction:
    return 2 * (1 + eps) ** 2
