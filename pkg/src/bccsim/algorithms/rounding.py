"""Per-level integer reweighting for (1+eps)-approximate hop-bounded distances.

Levels are indexed in numerator units: level ``i`` has scale ``D_i = 2**i``
(that is ``2**i / p`` in weight units) and the rounded weight of an edge with
numerator ``q`` is ``ceil(2*h*q / (eps * D_i))``.  A rounded distance ``x`` at
level ``i`` rescales to ``eps * D_i * x / (2h)`` numerator units.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from ..graphcore import UNREACHABLE, WeightedGraph


def ceil_log2(x: int) -> int:
    """Smallest ``e >= 0`` with ``2**e >= x``."""
    return max(0, (x - 1).bit_length())


def default_epsilon(n: int) -> Fraction:
    return Fraction(1, max(1, ceil_log2(n)))


def max_level(h: int, W: int) -> int:
    """Highest level needed: any h-hop path weighs at most ``h * W`` numerator units."""
    return ceil_log2(h * W)


def horizon(h: int, eps: Fraction) -> int:
    """Rounded-distance threshold ``ceil((1 + 2/eps) * h)`` for a level to qualify."""
    return ceil((1 + 2 / eps) * h)


def rounded_weight(q: int, h: int, eps: Fraction, i: int) -> int:
    num = 2 * h * q * eps.denominator
    den = eps.numerator * (1 << i)
    return -(-num // den)


def rescale(x: int, h: int, eps: Fraction, i: int) -> Fraction:
    return eps * (1 << i) * x / (2 * h)


@dataclass
class RoundedWeights:
    level: int
    scale: int
    h: int
    eps: Fraction
    W: int
    weights: dict[tuple[int, int], int]


def round_weights(sg, h: int, eps: Fraction, i: int) -> RoundedWeights:
    """Rounded integer weights of every edge of ``sg`` (anything with ``weights`` or ``edges``)."""
    if h < 1:
        raise ValueError("h must be at least 1")
    if hasattr(sg, "weights"):
        base = dict(sg.weights)
    else:
        base = {(u, v): q for u, v, q in sg.edges}
    W = max(base.values())
    if not 0 <= i <= max_level(h, W):
        raise ValueError(f"level {i} outside [0, {max_level(h, W)}]")
    rounded = {e: rounded_weight(q, h, eps, i) for e, q in base.items()}
    return RoundedWeights(i, 1 << i, h, eps, W, rounded)


def _h_hop_int(n: int, edges: dict[tuple[int, int], int], s: int, h: int) -> list:
    dist: list = [UNREACHABLE] * n
    dist[s] = 0
    for _ in range(h):
        nxt = list(dist)
        for (a, b), w in edges.items():
            for x, y in ((a, b), (b, a)):
                if dist[x] is not UNREACHABLE and (nxt[y] is UNREACHABLE or dist[x] + w < nxt[y]):
                    nxt[y] = dist[x] + w
        if nxt == dist:
            break
        dist = nxt
    return dist


def rounded_h_hop_estimates(g: WeightedGraph, s: int, h: int, eps: Fraction | None = None) -> list:
    """Sequential (1+eps)-approximate h-hop distances from ``s`` via weight rounding.

    For every level the h-hop distance under the rounded weights is computed;
    levels whose rounded distance stays within :func:`horizon` qualify and the
    smallest rescaled value wins.  Values are numerator-unit fractions, or
    ``UNREACHABLE`` when no level qualifies.
    """
    eps = eps if eps is not None else default_epsilon(g.n)
    W = max(q for _, _, q in g.edges)
    limit = horizon(h, eps)
    best: list = [UNREACHABLE] * g.n
    for i in range(max_level(h, W) + 1):
        rw = round_weights(g, h, eps, i)
        dist = _h_hop_int(g.n, rw.weights, s, h)
        for v, x in enumerate(dist):
            if x is UNREACHABLE or x > limit:
                continue
            est = rescale(x, h, eps, i)
            if best[v] is UNREACHABLE or est < best[v]:
                best[v] = est
    return best
