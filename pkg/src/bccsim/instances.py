"""Hand-built graphs that stress the approximate-APSP estimator."""

from __future__ import annotations

from .graphcore import WeightedGraph, make_graph


def bridge_graph(leaves: int = 10, petals: int = 3, bridge: int = 200, hubdist: int = 198,
                 p: int = 16) -> tuple[WeightedGraph, int, int]:
    """Two mirrored clusters joined by one heavy bridge; returns ``(g, u, v)``.

    Each cluster is an edge ``u - x`` plus ``petals`` unit leaves on ``u`` and
    a star centre ``c`` at distance ``hubdist`` from ``u`` carrying ``leaves``
    unit leaves; the clusters are joined by ``x - y`` of weight ``bridge``
    (all weights are numerators over ``p``).  With ``k = ceil(sqrt n)`` the
    balls of the star leaves force the star centres into the hub set, while
    ``u`` and ``v`` see neither hub nor each other in their balls.  Their
    estimate is then a hub detour of length about ``3 * d(u, v)``.
    """
    edges: list[tuple[int, int, int]] = []
    ends = []
    nxt = 0

    def new() -> int:
        nonlocal nxt
        nxt += 1
        return nxt - 1

    for _ in range(2):
        u, x = new(), new()
        edges.append((u, x, 1))
        edges.extend((u, new(), 1) for _ in range(petals))
        c = new()
        edges.append((u, c, hubdist))
        edges.extend((c, new(), 1) for _ in range(leaves))
        ends.append((u, x))
    (u, x), (v, y) = ends
    edges.append((x, y, bridge))
    return make_graph(nxt, p, edges), u, v
