"""Round-synchronous CONGEST / BCC execution engine with bit-exact accounting.

A node program is a small state machine.  In round ``t`` every live node may
produce one broadcast payload (:meth:`NodeProgram.send`); the engine then
hands each live node the payloads it is entitled to see
(:meth:`NodeProgram.receive`).  In CONGEST mode a node hears its graph
neighbours, in BCC mode it hears everybody.  Messages sent in round ``t`` are
therefore visible before round ``t + 1`` starts.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

from .graphcore import WeightedGraph


class Mode(str, Enum):
    CONGEST = "congest"
    BCC = "bcc"


class SimulationError(RuntimeError):
    pass


class MessageTooLarge(SimulationError):
    pass


class MalformedBits(SimulationError, ValueError):
    pass


class RoundLimitExceeded(SimulationError):
    pass


def bits_for(count: int) -> int:
    """Width of an unsigned field holding values in ``[0, count)``."""
    return max(1, (count - 1).bit_length())


def default_bits(n: int, p: int) -> int:
    """Bandwidth for one (kind, NodeId, NodeId, weight-numerator) record plus slack."""
    return 3 * bits_for(n) + (p * p).bit_length() + 4


# -- payloads and codec ------------------------------------------------------

TAG_BITS = 4

# field types: id (node id), weight (edge numerator <= p^2), dist (path
# numerator <= n*p^2), hop (integer <= max_hop), level (integer <= max_level)
KINDS: dict[str, tuple[str, ...]] = {
    "edge": ("id", "id", "weight"),
    "ball": ("id", "dist"),
    "maxw": ("dist",),
    "source": ("hop", "id"),
    "hub": ("id", "level", "hop"),
    "value": ("id",),
}
_KIND_TAGS = {kind: i for i, kind in enumerate(KINDS)}
_TAG_KINDS = {i: kind for kind, i in _KIND_TAGS.items()}


class Payload(NamedTuple):
    kind: str
    fields: tuple[int, ...]


@dataclass(frozen=True)
class Codec:
    n: int
    p: int
    B: int
    max_hop: int = 0
    max_level: int = 0

    def width(self, ftype: str) -> int:
        if ftype == "id":
            return bits_for(self.n)
        if ftype == "weight":
            return (self.p * self.p).bit_length()
        if ftype == "dist":
            return bits_for(self.n) + (self.p * self.p).bit_length()
        if ftype == "hop":
            return max(1, max(self.max_hop, self.n).bit_length())
        if ftype == "level":
            return max(1, self.max_level.bit_length())
        raise KeyError(ftype)

    def size(self, kind: str) -> int:
        return TAG_BITS + sum(self.width(f) for f in KINDS[kind])

    def required_bits(self, kinds: Iterable[str]) -> int:
        return max(self.size(k) for k in kinds)

    def encode(self, payload: Payload) -> str:
        layout = KINDS.get(payload.kind)
        if layout is None or len(layout) != len(payload.fields):
            raise ValueError(f"payload {payload!r} does not match a known layout")
        size = self.size(payload.kind)
        if size > self.B:
            raise MessageTooLarge(f"{payload.kind} payload needs {size} bits, B={self.B}")
        parts = [format(_KIND_TAGS[payload.kind], f"0{TAG_BITS}b")]
        for ftype, value in zip(layout, payload.fields):
            w = self.width(ftype)
            if not 0 <= value < (1 << w):
                raise MessageTooLarge(f"value {value} does not fit the {w}-bit {ftype} field")
            parts.append(format(value, f"0{w}b"))
        return "".join(parts)

    def decode(self, bits: str) -> Payload:
        if len(bits) < TAG_BITS or set(bits) - {"0", "1"}:
            raise MalformedBits(f"not a payload bit string: {bits!r}")
        kind = _TAG_KINDS.get(int(bits[:TAG_BITS], 2))
        if kind is None:
            raise MalformedBits(f"unknown kind tag {bits[:TAG_BITS]}")
        if len(bits) != self.size(kind):
            raise MalformedBits(f"{kind} payload must be {self.size(kind)} bits, got {len(bits)}")
        pos = TAG_BITS
        values = []
        for ftype in KINDS[kind]:
            w = self.width(ftype)
            values.append(int(bits[pos:pos + w], 2))
            pos += w
        return Payload(kind, tuple(values))


def encode_payload(payload: Payload, codec: Codec) -> str:
    return codec.encode(payload)


def decode_payload(bits: str, codec: Codec) -> Payload:
    return codec.decode(bits)


# -- programs, config, trace -------------------------------------------------


@dataclass(frozen=True)
class SimConfig:
    mode: Mode
    B: int
    max_rounds: int = 1_000_000

    def __post_init__(self):
        if self.max_rounds <= 0:
            raise ValueError("max_rounds must be positive")
        if self.B <= 0:
            raise ValueError("B must be positive")


class NodeProgram:
    """Base class for per-node behaviour.

    Subclasses read only their own state, ``node``, ``n`` and the messages
    handed to :meth:`receive`.  Set ``halted`` once done and leave the result
    in ``output``.
    """

    def __init__(self, node: int, n: int):
        self.node = node
        self.n = n
        self.halted = False
        self.output = None

    def send(self, rnd: int) -> Payload | None:
        return None

    def receive(self, rnd: int, inbox: Sequence[tuple[int, Payload]]) -> None:
        pass


class Record(NamedTuple):
    round: int
    node: int
    kind: str
    bits: int
    fields: tuple[int, ...]


@dataclass
class SimulationTrace:
    mode: Mode
    B: int
    n: int
    rounds: int = 0
    records: list[Record] = field(default_factory=list)
    outputs: list = field(default_factory=list)
    neighbors: tuple[frozenset, ...] = ()

    def by_round(self) -> list[list[Record]]:
        out: list[list[Record]] = [[] for _ in range(self.rounds)]
        for rec in self.records:
            out[rec.round - 1].append(rec)
        return out

    def total_bits(self) -> int:
        return sum(r.bits for r in self.records)

    def to_json(self) -> str:
        doc = {
            "mode": self.mode.value,
            "B": self.B,
            "rounds": self.rounds,
            "per_round": [
                {"round": r.round, "node": r.node, "kind": r.kind, "bits": r.bits}
                for r in self.records
            ],
        }
        return json.dumps(doc, sort_keys=True)

    def summary_csv(self, partition: Iterable[int] | None = None) -> str:
        totals = [0] * self.rounds
        for rec in self.records:
            totals[rec.round - 1] += rec.bits
        cut = cut_traffic(self, partition) if partition is not None else [0] * self.rounds
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["round", "total_bits", "cut_bits"])
        for t in range(self.rounds):
            w.writerow([t + 1, totals[t], cut[t]])
        return buf.getvalue()


def run(programs: Sequence[NodeProgram], comm_graph: WeightedGraph, config: SimConfig,
        codec: Codec | None = None) -> SimulationTrace:
    """Execute ``programs`` in lockstep until every one has halted."""
    n = comm_graph.n
    if len(programs) != n:
        raise ValueError(f"need {n} programs, got {len(programs)}")
    if codec is None:
        codec = Codec(n, comm_graph.p, config.B)
    elif codec.B != config.B:
        codec = Codec(codec.n, codec.p, config.B, codec.max_hop, codec.max_level)
    neighbors = tuple(frozenset(v for v, _ in comm_graph.neighbors(u)) for u in range(n))
    trace = SimulationTrace(config.mode, config.B, n, neighbors=neighbors)
    bcc = config.mode == Mode.BCC
    rnd = 0
    while not all(prog.halted for prog in programs):
        if rnd >= config.max_rounds:
            raise RoundLimitExceeded(f"programs still running after {config.max_rounds} rounds")
        rnd += 1
        sent: list[tuple[int, Payload]] = []
        for u, prog in enumerate(programs):
            if prog.halted:
                continue
            payload = prog.send(rnd)
            if payload is None:
                continue
            bits = codec.encode(payload)
            delivered = codec.decode(bits)
            sent.append((u, delivered))
            trace.records.append(Record(rnd, u, payload.kind, len(bits), delivered.fields))
        for v, prog in enumerate(programs):
            if prog.halted:
                continue
            if bcc:
                inbox = [m for m in sent if m[0] != v]
            else:
                nb = neighbors[v]
                inbox = [m for m in sent if m[0] in nb]
            prog.receive(rnd, inbox)
    trace.rounds = rnd
    trace.outputs = [prog.output for prog in programs]
    return trace


def cut_traffic(trace: SimulationTrace, partition: Iterable[int], direction: str = "both") -> list[int]:
    """Bits crossing the cut ``(P, V \\ P)`` in each round.

    A broadcast is charged once, with its full size, when at least one of its
    receivers is on the other side.  ``direction="out"`` counts only senders
    inside ``P``.
    """
    part = frozenset(partition)
    if not part or len(part) >= trace.n or not all(0 <= u < trace.n for u in part):
        raise ValueError("partition must be a non-empty proper subset of the nodes")
    per_round = [0] * trace.rounds
    for rec in trace.records:
        inside = rec.node in part
        if direction == "out" and not inside:
            continue
        if trace.mode == Mode.BCC:
            crosses = True
        else:
            crosses = any((v in part) != inside for v in trace.neighbors[rec.node])
        if crosses:
            per_round[rec.round - 1] += rec.bits
    return per_round


def check_broadcast_only(trace: SimulationTrace) -> bool:
    """True when no node emitted more than one payload in any round."""
    seen = set()
    for rec in trace.records:
        key = (rec.round, rec.node)
        if key in seen:
            return False
        seen.add(key)
    return True
