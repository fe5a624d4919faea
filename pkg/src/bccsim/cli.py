"""Experiment harness: ``bccsim <command> [flags]``.

Every command writes one report (JSON by default, CSV where noted) and exits
with status 0 only when all of the report's validity checks pass.  Reports go
to ``--out``; without it they go to ``$BCCSIM_OUT/<command>.<format>`` when
that variable is set, otherwise to stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt, log
from pathlib import Path

from .algorithms.apsp import LISTING, THEOREM, ApspParams, apsp_approx, approximation_bound, ceil_sqrt, diameter_estimate
from .algorithms.hitting_set import hitting_set_distributed, hitting_set_reference, is_hitting_set
from .algorithms.source_detection import detection_reference, source_detection
from .graphcore import dumps_graph, exact_apsp, exact_diameter, hop_diameter, make_graph, make_int_graph, read_graph
from .lowerbound import (
    DisjointnessInstance,
    approximation_separates,
    build_gab,
    verify_diameter_gap,
    verify_unweighted_gap,
)
from .simulator import Mode

OUT_ENV = "BCCSIM_OUT"


class InvalidDensity(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Resolved command-line settings.

    Defaults: ``p=16``, ``seed=0``, ``density=0.2``, ``mode=bcc``, ``reps=1``,
    ``format=json``, ``bits=None`` (smallest width the messages need).
    """

    command: str
    n: int | None = None
    k: int | None = None
    p: int = 16
    seed: int = 0
    bits: int | None = None
    mode: str = "bcc"
    out: str | None = None
    reps: int = 1
    format: str = "json"
    density: float = 0.2
    workers: int = 1
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__ if f != "extra"}
        values = {k: v for k, v in vars(args).items() if k in known and v is not None}
        extra = {k: v for k, v in vars(args).items() if k not in known and k != "func"}
        return cls(extra=extra, **values)

    def output_path(self) -> Path | None:
        if self.out:
            return Path(self.out)
        base = os.environ.get(OUT_ENV)
        if base:
            return Path(base) / f"{self.command}.{self.format}"
        return None


def gen_random(n: int, p: int, density: float, seed: int):
    """Random connected graph: a shuffled spanning tree plus each other pair with prob. ``density``.

    Numerators are uniform on ``1..p*p``, i.e. weights uniform on ``{1..p^2}/p``.
    """
    if not 0 <= density <= 1:
        raise InvalidDensity(f"density {density} outside [0, 1]")
    if n < 1:
        raise ValueError("n must be positive")
    rng = random.Random(seed)
    perm = list(range(n))
    rng.shuffle(perm)
    edges: dict[tuple[int, int], int] = {}
    for i in range(1, n):
        a, b = perm[i], perm[rng.randrange(i)]
        edges[(min(a, b), max(a, b))] = rng.randint(1, p * p)
    for a in range(n):
        for b in range(a + 1, n):
            if (a, b) not in edges and rng.random() < density:
                edges[(a, b)] = rng.randint(1, p * p)
    return make_graph(n, p, [(a, b, q) for (a, b), q in sorted(edges.items())])


def _ratio_milli(approx: Fraction, exact: int) -> int:
    return (approx * 1000) // exact if exact else 1000


# -- report builders --------------------------------------------------------


def apsp_report(g, bits=None, horizon_mode=THEOREM) -> tuple[dict, str]:
    """APSP report against the Dijkstra oracle plus the trace JSON."""
    params = ApspParams.for_n(g.n, horizon_mode)
    matrix, trace = apsp_approx(g, horizon_mode, bits, params)
    exact = exact_apsp(g)
    bound = approximation_bound(params.eps)
    entries, worst, lower_ok, upper_ok = [], Fraction(1), True, True
    for u in range(g.n):
        for v in range(g.n):
            approx_num = matrix[u, v] * g.p
            d = exact[u][v]
            if u != v:
                worst = max(worst, approx_num / d)
            lower_ok &= approx_num >= d
            upper_ok &= approx_num <= bound * d
            entries.append({
                "u": u, "v": v, "exact_num": d, "approx_num": str(approx_num),
                "ratio_milli": _ratio_milli(approx_num, d),
            })
    symmetric = all(matrix[u, v] == matrix[v, u] for u in range(g.n) for v in range(g.n))
    zero_diag = all(matrix[u, u] == 0 for u in range(g.n))
    checks = {"lower": lower_ok, "upper": upper_ok, "symmetric": symmetric, "zero_diagonal": zero_diag}
    report = {
        "n": g.n, "p": g.p, "k": params.k, "h": params.h,
        "epsilon_denominator": params.eps.denominator,
        "horizon": horizon_mode, "B": trace.B,
        "hitting_set": matrix.hubs, "levels": matrix.levels,
        "rounds": matrix.rounds, "total_bits": trace.total_bits(),
        "max_ratio": str(worst), "max_ratio_milli": _ratio_milli(worst, 1),
        "bound": str(bound),
        "diameter_exact": str(exact_diameter(g)), "diameter_estimate": str(diameter_estimate(matrix)),
        "checks": checks, "valid": all(checks.values()),
        "entries": entries,
    }
    return report, trace.to_json()


def apsp_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, ["u", "v", "exact_num", "approx_num", "ratio_milli"], lineterminator="\n")
    w.writeheader()
    w.writerows(report["entries"])
    return buf.getvalue()


def hitting_set_report(g, k: int, bits=None) -> tuple[dict, str]:
    dist = hitting_set_distributed(g, k, bits)
    ref = hitting_set_reference(g, k)
    checks = {
        "valid_hitting_set": is_hitting_set(dist.S, dist.family),
        "matches_reference": dist.S == ref.S and dist.family == ref.family,
        "rounds_equal_2k": dist.rounds_used == 2 * k,
    }
    report = {
        "n": g.n, "k": k, "hitting_set": dist.S, "size": len(dist.S),
        "rounds": dist.rounds_used, "total_bits": dist.trace.total_bits(),
        "checks": checks, "valid": all(checks.values()),
    }
    return report, dist.trace.to_json()


def source_detection_report(g, sources, H: int, K: int, mode: Mode, bits=None) -> tuple[dict, str]:
    lists, trace = source_detection(g, sources, H, K, mode, bits)
    unit = make_int_graph(g.n, [(u, v, 1) for u, v, _ in g.edges])
    ref = detection_reference(unit, sources, H, K)
    budget = min(H, hop_diameter(g)) + min(K, len(set(sources)))
    checks = {"matches_reference": lists == ref, "rounds_within_bound": trace.rounds <= budget}
    report = {
        "n": g.n, "sources": sorted(set(sources)), "H": H, "K": K, "mode": mode.value,
        "rounds": trace.rounds, "round_bound": budget, "total_bits": trace.total_bits(),
        "lists": [[list(pair) for pair in lst] for lst in lists],
        "checks": checks, "valid": all(checks.values()),
    }
    return report, trace.to_json()


def _gadget_row(inst: DisjointnessInstance, p: int) -> dict:
    weighted = verify_diameter_gap(build_gab(inst, p, True), inst)
    plain = verify_unweighted_gap(build_gab(inst, p, False), inst)
    a, b = inst.to_hex()
    return {
        "k": inst.k, "a": a, "b": b, "disjoint": weighted.disjoint,
        "diameter": str(weighted.observed), "predicted": str(weighted.predicted),
        "refined": str(weighted.refined), "consistent": weighted.consistent,
        "refined_consistent": weighted.refined_consistent,
        "unweighted_diameter": str(plain.observed), "unweighted_consistent": plain.consistent,
        "upper_bound_ok": weighted.observed <= 2 + Fraction(1, p),
    }


def gadget_report(instances, p: int) -> dict:
    rows = [_gadget_row(inst, p) for inst in instances]
    checks = {
        "dichotomy": all(r["consistent"] for r in rows),
        "refined_dichotomy": all(r["refined_consistent"] for r in rows),
        "unweighted": all(r["unweighted_consistent"] for r in rows),
        "upper_bound": all(r["upper_bound_ok"] for r in rows),
        "separation": approximation_separates(p),
    }
    return {
        "p": p, "instances": len(rows),
        "consistent_fraction": str(Fraction(sum(r["consistent"] for r in rows), max(1, len(rows)))),
        "rows": rows, "checks": checks, "valid": all(checks.values()),
    }


def random_gadget_instances(count: int, seed: int, k_values=range(2, 7)) -> list[DisjointnessInstance]:
    """``count`` seeded instances (alternately forced disjoint / intersecting) plus all-zero and all-one ones."""
    rng = random.Random(seed)
    ks = list(k_values)
    out = [DisjointnessInstance.random(ks[i % len(ks)], rng, disjoint=(i % 2 == 0)) for i in range(count)]
    for k in ks:
        out.append(DisjointnessInstance(k, (0,) * (k * k), (0,) * (k * k)))
        out.append(DisjointnessInstance(k, (1,) * (k * k), (1,) * (k * k)))
    return out


def _bench_one(job):
    index, n, p, density, seed, bits = job
    g = gen_random(n, p, density, seed)
    report, _ = apsp_report(g, bits)
    return {"rep": index, "n": n, "seed": seed, "rounds": report["rounds"],
            "total_bits": report["total_bits"], "max_ratio": report["max_ratio"], "valid": report["valid"]}


def bench_report(sizes, reps: int, p: int, density: float, seed: int, bits=None, workers: int = 1) -> dict:
    """Round counts of the APSP pipeline across sizes.

    The scaling check asks that rounds grow no faster than ``1.5 * sqrt``
    of the size ratio between the smallest and largest size.
    """
    jobs = []
    for n in sizes:
        for r in range(reps):
            jobs.append((len(jobs), n, p, density, seed + r, bits))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    rows.sort(key=lambda r: r["rep"])
    mean_rounds = {n: Fraction(sum(r["rounds"] for r in rows if r["n"] == n), reps) for n in sizes}
    checks = {"all_valid": all(r["valid"] for r in rows)}
    report = {"sizes": list(sizes), "reps": reps, "p": p, "density": density, "runs": rows,
              "mean_rounds": {str(n): str(v) for n, v in mean_rounds.items()}}
    if len(sizes) > 1:
        lo, hi = min(sizes), max(sizes)
        ratio = mean_rounds[hi] / mean_rounds[lo]
        allowed = Fraction(3, 2) * Fraction(isqrt(hi * 10**6 // lo), 1000)
        report["rounds_ratio"] = str(ratio)
        report["rounds_ratio_float"] = round(float(ratio), 4)
        report["rounds_ratio_allowed"] = str(allowed)
        report["log_log_slope"] = round(log(float(ratio)) / log(hi / lo), 4)
        checks["scaling"] = ratio <= allowed
    report["checks"] = checks
    report["valid"] = all(checks.values())
    return report


# -- command handlers -------------------------------------------------------


def _emit(cfg: ExperimentConfig, text: str) -> None:
    path = cfg.output_path()
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _dump(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _write_trace(cfg: ExperimentConfig, trace_json: str) -> None:
    target = cfg.extra.get("trace")
    if target:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(trace_json)


def cmd_gen_random(cfg):
    if cfg.n is None:
        raise SystemExit("--n is required")
    _emit(cfg, dumps_graph(gen_random(cfg.n, cfg.p, cfg.density, cfg.seed)))
    return 0


def _instance_from(cfg) -> DisjointnessInstance:
    k = cfg.k or 2
    a, b = cfg.extra.get("a"), cfg.extra.get("b")
    if a is None or b is None:
        return DisjointnessInstance.random(k, random.Random(cfg.seed))
    return DisjointnessInstance.from_hex(k, a, b)


def cmd_gen_gadget(cfg):
    inst = _instance_from(cfg)
    weighted = not cfg.extra.get("unweighted", False)
    gadget = build_gab(inst, cfg.p, weighted)
    _emit(cfg, dumps_graph(gadget.graph))
    labels = cfg.extra.get("labels")
    if labels:
        Path(labels).write_text(gadget.labels_json() + "\n")
    spec = cfg.extra.get("spec")
    if spec:
        a, b = inst.to_hex()
        Path(spec).write_text(json.dumps({"k": inst.k, "p": cfg.p, "a": a, "b": b, "weighted": weighted}) + "\n")
    return 0


def cmd_run_apsp(cfg):
    if cfg.mode != "bcc":
        raise SystemExit("run-apsp only runs in bcc mode")
    g = read_graph(cfg.extra["graph"])
    report, trace_json = apsp_report(g, cfg.bits, cfg.extra.get("horizon") or THEOREM)
    _write_trace(cfg, trace_json)
    _emit(cfg, apsp_csv(report) if cfg.format == "csv" else _dump(report))
    return 0 if report["valid"] else 1


def cmd_run_hitting_set(cfg):
    g = read_graph(cfg.extra["graph"])
    report, trace_json = hitting_set_report(g, cfg.k or ceil_sqrt(g.n), cfg.bits)
    _write_trace(cfg, trace_json)
    _emit(cfg, _dump(report))
    return 0 if report["valid"] else 1


def cmd_run_source_detection(cfg):
    g = read_graph(cfg.extra["graph"])
    sources = [int(s) for s in cfg.extra["sources"].split(",") if s]
    report, trace_json = source_detection_report(
        g, sources, cfg.extra["H"], cfg.extra["K"], Mode(cfg.mode), cfg.bits)
    _write_trace(cfg, trace_json)
    _emit(cfg, _dump(report))
    return 0 if report["valid"] else 1


def cmd_verify_gadget(cfg):
    if cfg.extra.get("a") is not None:
        instances = [_instance_from(cfg)]
    else:
        instances = random_gadget_instances(cfg.reps, cfg.seed)
    report = gadget_report(instances, cfg.p)
    if cfg.format == "csv":
        buf = io.StringIO()
        cols = ["k", "a", "b", "disjoint", "diameter", "predicted", "refined", "consistent",
                "refined_consistent", "unweighted_diameter", "unweighted_consistent"]
        w = csv.DictWriter(buf, cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(report["rows"])
        _emit(cfg, buf.getvalue())
    else:
        _emit(cfg, _dump(report))
    return 0 if report["valid"] else 1


def cmd_bench(cfg):
    sizes = [int(s) for s in (cfg.extra.get("sizes") or "64,256").split(",")]
    report = bench_report(sizes, cfg.reps, cfg.p, cfg.density, cfg.seed, cfg.bits, cfg.workers)
    _emit(cfg, _dump(report))
    return 0 if report["valid"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bccsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, graph=False):
        sp.add_argument("--p", type=int, help="weight denominator (default 16)")
        sp.add_argument("--seed", type=int, help="64-bit seed (default 0)")
        sp.add_argument("--bits", type=int, help="message width B; default is the smallest that fits")
        sp.add_argument("--mode", choices=["congest", "bcc"], help="communication model (default bcc)")
        sp.add_argument("--out", help=f"report path (default ${OUT_ENV}/<command>.<format> or stdout)")
        sp.add_argument("--format", choices=["json", "csv"], help="report format (default json)")
        sp.add_argument("--reps", type=int, help="repetitions / random instances (default 1)")
        sp.add_argument("--trace", help="also write the simulation trace JSON here")
        if graph:
            sp.add_argument("graph", help="graph file in 'n m p' / 'u v q' text format")

    sp = sub.add_parser("gen-random", help="seeded random connected weighted graph")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--density", type=float)
    sp.set_defaults(func=cmd_gen_random)

    sp = sub.add_parser("gen-gadget", help="disjointness gadget graph (random inputs unless --a/--b)")
    common(sp)
    sp.add_argument("--k", type=int)
    sp.add_argument("--a", help="hex bit string, bit i = i-th least significant bit")
    sp.add_argument("--b")
    sp.add_argument("--unweighted", action="store_true")
    sp.add_argument("--labels", help="write the side/role labels JSON here")
    sp.add_argument("--spec", help="write the gadget spec JSON here")
    sp.set_defaults(func=cmd_gen_gadget)

    sp = sub.add_parser("run-apsp", help="approximate APSP with oracle comparison")
    common(sp, graph=True)
    sp.add_argument("--horizon", choices=[THEOREM, LISTING])
    sp.set_defaults(func=cmd_run_apsp)

    sp = sub.add_parser("run-hitting-set", help="distributed k-hitting set vs local reference")
    common(sp, graph=True)
    sp.add_argument("--k", type=int, help="ball size (default ceil(sqrt(n)))")
    sp.set_defaults(func=cmd_run_hitting_set)

    sp = sub.add_parser("run-source-detection", help="(S,H,K)-source detection vs BFS oracle")
    common(sp, graph=True)
    sp.add_argument("--sources", required=True, help="comma-separated node ids")
    sp.add_argument("--H", type=int, required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.set_defaults(func=cmd_run_source_detection)

    sp = sub.add_parser("verify-gadget", help="diameter dichotomy table for gadget instances")
    common(sp)
    sp.add_argument("--k", type=int)
    sp.add_argument("--a")
    sp.add_argument("--b")
    sp.set_defaults(func=cmd_verify_gadget, reps=200)

    sp = sub.add_parser("bench", help="APSP round counts across graph sizes")
    common(sp)
    sp.add_argument("--sizes", help="comma-separated n values (default 64,256)")
    sp.add_argument("--density", type=float)
    sp.add_argument("--workers", type=int, help="parallel processes (default 1)")
    sp.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = ExperimentConfig.from_args(args)
    return args.func(cfg)


if __name__ == "__main__":
    sys.exit(main())
