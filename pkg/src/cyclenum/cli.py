"""Command-line driver for cycle enumeration runs.

Examples::

    cyclenum --input g.txt --algo johnson --parallel fine --window 1h --threads 8
    cyclenum --synthetic worst-case --n 14 --parallel coarse --threads 8
    cyclenum --synthetic fig5a --m 6 --algo tiernan --output stats --format csv
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field

from . import _backend
from .graph import EdgeListParseError, TemporalGraph, load_edge_list
from .parallel import ParallelConfig, parallel_enumerate
from .stats import CycleSink, SearchStats
from .synthetic import SYNTHETIC_KINDS, generate_synthetic
from .temporal import TemporalOptions, temporal_enumerate

__all__ = ["RunReport", "build_parser", "main", "parse_duration", "run", "shard_anchors"]

SCHEMA = "cyclenum.run/1"

_UNITS = {"s": 1, "m": 60, "h": 3600, "d": 86400}
_PARALLEL = {"none": "sequential", "coarse": "coarse", "fine": "fine"}


def parse_duration(text: str) -> float | int:
    """``"3600"``, ``"90s"``, ``"2h"``, ``"7d"`` -> seconds; ``"inf"`` -> unbounded."""
    t = text.strip().lower()
    if t in ("inf", "infinity", "none"):
        return math.inf
    mult = 1
    if t and t[-1] in _UNITS:
        mult, t = _UNITS[t[-1]], t[:-1]
    try:
        value = int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad duration {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("window must be non-negative")
    return value * mult


def _parse_shard(text: str) -> tuple[int, int]:
    try:
        k, K = (int(x) for x in text.split("/"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"shard must look like k/K, got {text!r}") from None
    if K < 1 or not 0 <= k < K:
        raise argparse.ArgumentTypeError("shard needs 0 <= k < K")
    return k, K


def shard_anchors(total_edges: int, k: int, K: int) -> range:
    """Anchors whose edge id is ``k`` modulo ``K``.  Edge ids follow timestamp
    order, so consecutive edges land on different shards."""
    if K < 1 or not 0 <= k < K:
        raise ValueError("shard needs 0 <= k < K")
    return range(k, total_edges, K)


@dataclass
class RunReport:
    graph: str
    n: int
    e: int
    delta: float | int | None  # None means unbounded
    algorithm: str
    granularity: str
    cycle_type: str
    threads: int
    backend: str
    shard: str
    cycles: int
    wall_ns: int
    busy_ns: list[int] = field(default_factory=list)
    edge_visits: int = 0
    preproc_visits: int = 0
    tasks_executed: int = 0
    tasks_stolen: int = 0
    copy_on_steal_ops: int = 0
    copy_bytes: int = 0
    unblock_propagations: int = 0
    maximal_paths: int | None = None  # Tiernan only
    per_thread: list[dict] | None = None  # only with --output stats
    schema: str = SCHEMA

    _INT_FIELDS = (
        "n", "e", "threads", "cycles", "wall_ns", "edge_visits", "preproc_visits",
        "tasks_executed", "tasks_stolen", "copy_on_steal_ops", "copy_bytes",
        "unblock_propagations",
    )

    @classmethod
    def fields(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(**{k: d[k] for k in cls.fields() if k in d})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self, header: bool = True) -> str:
        row = self.to_dict()
        row["busy_ns"] = ";".join(map(str, self.busy_ns))
        for k in ("delta", "maximal_paths"):
            row[k] = "" if row[k] is None else row[k]
        row["per_thread"] = "" if self.per_thread is None else json.dumps(self.per_thread)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.fields(), lineterminator="\n")
        if header:
            w.writeheader()
        w.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RunReport":
        row = next(csv.DictReader(io.StringIO(text)))
        d: dict = dict(row)
        for k in cls._INT_FIELDS:
            d[k] = int(d[k])
        d["busy_ns"] = [int(x) for x in d["busy_ns"].split(";")] if d["busy_ns"] else []
        d["delta"] = int(d["delta"]) if d["delta"] else None
        d["maximal_paths"] = int(d["maximal_paths"]) if d["maximal_paths"] else None
        d["per_thread"] = json.loads(d["per_thread"]) if d["per_thread"] else None
        return cls.from_dict(d)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cyclenum", description="Enumerate simple or temporal cycles.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATH", help="edge list with 'src dst ts' lines")
    src.add_argument("--synthetic", metavar="KIND", choices=SYNTHETIC_KINDS)
    p.add_argument("--cycle-type", choices=("simple", "temporal"), default="simple")
    p.add_argument("--algo", choices=("tiernan", "johnson", "read-tarjan"), default="johnson")
    p.add_argument("--parallel", choices=tuple(_PARALLEL), default="none")
    p.add_argument("--window", type=parse_duration, metavar="DUR",
                   help="time window delta; integer seconds or with s/m/h/d suffix, or 'inf'")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output", choices=("count", "cycles", "stats"), default="count")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--shard", type=_parse_shard, metavar="k/K")
    p.add_argument("--seed", type=int)
    p.add_argument("--emit-cycles", metavar="PATH", help="write one cycle per line to PATH")
    p.add_argument("--no-closing-times", action="store_true")
    p.add_argument("--no-bundles", action="store_true")
    p.add_argument("--no-cycle-union", action="store_true")
    p.add_argument("--count-bundles", action="store_true",
                   help="count bundled temporal cycles without expanding them")
    p.add_argument("--allow-self-loops", action="store_true")
    p.add_argument("--non-strict-temporal", action="store_true")
    p.add_argument("--backend", choices=("auto", "native", "python"), default="auto")
    gen = p.add_argument_group("synthetic graph parameters")
    gen.add_argument("--n", type=int)
    gen.add_argument("--m", type=int)
    gen.add_argument("--k", type=int)
    gen.add_argument("--p-edge", type=float, default=0.3)
    gen.add_argument("--max-ts", type=int)
    return p


def _load(args) -> tuple[str, TemporalGraph]:
    if args.input:
        with open(args.input, encoding="utf-8") as fh:
            return args.input, load_edge_list(fh)
    g = generate_synthetic(
        args.synthetic, n=args.n, m=args.m, k=args.k, p_edge=args.p_edge, seed=args.seed,
        max_ts=args.max_ts,
    )
    return args.synthetic, g


def run(args: argparse.Namespace, cycle_stream=None, per_thread: bool = False) -> RunReport:
    """Execute a parsed command line and return its report."""
    name, g = _load(args)
    delta = math.inf if args.window is None else args.window
    granularity = _PARALLEL[args.parallel]
    threads = 1 if granularity == "sequential" else args.threads
    cfg = ParallelConfig(threads, granularity, args.algo, backend=args.backend, seed=args.seed)
    k, K = args.shard or (0, 1)
    anchors = shard_anchors(g.edge_count, k, K)
    sink = CycleSink("stream", cycle_stream, labels=g.labels) if cycle_stream else CycleSink()
    stats = SearchStats.for_threads(threads)
    if args.cycle_type == "temporal":
        opts = TemporalOptions(
            closing_times=not args.no_closing_times, bundles=not args.no_bundles,
            cycle_union=not args.no_cycle_union, strict=not args.non_strict_temporal,
            weighted=args.count_bundles,
        )
        temporal_enumerate(g, delta, cfg, sink, stats, opts, anchors=anchors,
                           allow_self_loops=args.allow_self_loops)
    else:
        parallel_enumerate(g, delta, cfg, sink, stats, anchors=anchors,
                           allow_self_loops=args.allow_self_loops)
    tot = stats.total
    return RunReport(
        graph=name, n=g.vertex_count, e=g.edge_count,
        delta=None if delta == math.inf else delta,
        algorithm=cfg.algorithm, granularity=granularity, cycle_type=args.cycle_type,
        threads=threads, backend="python" if not _backend.use_native(args.backend, stats) else "native",
        shard=f"{k}/{K}", cycles=sink.count, wall_ns=stats.wall_ns, busy_ns=stats.busy_ns,
        edge_visits=tot("edge_visits"), preproc_visits=tot("preproc_visits"),
        tasks_executed=tot("tasks_executed"), tasks_stolen=tot("tasks_stolen"),
        copy_on_steal_ops=tot("copy_on_steal_ops"), copy_bytes=8 * tot("copied_words"),
        unblock_propagations=tot("unblock_propagations"),
        maximal_paths=tot("maximal_paths") if cfg.algorithm == "tiernan" else None,
        per_thread=[dataclasses.asdict(t) for t in stats.threads] if per_thread else None,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.input and args.window is None:
        parser.error("--window is required with --input")
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    if args.cycle_type == "temporal" and args.algo != "johnson":
        parser.error("temporal cycles are only enumerated with --algo johnson")

    stream_fh = None
    try:
        if args.output == "cycles":
            stream = sys.stdout
        elif args.emit_cycles:
            stream = stream_fh = open(args.emit_cycles, "w", encoding="utf-8")
        else:
            stream = None
        report = run(args, stream, per_thread=args.output == "stats")
    except (OSError, EdgeListParseError) as exc:
        print(f"cyclenum: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        parser.error(str(exc))
    finally:
        if stream_fh is not None:
            stream_fh.close()

    if args.output == "cycles":
        return 0
    out = report.to_json() if args.format == "json" else report.to_csv()
    sys.stdout.write(out if out.endswith("\n") else out + "\n")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
