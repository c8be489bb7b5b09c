"""Compare the compiled core against the pure-Python engines.

Runs each workload on both backends, checks that cycle counts and edge-visit
counters agree, and prints wall times and the native speedup.  Use
``--json`` for machine-readable output.

    python benchmarks/bench_backends.py
    python benchmarks/bench_backends.py --threads 4 --repeat 5 --json
"""

from __future__ import annotations

import argparse
import json
import math
import statistics
import sys

from cyclenum import NATIVE_AVAILABLE, ParallelConfig, SearchStats, parallel_enumerate, temporal_enumerate
from cyclenum.synthetic import fig3a, random_graph, random_temporal, worst_case


def workloads(scale: int):
    yield "worst-case", worst_case(14 + scale), math.inf, "simple"
    yield "fig3a", fig3a(8 * scale, 64 * scale), math.inf, "simple"
    yield "random", random_graph(14 + 2 * scale, 0.25, seed=1, max_ts=100), 40, "simple"
    yield "random-temporal", random_temporal(16 + 2 * scale, 0.3, seed=2, max_ts=30), 20, "temporal"


def measure(g, delta, cycle_type, algo, granularity, threads, backend, repeat):
    walls, count, visits = [], None, None
    for _ in range(repeat):
        st = SearchStats()
        cfg = ParallelConfig(threads, granularity, algo, backend=backend)
        if cycle_type == "temporal":
            sink = temporal_enumerate(g, delta, cfg, stats=st)
        else:
            sink = parallel_enumerate(g, delta, cfg, stats=st)
        walls.append(st.wall_ns)
        count, visits = sink.count, st.edge_visits
    return statistics.median(walls), count, visits


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--granularity", choices=("coarse", "fine"), default="coarse")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=int, default=1)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    if not NATIVE_AVAILABLE:
        print("compiled core not built; nothing to compare", file=sys.stderr)
        return 1

    rows = []
    for name, g, delta, cycle_type in workloads(args.scale):
        algos = ("johnson",) if cycle_type == "temporal" else ("tiernan", "johnson", "read_tarjan")
        for algo in algos:
            py = measure(g, delta, cycle_type, algo, args.granularity, args.threads, "python", args.repeat)
            nat = measure(g, delta, cycle_type, algo, args.granularity, args.threads, "native", args.repeat)
            rows.append({
                "graph": name, "cycle_type": cycle_type, "algorithm": algo,
                "n": g.vertex_count, "e": g.edge_count, "cycles": nat[1],
                "python_ns": py[0], "native_ns": nat[0], "speedup": py[0] / max(nat[0], 1),
                "counts_agree": py[1] == nat[1], "visits_agree": py[2] == nat[2],
            })

    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(f"{'graph':<16}{'algorithm':<13}{'cycles':>9}{'python ms':>11}{'native ms':>11}"
              f"{'speedup':>9}  agree")
        for r in rows:
            print(f"{r['graph']:<16}{r['algorithm']:<13}{r['cycles']:>9}{r['python_ns'] / 1e6:>11.2f}"
                  f"{r['native_ns'] / 1e6:>11.2f}{r['speedup']:>8.1f}x  "
                  f"{r['counts_agree'] and r['visits_agree']}")
    return 0 if all(r["counts_agree"] and r["visits_agree"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
