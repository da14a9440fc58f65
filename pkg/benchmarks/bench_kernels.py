"""Compare the compiled and pure-Python Bron-Kerbosch kernels.

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --full --repeat 3
"""
import argparse
import json
import time

from hermskew import cliques, geometry
from hermskew.field import field_for_q
from hermskew.geometry import initial_triple
from hermskew.graph import build_skew_graph


def skew_graph(q):
    return build_skew_graph(geometry.enumerate_lines(field_for_q(q)))


def workloads(full):
    g2, g3, g4 = skew_graph(2), skew_graph(3), skew_graph(4)
    mm = cliques.moon_moser(9)
    jobs = [
        ("q2 census", lambda b: cliques.bk_pivot(g2, backend=b)),
        ("q3 rooted at triple", lambda b: cliques.bk_pivot(g3, initial_triple(3), backend=b)),
        ("moon-moser k=9", lambda b: cliques.bk_pivot(mm, backend=b)),
        ("q4 rooted, 200k nodes",
         lambda b: cliques.bk_pivot(g4, initial_triple(4), max_nodes=200_000, backend=b)),
    ]
    if full:
        jobs.append(("q3 census", lambda b: cliques.bk_pivot(g3, backend=b)))
    return jobs


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=1, help="best-of-N timing")
    ap.add_argument("--full", action="store_true", help="include the full q=3 census")
    ap.add_argument("--json", action="store_true", help="print JSON instead of a table")
    args = ap.parse_args(argv)

    backends = cliques.available_backends()
    rows = []
    for name, fn in workloads(args.full):
        row = {"workload": name}
        for b in backends:
            best = None
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                res = fn(b)
                dt = time.perf_counter() - t0
                best = dt if best is None else min(best, dt)
            row[b] = {"seconds": round(best, 4), "nodes": res.nodes, "cliques": res.total,
                      "nodes_per_s": int(res.nodes / best) if best else None}
        if "compiled" in row and "python" in row:
            assert row["compiled"]["nodes"] == row["python"]["nodes"]
            assert row["compiled"]["cliques"] == row["python"]["cliques"]
            row["speedup"] = round(row["python"]["seconds"] / row["compiled"]["seconds"], 1)
        rows.append(row)

    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'workload':26}" + "".join(f"{b + ' s':>14}{'nodes/s':>14}" for b in backends) + f"{'speedup':>10}")
    for r in rows:
        line = f"{r['workload']:26}"
        for b in backends:
            line += f"{r[b]['seconds']:>14.3f}{r[b]['nodes_per_s']:>14,}"
        print(line + f"{r.get('speedup', ''):>10}")


if __name__ == "__main__":
    main()
