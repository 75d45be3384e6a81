#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the explicit upwind stepping loop and the generalized Dijkstra on a
fine interval and a deep gasket. Run after `pip install -e .`:

    python benchmarks/bench_backends.py [--repeat 5]
"""

import argparse
import time

import numpy as np

import hjgraph as hj
from hjgraph._kernels import HAVE_COMPILED, fallback
from hjgraph.graph import NodeFunction

if HAVE_COMPILED:
    from hjgraph._kernels import _speedups


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_stepping(graph, ham, n_steps, dt, repeat):
    u0 = np.zeros(graph.n_vertices)
    rows = {}
    rows["python"] = best_of(repeat, lambda: fallback.run_upwind_steps(
        u0, n_steps, dt, graph.indptr, graph.indices,
        graph.arc_inv_lengths, graph.arc_tails, ham.evaluate_field,
        ham.domain_p_max))
    if HAVE_COMPILED:
        pack = ham.kernel_pack()
        rows["compiled"] = best_of(repeat, lambda: _speedups.run_upwind_steps(
            u0, n_steps, dt, graph.indptr, graph.indices,
            graph.arc_inv_lengths, *pack))
    return rows


def bench_dijkstra(graph, n_sources, repeat):
    costs = graph.arc_lengths
    sources = list(range(n_sources))

    def run_python():
        for s in sources:
            fallback.dijkstra(graph.n_vertices, graph.indptr, graph.indices,
                              costs, [s], [0.0])

    rows = {"python": best_of(repeat, run_python)}
    if HAVE_COMPILED:
        def run_compiled():
            for s in sources:
                _speedups.dijkstra(graph.n_vertices, graph.indptr,
                                   graph.indices, costs,
                                   np.array([s], np.int32), np.array([0.0]))
        rows["compiled"] = best_of(repeat, run_compiled)
    return rows


def report(name, rows):
    base = rows["python"]
    for backend, t in rows.items():
        speedup = "" if backend == "python" else f"  ({base / t:.1f}x)"
        print(f"  {name:<42} {backend:<9} {t * 1e3:10.2f} ms{speedup}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if not HAVE_COMPILED:
        print("compiled kernels unavailable; timing the fallback only")

    g1 = hj.build_interval(2000, 1.0)
    coord = g1.profile_coordinate()
    ham1 = hj.AffineHamiltonian(NodeFunction.constant(g1, 1.0),
                                NodeFunction(g1, np.cos(2 * np.pi * coord)))
    dt = hj.cfl_dt(g1, ham1, 2.0)
    print(f"interval(2000), affine cosine potential, 2000 steps")
    report("upwind stepping", bench_stepping(g1, ham1, 2000, dt, args.repeat))

    ham_p = hj.PowerHamiltonian(2.0,
                                NodeFunction(g1, np.cos(2 * np.pi * coord)))
    dtp = hj.cfl_dt(g1, ham_p, 2.0)
    report("upwind stepping (power)",
           bench_stepping(g1, ham_p, 2000, dtp, args.repeat))

    g2 = hj.build_sierpinski(7)
    print(f"sierpinski(7): {g2.n_vertices} vertices, {g2.n_edges} edges")
    report("dijkstra x 200 sources", bench_dijkstra(g2, 200, args.repeat))


if __name__ == "__main__":
    main()
