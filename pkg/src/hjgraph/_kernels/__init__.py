"""Kernel backend selection.

The compiled extension is used when it imported cleanly; setting the
environment variable ``HJGRAPH_PURE_PYTHON=1`` forces the numpy fallback.
Both backends implement identical semantics (see ``fallback.py``).
"""

import os

import numpy as np

from ..errors import NumericalBlowupError
from . import fallback

try:
    from . import _speedups
except ImportError:  # extension not built; fallback carries the load
    _speedups = None

_FORCE_FALLBACK = os.environ.get("HJGRAPH_PURE_PYTHON", "") not in ("", "0")

HAVE_COMPILED = _speedups is not None


def backend_name():
    return "compiled" if (HAVE_COMPILED and not _FORCE_FALLBACK) else "python"


def advance(graph, ham, values, n_steps, dt):
    """Run n_steps of the explicit upwind scheme, returning the final field."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    if HAVE_COMPILED and not _FORCE_FALLBACK:
        pack = ham.kernel_pack()
        out, code, vertex = _speedups.run_upwind_steps(
            values, int(n_steps), float(dt),
            graph.indptr, graph.indices, graph.arc_inv_lengths, *pack)
        if code == 1:
            raise NumericalBlowupError(vertex)
        if code == 2:
            raise ValueError(
                f"slope at vertex {vertex} exceeds the tabulated p-grid")
        return out
    return fallback.run_upwind_steps(
        values, n_steps, dt, graph.indptr, graph.indices,
        graph.arc_inv_lengths, graph.arc_tails,
        ham.evaluate_field, ham.domain_p_max)


def dijkstra(graph, arc_costs, sources, source_values=None):
    """Multi-source shortest-path distances over the graph's arc structure."""
    sources = np.ascontiguousarray(sources, dtype=np.int32)
    if source_values is None:
        source_values = np.zeros(len(sources))
    source_values = np.ascontiguousarray(source_values, dtype=np.float64)
    arc_costs = np.ascontiguousarray(arc_costs, dtype=np.float64)
    if HAVE_COMPILED and not _FORCE_FALLBACK:
        return _speedups.dijkstra(graph.n_vertices, graph.indptr,
                                  graph.indices, arc_costs, sources,
                                  source_values)
    return fallback.dijkstra(graph.n_vertices, graph.indptr, graph.indices,
                             arc_costs, sources, source_values)


def minus_slopes(graph, values):
    return fallback.minus_slopes(values, graph.indptr, graph.indices,
                                 graph.arc_inv_lengths, graph.arc_tails)


def plus_slopes(graph, values):
    return fallback.plus_slopes(values, graph.indptr, graph.indices,
                                graph.arc_inv_lengths, graph.arc_tails)
