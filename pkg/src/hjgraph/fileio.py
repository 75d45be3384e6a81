"""CSV and JSON serialization helpers.

All real numbers are written as decimals with 17 significant digits, which
round-trips IEEE doubles exactly and keeps outputs byte-deterministic.
"""

import json

import numpy as np

from .graph import NodeFunction


def fmt(x):
    """Decimal text for a finite real, 17 significant digits."""
    return f"{float(x):.17g}"


def _json_fragment(obj):
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if bool(obj) else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_json_fragment(v)}"
                          for k, v in sorted(obj.items()))
        return "{" + items + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        return "[" + ", ".join(_json_fragment(v) for v in seq) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(obj, path):
    """Write JSON with sorted keys and 17-significant-digit reals."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_json_fragment(obj))
        fh.write("\n")


def write_node_function_csv(func, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("vertex_id,value\n")
        for i, v in enumerate(func.values):
            fh.write(f"{i},{fmt(v)}\n")


def read_node_function_csv(graph, path):
    values = np.full(graph.n_vertices, np.nan)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "vertex_id,value":
            raise ValueError(f"{path}: unexpected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            idx, val = line.split(",")
            i = int(idx)
            if not 0 <= i < graph.n_vertices:
                raise ValueError(f"{path}:{lineno}: vertex {i} out of range")
            values[i] = float(val)
    if np.any(np.isnan(values)):
        raise ValueError(f"{path}: missing vertices")
    return NodeFunction(graph, values)


def write_trace_csv(trace, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,vertex_id,value\n")
        for t, row in zip(trace.times, trace.snapshots):
            st = fmt(t)
            for i, v in enumerate(row):
                fh.write(f"{st},{i},{fmt(v)}\n")


def read_trace_csv(graph, path):
    """Read a trace CSV back into (times, snapshots)."""
    times = []
    rows = []
    current_t = None
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "t,vertex_id,value":
            raise ValueError(f"{path}: unexpected header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            st, idx, val = line.split(",")
            if st != current_t:
                current_t = st
                times.append(float(st))
                rows.append(np.full(graph.n_vertices, np.nan))
            rows[-1][int(idx)] = float(val)
    snapshots = np.asarray(rows)
    if np.any(np.isnan(snapshots)):
        raise ValueError(f"{path}: missing vertices in some snapshot")
    return np.asarray(times), snapshots


def write_convergence_csv(times, gaps, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,gap\n")
        for t, gap in zip(times, gaps):
            fh.write(f"{fmt(t)},{fmt(gap)}\n")


def write_critical_csv(graph, zero_values, sigma, aubry, path):
    in_aubry = np.zeros(graph.n_vertices, dtype=int)
    in_aubry[np.asarray(aubry, dtype=np.int64)] = 1
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("vertex_id,h_at_zero,sigma,in_aubry\n")
        for i in range(graph.n_vertices):
            fh.write(f"{i},{fmt(zero_values[i])},{fmt(sigma[i])},"
                     f"{in_aubry[i]}\n")
