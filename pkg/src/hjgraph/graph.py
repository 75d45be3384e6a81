"""Finite weighted graphs as discrete models of compact geodesic spaces.

Vertices are the integers 0..n-1, edges carry strictly positive lengths and
the metric is the shortest-path distance. Builders are provided for the
unit interval, the circle and the Sierpinski gasket prefractals; arbitrary
networks load from an edge-list text file (``u v length`` per line).
"""

import hashlib
import math

import numpy as np

from . import _kernels
from .errors import ResourceLimitError

SIERPINSKI_LEVEL_CAP = 10


class MetricGraph:
    """Connected weighted graph with strictly positive edge lengths.

    Parallel edges are collapsed to the shorter length and self-loops are
    rejected. Instances are immutable after construction and safe to share
    across threads. Optional embedding coordinates are carried only for
    reporting and for evaluating named data profiles; no solver reads them.
    """

    def __init__(self, n_vertices, edges, lengths, coords=None):
        n = int(n_vertices)
        if n < 2:
            raise ValueError("a metric graph needs at least two vertices")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        lengths = np.asarray(lengths, dtype=np.float64).reshape(-1)
        if edges.shape[0] == 0:
            raise ValueError("a metric graph needs at least one edge")
        if edges.shape[0] != lengths.shape[0]:
            raise ValueError("edge and length counts differ")
        if edges.min() < 0 or edges.max() >= n:
            raise ValueError("edge endpoint outside the vertex range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("self-loops are not allowed")
        if not np.all(np.isfinite(lengths)) or np.any(lengths <= 0.0):
            raise ValueError("edge lengths must be positive and finite")

        u = np.minimum(edges[:, 0], edges[:, 1])
        v = np.maximum(edges[:, 0], edges[:, 1])
        order = np.lexsort((lengths, v, u))
        u, v, lengths = u[order], v[order], lengths[order]
        # first occurrence per (u, v) group carries the minimum length
        keep = np.ones(u.shape[0], dtype=bool)
        keep[1:] = (u[1:] != u[:-1]) | (v[1:] != v[:-1])
        u, v, lengths = u[keep], v[keep], lengths[keep]

        self.n_vertices = n
        self.edges = np.column_stack([u, v])
        self.lengths = lengths
        self.min_edge_length = float(lengths.min())
        self.max_edge_length = float(lengths.max())

        tails = np.concatenate([u, v]).astype(np.int32)
        heads = np.concatenate([v, u]).astype(np.int32)
        arc_len = np.concatenate([lengths, lengths])
        order = np.lexsort((heads, tails))
        self.arc_tails = np.ascontiguousarray(tails[order])
        self.indices = np.ascontiguousarray(heads[order])
        self.arc_lengths = np.ascontiguousarray(arc_len[order])
        self.arc_inv_lengths = np.ascontiguousarray(1.0 / self.arc_lengths)
        counts = np.bincount(self.arc_tails, minlength=n)
        if counts.min() == 0:
            raise ValueError("graph is not connected (isolated vertex)")
        self.indptr = np.zeros(n + 1, dtype=np.int32)
        np.cumsum(counts, out=self.indptr[1:])

        if coords is not None:
            coords = np.asarray(coords, dtype=np.float64)
            if coords.ndim == 1:
                coords = coords[:, None]
            if coords.shape[0] != n:
                raise ValueError("coordinate count does not match vertices")
            coords.setflags(write=False)
        self.coords = coords

        self._check_connected()

        digest = hashlib.sha256()
        digest.update(np.int64(n).tobytes())
        digest.update(self.edges.tobytes())
        digest.update(self.lengths.tobytes())
        self.fingerprint = digest.hexdigest()[:16]

        for arr in (self.edges, self.lengths, self.arc_tails, self.indices,
                    self.arc_lengths, self.arc_inv_lengths, self.indptr):
            arr.setflags(write=False)

    def _check_connected(self):
        seen = np.zeros(self.n_vertices, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            x = stack.pop()
            for a in range(self.indptr[x], self.indptr[x + 1]):
                y = int(self.indices[a])
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
        if not seen.all():
            raise ValueError("graph is not connected")

    @property
    def n_edges(self):
        return self.edges.shape[0]

    def check_vertex(self, x):
        x = int(x)
        if not 0 <= x < self.n_vertices:
            raise ValueError(f"unknown vertex {x}")
        return x

    def neighbors(self, x):
        """List of (neighbor, edge length) pairs, sorted by neighbor index."""
        x = self.check_vertex(x)
        lo, hi = self.indptr[x], self.indptr[x + 1]
        return [(int(self.indices[a]), float(self.arc_lengths[a]))
                for a in range(lo, hi)]

    def profile_coordinate(self):
        """First embedding coordinate, used by named data profiles."""
        if self.coords is None:
            raise ValueError("graph carries no embedding coordinates")
        return self.coords[:, 0]

    def __repr__(self):
        return (f"MetricGraph(n_vertices={self.n_vertices}, "
                f"n_edges={self.n_edges})")


class NodeFunction:
    """One finite real value per vertex of a fixed graph."""

    __slots__ = ("graph", "values")

    def __init__(self, graph, values):
        values = np.array(values, dtype=np.float64, copy=True).reshape(-1)
        if values.shape[0] != graph.n_vertices:
            raise ValueError("value count does not match the vertex count")
        if not np.all(np.isfinite(values)):
            raise ValueError("node function values must be finite")
        values.setflags(write=False)
        self.graph = graph
        self.values = values

    @classmethod
    def constant(cls, graph, value):
        return cls(graph, np.full(graph.n_vertices, float(value)))

    @property
    def graph_id(self):
        return self.graph.fingerprint

    def __repr__(self):
        return f"NodeFunction(n={self.values.shape[0]})"


def check_same_graph(graph, func, name="node function"):
    if func.graph is not graph and func.graph.fingerprint != graph.fingerprint:
        raise ValueError(f"{name} does not live on the given graph")


def vertex_array(spec):
    """Normalize an int / iterable / array of vertex ids to a sorted array."""
    if isinstance(spec, (int, np.integer)):
        return np.array([int(spec)], dtype=np.int64)
    return np.asarray(sorted(int(v) for v in spec), dtype=np.int64)


def build_interval(segments, length):
    """Path graph subdividing [0, length] into `segments` uniform edges."""
    segments = int(segments)
    if segments < 1:
        raise ValueError("segments must be a positive count")
    length = float(length)
    if not (length > 0.0 and math.isfinite(length)):
        raise ValueError("length must be positive")
    step = length / segments
    n = segments + 1
    edges = np.column_stack([np.arange(segments), np.arange(1, n)])
    return MetricGraph(n, edges, np.full(segments, step),
                       coords=np.arange(n) * step)


def build_circle(segments, length):
    """Cycle graph of total circumference `length`.

    The profile coordinate is the arc position in [0, length).
    """
    segments = int(segments)
    if segments < 3:
        raise ValueError("a circle needs at least 3 segments")
    length = float(length)
    if not (length > 0.0 and math.isfinite(length)):
        raise ValueError("length must be positive")
    step = length / segments
    idx = np.arange(segments)
    edges = np.column_stack([idx, (idx + 1) % segments])
    return MetricGraph(segments, edges, np.full(segments, step),
                       coords=idx * step)


def build_sierpinski(level):
    """Prefractal gasket graph at the given subdivision level.

    Level 0 is the unit triangle; each level halves the triangles. The
    construction works on the integer triangular lattice so shared corner
    vertices deduplicate exactly.
    """
    level = int(level)
    if level < 0:
        raise ValueError("level must be nonnegative")
    if level > SIERPINSKI_LEVEL_CAP:
        raise ResourceLimitError(
            f"sierpinski level {level} exceeds the cap "
            f"{SIERPINSKI_LEVEL_CAP}")
    scale = 1 << level
    triangles = [((0, 0), (scale, 0), (0, scale))]
    for _ in range(level):
        nxt = []
        for p0, p1, p2 in triangles:
            m01 = ((p0[0] + p1[0]) // 2, (p0[1] + p1[1]) // 2)
            m12 = ((p1[0] + p2[0]) // 2, (p1[1] + p2[1]) // 2)
            m02 = ((p0[0] + p2[0]) // 2, (p0[1] + p2[1]) // 2)
            nxt.extend([(p0, m01, m02), (m01, p1, m12), (m02, m12, p2)])
        triangles = nxt

    points = sorted({p for tri in triangles for p in tri},
                    key=lambda p: (p[1], p[0]))
    index = {p: i for i, p in enumerate(points)}
    edge_set = set()
    for p0, p1, p2 in triangles:
        for a, b in ((p0, p1), (p1, p2), (p0, p2)):
            i, j = index[a], index[b]
            edge_set.add((min(i, j), max(i, j)))
    edges = np.array(sorted(edge_set), dtype=np.int64)
    lengths = np.full(edges.shape[0], 1.0 / scale)
    coords = np.array([[(a + 0.5 * b) / scale, (0.5 * math.sqrt(3.0) * b) / scale]
                       for a, b in points])
    return MetricGraph(len(points), edges, lengths, coords=coords)


def load_edge_list(path, coords_path=None):
    """Read a graph from a text edge list: one `u v length` record per line.

    Comments start with '#'. Vertex ids are nonnegative integers and every
    id in 0..max must occur (the connectivity check rejects gaps). An
    optional coordinate file holds `id x [y]` records.
    """
    edges = []
    lengths = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'u v length'")
            try:
                a, b = int(parts[0]), int(parts[1])
                ell = float(parts[2])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if a < 0 or b < 0:
                raise ValueError(f"{path}:{lineno}: vertex ids must be >= 0")
            edges.append((a, b))
            lengths.append(ell)
    if not edges:
        raise ValueError(f"{path}: no edges found")
    n = int(np.max(edges)) + 1

    coords = None
    if coords_path is not None:
        coords = np.zeros((n, 2))
        ncols = 1
        with open(coords_path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) not in (2, 3):
                    raise ValueError(
                        f"{coords_path}:{lineno}: expected 'id x [y]'")
                i = int(parts[0])
                if not 0 <= i < n:
                    raise ValueError(
                        f"{coords_path}:{lineno}: vertex {i} out of range")
                coords[i, 0] = float(parts[1])
                if len(parts) == 3:
                    coords[i, 1] = float(parts[2])
                    ncols = 2
        coords = coords[:, :ncols]
    return MetricGraph(n, np.array(edges), np.array(lengths), coords=coords)


def save_edge_list(graph, path, coords_path=None):
    """Write the canonical edge list (and optionally coordinates)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# edge list: u v length\n")
        for (a, b), ell in zip(graph.edges, graph.lengths):
            fh.write(f"{a} {b} {ell:.17g}\n")
    if coords_path is not None:
        if graph.coords is None:
            raise ValueError("graph carries no coordinates to write")
        with open(coords_path, "w", encoding="utf-8") as fh:
            fh.write("# coordinates: id x [y]\n")
            for i, row in enumerate(graph.coords):
                cols = " ".join(f"{x:.17g}" for x in row)
                fh.write(f"{i} {cols}\n")


def shortest_dists(graph, source):
    """Shortest-path distances from `source` to every vertex."""
    source = graph.check_vertex(source)
    return _kernels.dijkstra(graph, graph.arc_lengths, [source], [0.0])


def shortest_dist(graph, x, y):
    """Shortest-path distance between two vertices."""
    x = graph.check_vertex(x)
    y = graph.check_vertex(y)
    return float(shortest_dists(graph, x)[y])


def distance_matrix(graph):
    """Dense all-pairs shortest-path matrix (one Dijkstra per source)."""
    n = graph.n_vertices
    out = np.empty((n, n))
    for s in range(n):
        out[s] = shortest_dists(graph, s)
    return out


def slope_fields(graph, values):
    """(plus, minus, full) one-sided slope arrays over all vertices."""
    values = np.asarray(values, dtype=np.float64)
    plus = _kernels.plus_slopes(graph, values)
    minus = _kernels.minus_slopes(graph, values)
    return plus, minus, np.maximum(plus, minus)


def discrete_slopes(graph, func, x):
    """One-sided and full discrete slopes of a node function at a vertex.

    plus  = max over neighbors y of [f(y) - f(x)]_+ / len(x, y)
    minus = max over neighbors y of [f(y) - f(x)]_- / len(x, y)
    full  = max(plus, minus)
    """
    check_same_graph(graph, func)
    x = graph.check_vertex(x)
    plus, minus, full = slope_fields(graph, func.values)
    return float(plus[x]), float(minus[x]), float(full[x])


def max_slope(graph, values):
    """Largest per-edge slope |f(a) - f(b)| / len(a, b); 0 for constants."""
    return float(_kernels.minus_slopes(graph, np.asarray(values, float)).max())
