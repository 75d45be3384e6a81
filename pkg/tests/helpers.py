"""Shared builders and independent oracles for the test suite.

The oracles here deliberately avoid the library's computational paths:
value iteration instead of Dijkstra, explicit path enumeration instead of
shortest-path queries, direct quadrature instead of the potential solver.
"""

import math

import numpy as np

import hjgraph as hj
from hjgraph import _kernels
from hjgraph.graph import NodeFunction


def cosine_affine(graph, amplitude=1.0, frequency=2.0):
    """H = |p| + amplitude*cos(pi*frequency*x), the canonical instance."""
    coord = graph.profile_coordinate()
    f = amplitude * np.cos(math.pi * frequency * coord)
    return hj.AffineHamiltonian(NodeFunction.constant(graph, 1.0),
                                NodeFunction(graph, f))


def eikonal(graph, f_const=0.0):
    """H = |p| + f_const."""
    return hj.AffineHamiltonian(NodeFunction.constant(graph, 1.0),
                                NodeFunction.constant(graph, f_const))


def value_iteration(graph, arc_costs, source, source_value=0.0):
    """Bellman fixpoint of v <- min(v, min over arcs (v(tail) + cost)).

    Starts from +inf with 0 at the source and sweeps until nothing changes;
    the fixpoint is compared against Dijkstra bit for bit.
    """
    dist = np.full(graph.n_vertices, np.inf)
    dist[source] = source_value
    tails = graph.arc_tails
    heads = graph.indices
    while True:
        cand = dist.copy()
        np.minimum.at(cand, heads, dist[tails] + arc_costs)
        if np.array_equal(cand, dist):
            return dist
        dist = cand


def enumerate_path_costs(graph, arc_costs, x, y):
    """Minimum cost over all simple paths from x to y (exhaustive DFS)."""
    adj = {}
    for a in range(len(graph.arc_tails)):
        adj.setdefault(int(graph.arc_tails[a]), []).append(
            (int(graph.indices[a]), float(arc_costs[a])))
    best = math.inf
    visited = [False] * graph.n_vertices

    def dfs(v, acc):
        nonlocal best
        if v == y:
            best = min(best, acc)
            return
        visited[v] = True
        for w, cost in adj[v]:
            if not visited[w]:
                dfs(w, acc + cost)
        visited[v] = False

    dfs(int(x), 0.0)
    return best


def head_cost_solution(graph, sigma, seeds):
    """Exact discrete stationary field: distances under head-weighted costs.

    With arc cost len(x, y) * sigma(y) the resulting potential satisfies
    D-phi(x) = sigma(x) exactly away from the seeds and 0 on them, so
    H(x, D-phi) = c holds vertexwise for monotone H with sigma = sigma_c.
    """
    costs = graph.arc_lengths * np.asarray(sigma)[graph.indices]
    seeds = list(np.atleast_1d(seeds))
    return _kernels.dijkstra(graph, costs, seeds, np.zeros(len(seeds)))


def brute_gasket(level):
    """Independent gasket construction in the plane with rounding dedup."""
    s3 = math.sqrt(3.0) / 2.0
    tris = [((0.0, 0.0), (1.0, 0.0), (0.5, s3))]
    for _ in range(level):
        nxt = []
        for p0, p1, p2 in tris:
            m01 = ((p0[0] + p1[0]) / 2, (p0[1] + p1[1]) / 2)
            m12 = ((p1[0] + p2[0]) / 2, (p1[1] + p2[1]) / 2)
            m02 = ((p0[0] + p2[0]) / 2, (p0[1] + p2[1]) / 2)
            nxt += [(p0, m01, m02), (m01, p1, m12), (m02, m12, p2)]
        tris = nxt

    def key(p):
        return (round(p[0], 9), round(p[1], 9))

    vertices = {key(p) for tri in tris for p in tri}
    edges = set()
    for p0, p1, p2 in tris:
        for a, b in ((p0, p1), (p1, p2), (p0, p2)):
            edges.add(frozenset((key(a), key(b))))
    return len(vertices), len(edges)


def trapezoid_potential_on_interval(graph, sigma_exact):
    """Cumulative trapezoid quadrature of sigma along a path graph."""
    h = np.diff(graph.profile_coordinate())
    areas = h * (sigma_exact[1:] + sigma_exact[:-1]) / 2.0
    return np.concatenate([[0.0], np.cumsum(areas)])


def random_node_function(graph, rng, lo=-1.0, hi=1.0):
    return NodeFunction(graph, rng.uniform(lo, hi, graph.n_vertices))
