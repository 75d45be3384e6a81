"""Critical value, Aubry set, Mane potential and stationary diagnostics.

The critical level is the exact maximum of H(., 0) over the vertices; the
Aubry-like set collects the vertices attaining it (up to a tolerance). The
Mane potential S(., y) is the shortest-path distance from y under the
trapezoid edge cost len(a,b) * (sigma(a) + sigma(b)) / 2, where sigma is
the maximal subsolution slope at the critical level. On finite graphs this
generalized Dijkstra value coincides with the value-iteration fixpoint,
which the test suite asserts exactly.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import NodeFunction, check_same_graph, vertex_array
from .hamiltonian import TOL_LEVEL, TOL_ROOT, sigma_field

DEFAULT_TOL_AUBRY = 1.0e-9


def critical_value(ham, graph):
    """The exact finite maximum of H(., 0) over the vertices."""
    _check(ham, graph)
    zero = ham.zero_values()
    if not np.all(np.isfinite(zero)):
        raise ValueError("H(., 0) is not finite everywhere")
    return float(zero.max())


def aubry_set(ham, graph, c, tol_aubry=DEFAULT_TOL_AUBRY):
    """Vertices with H(x, 0) >= c - tol_aubry, sorted; never empty."""
    _check(ham, graph)
    zero = ham.zero_values()
    return np.flatnonzero(zero >= c - tol_aubry).astype(np.int64)


def edge_costs(graph, sigma):
    """Per-arc trapezoid cost len * (sigma(tail) + sigma(head)) / 2."""
    sigma = np.asarray(sigma, dtype=np.float64)
    return graph.arc_lengths * (sigma[graph.arc_tails]
                                + sigma[graph.indices]) * 0.5


def mane_potential(graph, ham, c, y, tol_root=TOL_ROOT, tol_c=TOL_LEVEL):
    """S(., y): generalized Dijkstra distance from y under the sigma cost."""
    _check(ham, graph)
    y = graph.check_vertex(y)
    sigma = sigma_field(ham, c, tol_root, tol_c)
    costs = edge_costs(graph, sigma)
    dist = _kernels.dijkstra(graph, costs, [y], [0.0])
    return NodeFunction(graph, dist)


@dataclass
class CriticalData:
    """Critical level c, Aubry-like set and the subsolution slope field."""

    c: float
    aubry: np.ndarray
    sigma: NodeFunction
    tol_aubry: float

    @classmethod
    def compute(cls, ham, graph, tol_aubry=DEFAULT_TOL_AUBRY):
        c = critical_value(ham, graph)
        aubry = aubry_set(ham, graph, c, tol_aubry)
        sigma = NodeFunction(graph, sigma_field(ham, c))
        return cls(c=c, aubry=aubry, sigma=sigma, tol_aubry=tol_aubry)

    def summary_dict(self):
        return {
            "c": self.c,
            "aubry_size": int(len(self.aubry)),
            "aubry_members": [int(v) for v in self.aubry],
            "tol_aubry": self.tol_aubry,
        }


def stationary_solution(graph, ham, tol_aubry=DEFAULT_TOL_AUBRY):
    """(c, v, y): v = S(., y) anchored at the lowest-index Aubry vertex."""
    c = critical_value(ham, graph)
    aubry = aubry_set(ham, graph, c, tol_aubry)
    y = int(aubry[0])
    v = mane_potential(graph, ham, c, y)
    return c, v, y


def stationary_residual(graph, ham, v, c, source=None,
                        tol_aubry=DEFAULT_TOL_AUBRY):
    """(max sub-violation, max super-violation) of H(x, D-v) = c.

    The upwind slope D-v(x) = max over neighbors of (v(x) - v(y))_+ / len.
    The sub part is measured everywhere; the super part skips the Aubry set
    and the optional source vertices, where S(., y) is pinned.
    """
    _check(ham, graph)
    check_same_graph(graph, v)
    slopes = _kernels.minus_slopes(graph, v.values)
    hvals = ham.evaluate_field(slopes)
    sub = float(np.max(np.maximum(hvals - c, 0.0)))
    skip = np.zeros(graph.n_vertices, dtype=bool)
    skip[aubry_set(ham, graph, c, tol_aubry)] = True
    if source is not None:
        skip[vertex_array(source)] = True
    free = ~skip
    if free.any():
        sup = float(np.max(np.maximum(c - hvals[free], 0.0)))
    else:
        sup = 0.0
    return sub, sup


def default_tol_cmp(u_values):
    return 1.0e-12 + 1.0e-9 * float(np.max(np.abs(u_values)))


@dataclass
class ComparisonResult:
    passed: bool
    witness: int | None
    interior_gap: float
    boundary_gap: float
    tol: float

    def __bool__(self):
        return self.passed


def comparison_check(graph, u, v, boundary, tol_cmp=None):
    """Discrete comparison test: does max(u - v) stay at the boundary level?

    Passes iff max_x (u - v) <= max over boundary of (u - v) + tol. On
    failure the witness is the vertex attaining the interior maximum.
    """
    check_same_graph(graph, u, "u")
    check_same_graph(graph, v, "v")
    boundary = vertex_array(boundary)
    if boundary.size == 0:
        raise ValueError("boundary set must be nonempty")
    for b in boundary:
        graph.check_vertex(int(b))
    if tol_cmp is None:
        tol_cmp = default_tol_cmp(u.values)
    diff = u.values - v.values
    interior_gap = float(diff.max())
    boundary_gap = float(diff[boundary].max())
    passed = interior_gap <= boundary_gap + tol_cmp
    witness = None if passed else int(np.argmax(diff))
    return ComparisonResult(passed=passed, witness=witness,
                            interior_gap=interior_gap,
                            boundary_gap=boundary_gap, tol=tol_cmp)


def _check(ham, graph):
    if ham.graph.fingerprint != graph.fingerprint:
        raise ValueError("hamiltonian does not live on the given graph")
