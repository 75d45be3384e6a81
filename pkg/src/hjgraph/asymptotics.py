"""Large-time diagnostics: the profiles phi_minus / phi_infinity and the
convergence and rescaling checks for u(t, .) + c t.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import NodeFunction, check_same_graph, vertex_array
from .hamiltonian import sigma_field
from .weakkam import edge_costs


def phi_minus(trace, c):
    """Pointwise minimum over stored snapshots of u(t, x) + c t."""
    if trace.n_stored == 0:
        raise ValueError("trace holds no snapshots")
    shifted = trace.snapshots + c * trace.times[:, None]
    return NodeFunction(trace.graph, shifted.min(axis=0))


def phi_infinity(graph, ham, c, phi_m, aubry):
    """min over Aubry sources y of [S(x, y) + phi_minus(y)].

    One generalized Dijkstra per source, sharing the sigma field.
    """
    check_same_graph(graph, phi_m, "phi_minus")
    aubry = vertex_array(aubry)
    if aubry.size == 0:
        raise ValueError("aubry set must be nonempty")
    sigma = sigma_field(ham, c)
    costs = edge_costs(graph, sigma)
    best = np.full(graph.n_vertices, np.inf)
    for y in aubry:
        y = graph.check_vertex(int(y))
        dist = _kernels.dijkstra(graph, costs, [y], [0.0])
        np.minimum(best, dist + phi_m.values[y], out=best)
    return NodeFunction(graph, best)


@dataclass
class ConvergenceReport:
    """Gap series of ||u(t,.) + c t - target||_inf over the stored times.

    aubry_monotone_ok asserts that u + c t is nonincreasing at every Aubry
    vertex, with slack 10 dt absorbing the explicit scheme's per-step
    overshoot; t_star is the first stored time the gap is within tol.
    """

    times: np.ndarray
    gaps: np.ndarray
    aubry_monotone_ok: bool
    max_aubry_violation: float
    final_gap: float
    t_star: float | None
    tol: float

    def series(self):
        return list(zip(self.times.tolist(), self.gaps.tolist()))


def convergence_report(trace, c, target, tol, aubry=()):
    """Measure convergence of u + c t to the target profile."""
    check_same_graph(trace.graph, target, "target")
    shifted = trace.snapshots + c * trace.times[:, None]
    gaps = np.max(np.abs(shifted - target.values[None, :]), axis=1)

    aubry = vertex_array(aubry)
    if aubry.size and trace.n_stored > 1:
        w = shifted[:, aubry]
        violation = float(np.max(np.diff(w, axis=0)))
        max_violation = max(violation, 0.0)
    else:
        max_violation = 0.0
    monotone_ok = max_violation <= 10.0 * trace.dt

    below = np.flatnonzero(gaps <= tol)
    t_star = float(trace.times[below[0]]) if below.size else None
    return ConvergenceReport(
        times=trace.times.copy(),
        gaps=gaps,
        aubry_monotone_ok=monotone_ok,
        max_aubry_violation=max_violation,
        final_gap=float(gaps[-1]),
        t_star=t_star,
        tol=float(tol),
    )


def rescale_check(trace, lam, ham, c):
    """Max residual of lambda w_t + H(x, |Dw|) = c for the rescaled field.

    w(tau, x) = u(tau / lambda, x) + c tau / lambda lives on the rescaled
    grid tau_j = lambda t_j, so every stored snapshot is reused; forward
    differences in tau discretize the time derivative. lambda = 1 is the
    unscaled residual of the trace.
    """
    lam = float(lam)
    if not lam > 0.0:
        raise ValueError("lambda must be positive")
    if trace.n_stored < 2:
        raise ValueError("trace stores too few snapshots to difference "
                         "in time")
    spacing = float(trace.times[1] - trace.times[0])
    w = trace.snapshots + c * trace.times[:, None]
    worst = 0.0
    for i in range(trace.n_stored - 1):
        dw = (w[i + 1] - w[i]) / (lam * spacing)
        slopes = _kernels.minus_slopes(trace.graph, w[i])
        res = np.abs(lam * dw + ham.evaluate_field(slopes) - c)
        worst = max(worst, float(res.max()))
    return worst
