"""Pure-numpy reference implementations of the hot kernels.

These are the semantics of record; the compiled module in ``_speedups.pyx``
reproduces them operation for operation. Both are exercised against each
other in the test suite.
"""

import heapq

import numpy as np

from ..errors import NumericalBlowupError


def minus_slopes(values, indptr, indices, inv_len, tails):
    """Descent slope max_y (f(x) - f(y))_+ / len(x,y) at every vertex."""
    diffs = (values[tails] - values[indices]) * inv_len
    np.maximum(diffs, 0.0, out=diffs)
    return np.maximum.reduceat(diffs, indptr[:-1])


def plus_slopes(values, indptr, indices, inv_len, tails):
    """Ascent slope max_y (f(y) - f(x))_+ / len(x,y) at every vertex."""
    diffs = (values[indices] - values[tails]) * inv_len
    np.maximum(diffs, 0.0, out=diffs)
    return np.maximum.reduceat(diffs, indptr[:-1])


def run_upwind_steps(values, n_steps, dt, indptr, indices, inv_len, tails,
                     eval_field, p_domain_max):
    """Advance u' = u - dt*H(x, D-u) for n_steps explicit Euler steps."""
    cur = np.array(values, dtype=np.float64, copy=True)
    # overflow to inf is caught by the finiteness check below
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(int(n_steps)):
            slopes = minus_slopes(cur, indptr, indices, inv_len, tails)
            if p_domain_max is not None and np.isfinite(p_domain_max):
                over = slopes > p_domain_max
                if over.any():
                    x = int(np.argmax(over))
                    raise ValueError(
                        f"slope {slopes[x]:g} at vertex {x} exceeds the "
                        f"tabulated p-grid (max {p_domain_max:g})")
            cur = cur - dt * eval_field(slopes)
            bad = ~np.isfinite(cur)
            if bad.any():
                raise NumericalBlowupError(int(np.argmax(bad)))
    return cur


def dijkstra(n, indptr, indices, costs, sources, source_values):
    """Shortest-path distances with nonnegative arc costs, multi-source.

    Heap entries are (distance, vertex) so ties settle lowest index first.
    """
    dist = np.full(n, np.inf)
    done = np.zeros(n, dtype=bool)
    heap = []
    for s, val in zip(sources, source_values):
        s = int(s)
        val = float(val)
        if val < dist[s]:
            dist[s] = val
            heapq.heappush(heap, (val, s))
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for a in range(indptr[x], indptr[x + 1]):
            y = int(indices[a])
            nd = d + costs[a]
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist
