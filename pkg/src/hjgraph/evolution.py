"""Explicit monotone upwind solver for u_t + H(x, |Du|) = 0 on a graph.

One step reads u'(x) = u(x) - dt * H(x, D-u(x)) with the descent slope
D-u(x) = max over neighbors of (u(x) - u(y))_+ / len(x, y). Under the CFL
restriction dt <= cfl_factor * h_min / L_H the update is monotone, hence
order-preserving and sup-norm non-expansive, which is what the comparison
tests rely on. A Hopf-Lax oracle is provided for x-independent Hamiltonians
as an independent validation path.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (CoercivityError, InvariantViolationError,
                     ResourceLimitError)
from .graph import NodeFunction, check_same_graph, distance_matrix, max_slope
from .hamiltonian import coercivity_slope_bound
from .weakkam import critical_value

DEFAULT_CFL_FACTOR = 0.9
RECHECK_EVERY = 100
MAX_HALVINGS = 12
BARRIER_TOL = 1.0e-9
MAX_STEPS = 20_000_000
MAX_STORED_VALUES = 200_000_000


@dataclass
class EvolutionTrace:
    """Stored snapshots of an evolution run on a uniform time grid.

    times[0] = 0 and snapshots[0] is the initial data; stored times are
    store_every * dt apart and always include the final time.
    """

    graph: object
    times: np.ndarray
    snapshots: np.ndarray  # (n_times, n_vertices)
    dt: float
    scheme: str = "upwind-euler"
    cfl_factor: float = DEFAULT_CFL_FACTOR
    store_every: int = 1
    metadata: dict = field(default_factory=dict)

    def snapshot(self, i):
        return NodeFunction(self.graph, self.snapshots[i])

    @property
    def n_stored(self):
        return self.times.shape[0]


def cfl_dt(graph, ham, slope_bound, cfl_factor=DEFAULT_CFL_FACTOR,
           t_horizon=1.0, p_samples=257):
    """Stable explicit step: cfl_factor * min edge length / L_H.

    L_H is the sampled p-Lipschitz bound of H on [0, max(slope_bound, 1)].
    A Hamiltonian constant in p has L_H = 0; the step is then capped at
    t_horizon / 100.
    """
    if not (0.0 < cfl_factor <= 1.0):
        raise ValueError("cfl_factor must lie in (0, 1]")
    if slope_bound < 0.0:
        raise ValueError("slope_bound must be nonnegative")
    hi = max(float(slope_bound), 1.0)
    hi = min(hi, ham.domain_p_max)
    ps = np.linspace(0.0, hi, int(p_samples))
    vals = np.stack([ham.evaluate_field(p) for p in ps])
    secants = (vals[1:] - vals[:-1]) / (ps[1:] - ps[:-1])[:, None]
    l_h = float(max(secants.max(), 0.0))
    if l_h <= 1e-12:
        return float(t_horizon) / 100.0
    return cfl_factor * graph.min_edge_length / l_h


def step(graph, ham, u, dt):
    """One explicit upwind Euler step; assumes dt satisfies the CFL bound."""
    check_same_graph(graph, u)
    if ham.graph.fingerprint != graph.fingerprint:
        raise ValueError("hamiltonian does not live on the given graph")
    out = _kernels.advance(graph, ham, u.values, 1, float(dt))
    return NodeFunction(graph, out)


def solve(graph, ham, u0, t_end, store_every=1,
          cfl_factor=DEFAULT_CFL_FACTOR, dt=None, slope_bound=None,
          check_invariants=True):
    """Evolve u0 to t_end, storing every store_every-th snapshot.

    The step size comes from cfl_dt with the a-priori slope bound
    max(initial slope, Sigma(R0)): the step map is sup-norm non-expansive,
    so the initial rate bound R0 = max_x |H(x, D-u0)| persists and confines
    slopes below the level set Sigma(R0) = sup{p : min_x H(x, p) <= R0}.
    (Transients genuinely steepen beyond the stationary bound L, so L alone
    is not a valid bound; see the test suite's overshoot measurement.)

    The bound is re-checked every 100 steps; a violation halves dt and
    restarts the run on the refined uniform grid so stored times stay
    equally spaced. After the march the run is checked against the barrier
    u0 -+ K t and the slope bound, both within 1e-9.
    """
    check_same_graph(graph, u0, "initial data")
    if ham.graph.fingerprint != graph.fingerprint:
        raise ValueError("hamiltonian does not live on the given graph")
    t_end = float(t_end)
    if not t_end > 0.0:
        raise ValueError("t_end must be positive")
    store_every = int(store_every)
    if store_every < 1:
        raise ValueError("store_every must be a positive count")

    c = critical_value(ham, graph)
    big_l = coercivity_slope_bound(ham, c)
    if big_l is None:
        raise CoercivityError("hamiltonian never reaches the critical level "
                              "below its slope cap")
    slope0 = max_slope(graph, u0.values)
    rate0 = float(np.max(np.abs(
        ham.evaluate_field(_kernels.minus_slopes(graph, u0.values)))))
    sigma_rate = coercivity_slope_bound(ham, rate0)
    if sigma_rate is None:
        raise CoercivityError("hamiltonian never reaches the initial rate "
                              f"level {rate0:g} below its slope cap")
    bound = max(slope0, sigma_rate) if slope_bound is None \
        else float(slope_bound)
    k_rate = float(np.max(np.abs(ham.evaluate_field(slope0))))
    dt0 = cfl_dt(graph, ham, bound, cfl_factor, t_horizon=t_end) \
        if dt is None else float(dt)
    if dt0 <= 0.0:
        raise ValueError("dt must be positive")

    n_steps = max(int(math.ceil(t_end / dt0 - 1e-12)), 1)
    n_steps = int(math.ceil(n_steps / store_every)) * store_every
    if n_steps > MAX_STEPS:
        raise ResourceLimitError(
            f"t_end={t_end:g} at the stable dt={dt0:g} needs {n_steps} "
            f"steps (cap {MAX_STEPS}); the problem is too stiff for this "
            "explicit scheme")
    stored_values = (n_steps // store_every + 1) * graph.n_vertices
    if stored_values > MAX_STORED_VALUES:
        raise ResourceLimitError(
            f"storing {stored_values} snapshot values exceeds the cap "
            f"{MAX_STORED_VALUES}; increase store_every")
    run_dt = t_end / n_steps

    halvings = 0
    while True:
        result = _march(graph, ham, u0.values, n_steps, run_dt, store_every,
                        bound)
        if result is not None:
            snaps = result
            break
        halvings += 1
        if halvings > MAX_HALVINGS:
            raise InvariantViolationError(
                "lipschitz-preservation",
                f"slope exceeds {bound:g} even after {MAX_HALVINGS} dt "
                "halvings")
        n_steps *= 2
        if n_steps > MAX_STEPS:
            raise ResourceLimitError(
                f"dt halving pushed the run past {MAX_STEPS} steps")
        run_dt = t_end / n_steps

    n_stored = n_steps // store_every + 1
    times = np.arange(n_stored) * (store_every * run_dt)
    times[-1] = n_steps * run_dt
    snapshots = np.asarray(snaps)

    if check_invariants:
        drift = k_rate * times[:, None]
        upper = np.max(snapshots - (u0.values[None, :] + drift))
        lower = np.max((u0.values[None, :] - drift) - snapshots)
        if max(upper, lower) > BARRIER_TOL:
            raise InvariantViolationError(
                "time-barrier",
                f"u0 -+ K t barrier violated by {max(upper, lower):.3e} "
                f"(K={k_rate:g})")
        final_slope = max_slope(graph, snapshots[-1])
        if final_slope > bound + BARRIER_TOL:
            raise InvariantViolationError(
                "lipschitz-preservation",
                f"final slope {final_slope:g} exceeds bound {bound:g}")

    return EvolutionTrace(
        graph=graph,
        times=times,
        snapshots=snapshots,
        dt=run_dt,
        cfl_factor=cfl_factor,
        store_every=store_every,
        metadata={
            "n_steps": n_steps,
            "t_end": t_end,
            "slope_bound": bound,
            "initial_slope": slope0,
            "initial_rate": rate0,
            "L": big_l,
            "K": k_rate,
            "halvings": halvings,
            "backend": _kernels.backend_name(),
        },
    )


def _march(graph, ham, u0_values, n_steps, dt, store_every, slope_bound):
    """March n_steps, storing snapshots; None signals a slope-bound trip."""
    cur = np.array(u0_values, copy=True)
    snaps = [cur.copy()]
    done = 0
    next_recheck = RECHECK_EVERY
    while done < n_steps:
        next_store = (done // store_every + 1) * store_every
        target = min(next_store, next_recheck, n_steps)
        cur = _kernels.advance(graph, ham, cur, target - done, dt)
        done = target
        if done == next_recheck:
            next_recheck += RECHECK_EVERY
            if max_slope(graph, cur) > slope_bound + BARRIER_TOL:
                return None
        if done % store_every == 0:
            snaps.append(cur.copy())
    return snaps


def _legendre_grid(ham, q_max, grid_points):
    """Grid for the conjugate sup: [0, P] with the top secant slope >= q_max."""
    cap = min(ham.p_cap, ham.domain_p_max)
    p_hi = min(1.0, cap)
    while p_hi < cap:
        top = (ham.evaluate(0, p_hi) - ham.evaluate(0, 0.5 * p_hi)) \
            / (0.5 * p_hi)
        if top >= q_max:
            break
        p_hi = min(2.0 * p_hi, cap)
    return np.linspace(0.0, p_hi, int(grid_points))


def hopf_lax_oracle(graph, ham, u0, t, grid_points=100000):
    """Variational solution for x-independent H, used as a validation oracle.

    u(t, x) = min over vertices y of [u0(y) + t * L#(d(x, y) / t)] - t * f0
    with L#(q) = sup_p (p q - h(p)), h(p) = H(p) - H(0), f0 = H(0). The
    conjugate is evaluated by dense grid search over an adaptive p-range.
    """
    check_same_graph(graph, u0)
    if not ham.is_x_independent():
        raise ValueError("the Hopf-Lax oracle requires an x-independent "
                         "Hamiltonian")
    t = float(t)
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return NodeFunction(graph, u0.values)

    f0 = ham.evaluate(0, 0.0)
    dmat = distance_matrix(graph)
    q = dmat / t
    qu, inverse = np.unique(q, return_inverse=True)
    pgrid = _legendre_grid(ham, float(qu[-1]), grid_points)
    hvals = ham.evaluate_many(0, pgrid) - f0
    conj = np.empty(qu.shape[0])
    chunk = max(1, int(5e6) // pgrid.shape[0])
    for i in range(0, qu.shape[0], chunk):
        block = qu[i:i + chunk, None] * pgrid[None, :] - hvals[None, :]
        conj[i:i + chunk] = block.max(axis=1)
    lsharp = conj[inverse.reshape(-1)].reshape(q.shape)
    vals = (u0.values[None, :] + t * lsharp).min(axis=1) - t * f0
    return NodeFunction(graph, vals)
