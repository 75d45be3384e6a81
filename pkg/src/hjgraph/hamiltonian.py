"""Hamiltonians H(x, p), even in p, over the vertices of a metric graph.

Three families are supported: affine a(x)|p| + f(x), power |p|^k + f(x) and
per-vertex tabulated curves on a shared p-grid. All evaluation goes through
|p|, so evenness holds by construction. The module also audits the standing
assumptions (continuity is structural; convexity, coercivity and
boundedness at p = 0 are sampled) and solves H(x, p) = c for the maximal
subsolution slope.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import CoercivityError, InfeasibleLevelError
from .graph import NodeFunction, check_same_graph, max_slope

DEFAULT_P_CAP = 1.0e6
TOL_ROOT = 1.0e-10
TOL_LEVEL = 1.0e-12

_FAMILY_CODES = {"affine": 0, "power": 1, "tabulated": 2}


class Hamiltonian:
    """Base class; concrete families implement `_values_at_rows`."""

    family = None

    def __init__(self, graph, p_cap=DEFAULT_P_CAP):
        if not (p_cap > 0):
            raise ValueError("p_cap must be positive")
        self.graph = graph
        self.p_cap = float(p_cap)

    @property
    def n_vertices(self):
        return self.graph.n_vertices

    @property
    def domain_p_max(self):
        """Largest |p| the family can evaluate (inf for closed forms)."""
        return np.inf

    def evaluate(self, x, p):
        """H(x, |p|) at a single vertex."""
        x = self.graph.check_vertex(x)
        return float(self.evaluate_many(x, np.array([p]))[0])

    def evaluate_field(self, p):
        """H(x, |p|) at every vertex; p is a scalar or a per-vertex array."""
        p = np.abs(np.asarray(p, dtype=np.float64))
        self._check_domain(p)
        return self._field(np.broadcast_to(p, (self.n_vertices,))
                           if p.ndim == 0 else p)

    def evaluate_many(self, x, ps):
        """H(x, |p|) at one vertex for an array of p values."""
        ps = np.abs(np.asarray(ps, dtype=np.float64))
        self._check_domain(ps)
        return self._row(int(x), ps)

    def zero_values(self):
        """The field H(., 0)."""
        return self.evaluate_field(0.0)

    def _check_domain(self, p):
        pass

    def is_x_independent(self):
        raise NotImplementedError

    def kernel_pack(self):
        """Arguments consumed by the compiled stepping kernel."""
        raise NotImplementedError


class AffineHamiltonian(Hamiltonian):
    """H(x, p) = a(x)|p| + f(x) with a(x) > 0."""

    family = "affine"

    def __init__(self, a, f, p_cap=DEFAULT_P_CAP):
        check_same_graph(f.graph, a, "coefficient")
        super().__init__(f.graph, p_cap)
        if np.any(a.values <= 0.0):
            raise ValueError("affine coefficient a(x) must be positive")
        self.a = a.values
        self.f = f.values

    def _field(self, p):
        return self.a * p + self.f

    def _row(self, x, ps):
        return self.a[x] * ps + self.f[x]

    def is_x_independent(self):
        return bool(np.all(self.a == self.a[0]) and np.all(self.f == self.f[0]))

    def kernel_pack(self):
        dummy_grid = np.zeros(2)
        dummy_tab = np.zeros((1, 2))
        return (0, self.a, self.f, 1.0, dummy_grid, dummy_tab, np.inf)


class PowerHamiltonian(Hamiltonian):
    """H(x, p) = |p|^k + f(x) with k >= 1."""

    family = "power"

    def __init__(self, k, f, p_cap=DEFAULT_P_CAP):
        super().__init__(f.graph, p_cap)
        k = float(k)
        if not k >= 1.0:
            raise ValueError("power exponent k must be >= 1")
        self.k = k
        self.f = f.values

    def _field(self, p):
        return np.power(p, self.k) + self.f

    def _row(self, x, ps):
        return np.power(ps, self.k) + self.f[x]

    def is_x_independent(self):
        return bool(np.all(self.f == self.f[0]))

    def kernel_pack(self):
        dummy_grid = np.zeros(2)
        dummy_tab = np.zeros((1, 2))
        ones = np.ones(self.n_vertices)
        return (1, ones, self.f, self.k, dummy_grid, dummy_tab, np.inf)


class TabulatedHamiltonian(Hamiltonian):
    """Per-vertex sampled curves p -> H(x, p) on a shared grid.

    Evaluation interpolates linearly between grid points; values beyond the
    grid are a domain error. Curves loaded from a description file must be
    nondecreasing; direct construction may disable that check to build
    counterexamples for the assumption audit.
    """

    family = "tabulated"

    def __init__(self, graph, p_grid, samples, p_cap=None,
                 require_monotone=True):
        p_grid = np.ascontiguousarray(p_grid, dtype=np.float64)
        samples = np.ascontiguousarray(samples, dtype=np.float64)
        if p_grid.ndim != 1 or p_grid.shape[0] < 2:
            raise ValueError("p-grid needs at least two points")
        if p_grid[0] != 0.0:
            raise ValueError("p-grid must start at 0")
        if np.any(np.diff(p_grid) <= 0.0):
            raise ValueError("p-grid must be strictly increasing")
        if samples.shape != (graph.n_vertices, p_grid.shape[0]):
            raise ValueError("samples must be (n_vertices, len(p_grid))")
        if not np.all(np.isfinite(samples)):
            raise ValueError("tabulated samples must be finite")
        if require_monotone and np.any(np.diff(samples, axis=1) < 0.0):
            x, j = np.argwhere(np.diff(samples, axis=1) < 0.0)[0]
            raise ValueError(
                f"tabulated curve decreases at vertex {x}, "
                f"grid index {j} -> {j + 1}")
        if p_cap is None:
            p_cap = float(p_grid[-1])
        super().__init__(graph, p_cap)
        self.p_grid = p_grid
        self.samples = samples

    @property
    def domain_p_max(self):
        return float(self.p_grid[-1])

    def _check_domain(self, p):
        if np.any(p > self.p_grid[-1]):
            raise ValueError(
                f"|p| beyond the tabulated grid end {self.p_grid[-1]:g}")

    def _interp(self, rows, p):
        grid = self.p_grid
        idx = np.searchsorted(grid, p, side="right") - 1
        idx = np.clip(idx, 0, grid.shape[0] - 2)
        g0 = grid[idx]
        g1 = grid[idx + 1]
        v0 = self.samples[rows, idx]
        v1 = self.samples[rows, idx + 1]
        return v0 + (v1 - v0) * ((p - g0) / (g1 - g0))

    def _field(self, p):
        return self._interp(np.arange(self.n_vertices), p)

    def _row(self, x, ps):
        return self._interp(np.full(ps.shape, x, dtype=np.intp), ps)

    def is_x_independent(self):
        return bool(np.all(self.samples == self.samples[0]))

    def kernel_pack(self):
        ones = np.ones(self.n_vertices)
        zeros = np.zeros(self.n_vertices)
        return (2, ones, zeros, 1.0, self.p_grid, self.samples,
                float(self.p_grid[-1]))


@dataclass
class AssumptionReport:
    """Outcome of the numerical assumption audit.

    Witnesses map each check to the (vertex, p, detail) samples where it
    failed; a flag is true exactly when its witness list is empty. L is the
    smallest slope at which min_x H(x, p) reaches the critical level (the
    coercivity slope bound); K bounds |H| along the initial data's slope.
    """

    convexity_ok: bool
    coercivity_ok: bool
    bounded_at_zero_ok: bool
    witnesses: dict = field(default_factory=dict)
    L: float | None = None
    K: float | None = None

    @property
    def all_ok(self):
        return (self.convexity_ok and self.coercivity_ok
                and self.bounded_at_zero_ok)


def _effective_cap(ham):
    return min(ham.p_cap, ham.domain_p_max)


def sigma_c(ham, x, c, tol_root=TOL_ROOT, tol_c=TOL_LEVEL):
    """Maximal slope p >= 0 with H(x, p) <= c.

    Brackets by doubling from p = 1, then bisects until the bracket
    collapses, so the result is accurate to rounding (|H - c| <= tol_root
    holds with a wide margin for the supported families).
    """
    x = ham.graph.check_vertex(x)
    c = float(c)
    h0 = ham.evaluate(x, 0.0)
    if h0 > c + tol_c:
        raise InfeasibleLevelError(
            f"level c={c:g} lies below H(x,0)={h0:g} at vertex {x}")
    if h0 >= c:
        return 0.0
    cap = _effective_cap(ham)
    lo = 0.0
    hi = min(1.0, cap)
    while ham.evaluate(x, hi) <= c:
        if hi >= cap:
            raise CoercivityError(
                f"H({x}, p) never exceeds c={c:g} below the cap {cap:g}")
        lo = hi
        hi = min(2.0 * hi, cap)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            break
        if ham.evaluate(x, mid) <= c:
            lo = mid
        else:
            hi = mid
    return lo


def sigma_field(ham, c, tol_root=TOL_ROOT, tol_c=TOL_LEVEL):
    """sigma_c at every vertex as an array."""
    return np.array([sigma_c(ham, x, c, tol_root, tol_c)
                     for x in range(ham.n_vertices)])


def coercivity_slope_bound(ham, c=None):
    """Smallest p with min_x H(x, p) >= c, or None if the cap never reaches.

    Scans a geometric grid, then bisects the bracketing interval down to
    rounding. This is the constant L of the regularity estimate.
    """
    if c is None:
        c = float(np.max(ham.zero_values()))
    cap = _effective_cap(ham)

    def gmin(p):
        return float(np.min(ham.evaluate_field(p)))

    if gmin(0.0) >= c:
        return 0.0
    grid = np.geomspace(max(cap * 1e-12, 1e-300), cap, 64)
    lo = 0.0
    hi = None
    for p in grid:
        if gmin(p) >= c:
            hi = float(p)
            break
        lo = float(p)
    if hi is None:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            break
        if gmin(mid) >= c:
            hi = mid
        else:
            lo = mid
    return hi


def check_assumptions(ham, graph, p_samples=33, u0=None, tol=1e-9):
    """Sample-audit convexity, coercivity and boundedness at p = 0.

    Midpoint convexity and monotonicity (the even-convex consequence on
    [0, inf)) are checked on a geometric p-grid up to the cap. Failures are
    reported as witnesses, never raised. With initial data supplied, K =
    max_x |H(x, Lip[u0])| is included.
    """
    if ham.graph.fingerprint != graph.fingerprint:
        raise ValueError("hamiltonian does not live on the given graph")
    p_samples = int(p_samples)
    if p_samples < 3:
        raise ValueError("p_samples must be at least 3")
    cap = _effective_cap(ham)
    grid = np.concatenate([[0.0],
                           np.geomspace(max(cap * 1e-9, 1e-300), cap,
                                        p_samples - 1)])
    vals = np.stack([ham.evaluate_field(p) for p in grid])

    witnesses = {"convexity": [], "coercivity": [], "bounded_at_zero": []}

    zero = vals[0]
    bad = ~np.isfinite(zero)
    for x in np.flatnonzero(bad):
        witnesses["bounded_at_zero"].append((int(x), 0.0, "non-finite H(x,0)"))
    c = float(np.max(zero[~bad])) if (~bad).any() else np.inf

    for j in range(len(grid) - 1):
        a, b = grid[j], grid[j + 1]
        scale = 1.0 + np.abs(vals[j]) + np.abs(vals[j + 1])
        # even + convex implies nondecreasing on [0, inf)
        drop = vals[j + 1] - vals[j] < -tol * scale
        for x in np.flatnonzero(drop):
            witnesses["convexity"].append(
                (int(x), float(b), "decreasing on [0, inf)"))
        mid_vals = ham.evaluate_field(0.5 * (a + b))
        bulge = mid_vals > 0.5 * (vals[j] + vals[j + 1]) + tol * scale
        for x in np.flatnonzero(bulge):
            witnesses["convexity"].append(
                (int(x), float(0.5 * (a + b)), "midpoint convexity fails"))

    top = vals[-1]
    low = top < c - tol * (1.0 + abs(c))
    for x in np.flatnonzero(low):
        witnesses["coercivity"].append(
            (int(x), float(cap), f"H(x, cap)={top[x]:g} < c={c:g}"))

    L = coercivity_slope_bound(ham, c) if not witnesses["coercivity"] else None
    K = None
    if u0 is not None:
        check_same_graph(graph, u0, "initial data")
        lip = max_slope(graph, u0.values)
        K = float(np.max(np.abs(ham.evaluate_field(lip))))

    return AssumptionReport(
        convexity_ok=not witnesses["convexity"],
        coercivity_ok=not witnesses["coercivity"],
        bounded_at_zero_ok=not witnesses["bounded_at_zero"],
        witnesses=witnesses,
        L=L,
        K=K,
    )


def hamiltonian_from_dict(graph, spec, resolve_profile, base_dir=None):
    """Build a Hamiltonian from a parsed description dictionary.

    `resolve_profile` turns a profile descriptor into a per-vertex array
    (supplied by the config layer so named profiles stay in one place).
    """
    if not isinstance(spec, dict):
        raise ValueError("hamiltonian description must be an object")
    family = spec.get("family")
    if family not in _FAMILY_CODES:
        raise ValueError(
            f"unknown hamiltonian family {family!r}; supported: "
            f"{sorted(_FAMILY_CODES)}")
    p_cap = float(spec.get("p_cap", DEFAULT_P_CAP))
    if family == "affine":
        a = resolve_profile(graph, spec.get("a", {"profile": "constant",
                                                  "value": 1.0}), base_dir)
        f = resolve_profile(graph, spec.get("potential", {"profile": "zero"}),
                            base_dir)
        return AffineHamiltonian(NodeFunction(graph, a),
                                 NodeFunction(graph, f), p_cap)
    if family == "power":
        k = spec.get("k", 2.0)
        f = resolve_profile(graph, spec.get("potential", {"profile": "zero"}),
                            base_dir)
        return PowerHamiltonian(k, NodeFunction(graph, f), p_cap)
    p_grid = spec.get("p_grid")
    samples = spec.get("samples")
    if p_grid is None or samples is None:
        raise ValueError("tabulated hamiltonian needs 'p_grid' and 'samples'")
    return TabulatedHamiltonian(graph, np.asarray(p_grid, float),
                                np.asarray(samples, float),
                                p_cap=spec.get("p_cap"))


def load_hamiltonian(graph, path, resolve_profile):
    """Load a Hamiltonian description file (JSON; see schema/)."""
    with open(path, encoding="utf-8") as fh:
        spec = json.load(fh)
    return hamiltonian_from_dict(graph, spec, resolve_profile,
                                 base_dir=os.path.dirname(os.path.abspath(path)))
