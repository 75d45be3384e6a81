import itertools
import json

import numpy as np
import pytest

import hjgraph as hj
from hjgraph.graph import NodeFunction

from helpers import (cosine_affine, eikonal, enumerate_path_costs,
                     head_cost_solution, trapezoid_potential_on_interval,
                     value_iteration)


class TestCriticalValue:
    def test_cosine_attains_one(self, interval200):
        ham = cosine_affine(interval200)
        assert hj.critical_value(ham, interval200) == 1.0

    def test_eikonal_zero(self, interval200):
        assert hj.critical_value(eikonal(interval200), interval200) == 0.0

    def test_tabulated_file_matches_column_scan(self, tmp_path):
        g = hj.build_interval(10, 1.0)
        rng = np.random.default_rng(11)
        base = np.sort(rng.uniform(0, 1, g.n_vertices))
        p_grid = [0.0, 1.0, 2.0]
        samples = [[float(b), float(b + 1), float(b + 2)] for b in base]
        spec = {"family": "tabulated", "p_grid": p_grid, "samples": samples}
        path = tmp_path / "tab.json"
        path.write_text(json.dumps(spec))

        from hjgraph.config import resolve_profile
        ham = hj.load_hamiltonian(g, path, resolve_profile)
        # independent scan of the stored p = 0 column
        stored = json.loads(path.read_text())
        oracle = max(row[0] for row in stored["samples"])
        assert hj.critical_value(ham, g) == oracle


class TestAubrySet:
    def test_cosine_endpoints(self, interval200):
        ham = cosine_affine(interval200)
        c = hj.critical_value(ham, interval200)
        aubry = hj.aubry_set(ham, interval200, c, 1e-9)
        assert list(aubry) == [0, 200]

    def test_eikonal_everything(self, interval200):
        ham = eikonal(interval200)
        aubry = hj.aubry_set(ham, interval200, 0.0, 1e-9)
        assert len(aubry) == interval200.n_vertices

    def test_plateau_by_thresholding_oracle(self, interval200):
        # clipping the cosine from above puts the maximum on a plateau
        coord = interval200.profile_coordinate()
        f = np.minimum(np.cos(2 * np.pi * coord), 0.5)
        ham = hj.AffineHamiltonian(NodeFunction.constant(interval200, 1.0),
                                   NodeFunction(interval200, f))
        c = hj.critical_value(ham, interval200)
        aubry = hj.aubry_set(ham, interval200, c, 1e-9)
        oracle = np.flatnonzero(f >= c - 1e-9)
        assert np.array_equal(aubry, oracle)
        assert len(aubry) > 2

    def test_never_empty(self, interval200):
        ham = cosine_affine(interval200)
        c = hj.critical_value(ham, interval200)
        assert len(hj.aubry_set(ham, interval200, c, 0.0)) >= 1


class TestManePotential:
    def test_unit_sigma_reduces_to_metric(self, sierpinski2):
        # supercritical level c = 1 with f = 0 gives sigma = 1 everywhere
        ham = eikonal(sierpinski2)
        s = hj.mane_potential(sierpinski2, ham, 1.0, 4)
        assert np.allclose(s.values, hj.shortest_dists(sierpinski2, 4),
                           atol=1e-12)

    def test_eikonal_critical_gives_zero(self, sierpinski2):
        ham = eikonal(sierpinski2)
        s = hj.mane_potential(sierpinski2, ham, 0.0, 0)
        assert np.all(s.values == 0.0)

    def test_trapezoid_quadrature_oracle(self, interval200):
        ham = cosine_affine(interval200)
        c = hj.critical_value(ham, interval200)
        s = hj.mane_potential(interval200, ham, c, 0)
        sigma_exact = c - np.cos(2 * np.pi
                                 * interval200.profile_coordinate())
        oracle = trapezoid_potential_on_interval(interval200, sigma_exact)
        assert np.max(np.abs(s.values - oracle)) <= 1e-12

    def test_basepoint_and_nonnegativity(self, sierpinski3):
        ham = cosine_affine(sierpinski3)
        c = hj.critical_value(ham, sierpinski3)
        s = hj.mane_potential(sierpinski3, ham, c, 7)
        assert s.values[7] == 0.0
        assert np.all(s.values >= 0.0)

    def test_edge_slope_bound(self, sierpinski3):
        ham = cosine_affine(sierpinski3)
        c = hj.critical_value(ham, sierpinski3)
        s = hj.mane_potential(sierpinski3, ham, c, 0)
        from hjgraph.hamiltonian import sigma_field
        sigma = sigma_field(ham, c)
        for (a, b), ell in zip(sierpinski3.edges, sierpinski3.lengths):
            bound = ell * (sigma[a] + sigma[b]) / 2
            assert abs(s.values[a] - s.values[b]) <= bound + 1e-12

    def test_value_iteration_fixpoint_exact(self, sierpinski2):
        ham = cosine_affine(sierpinski2)
        c = hj.critical_value(ham, sierpinski2)
        from hjgraph.hamiltonian import sigma_field
        costs = hj.edge_costs(sierpinski2, sigma_field(ham, c))
        for y in (0, 5, 11):
            s = hj.mane_potential(sierpinski2, ham, c, y)
            vi = value_iteration(sierpinski2, costs, y)
            assert np.array_equal(s.values, vi)

    def test_triangle_inequality(self, sierpinski2):
        ham = cosine_affine(sierpinski2)
        c = hj.critical_value(ham, sierpinski2)
        n = sierpinski2.n_vertices
        smat = np.stack([hj.mane_potential(sierpinski2, ham, c, y).values
                         for y in range(n)], axis=1)
        for x, y, z in itertools.product(range(n), repeat=3):
            assert smat[x, z] <= smat[x, y] + smat[y, z] + 1e-12

    def test_infeasible_level_propagates(self, interval200):
        ham = cosine_affine(interval200)
        from hjgraph.errors import InfeasibleLevelError
        with pytest.raises(InfeasibleLevelError):
            hj.mane_potential(interval200, ham, 0.5, 0)


class TestStationarySolution:
    def test_composition(self, interval200):
        ham = cosine_affine(interval200)
        c, v, y = hj.stationary_solution(interval200, ham)
        assert c == 1.0
        assert y == 0
        direct = hj.mane_potential(interval200, ham, c, 0)
        assert np.array_equal(v.values, direct.values)
        assert v.values[y] == 0.0

    def test_eikonal_identically_zero(self, interval200):
        ham = eikonal(interval200)
        c, v, y = hj.stationary_solution(interval200, ham)
        assert c == 0.0
        assert y == 0
        assert np.all(v.values == 0.0)

    def test_gasket_against_path_enumeration(self, sierpinski2):
        # f = -(graph distance to a corner)
        dist0 = hj.shortest_dists(sierpinski2, 0)
        ham = hj.AffineHamiltonian(
            NodeFunction.constant(sierpinski2, 1.0),
            NodeFunction(sierpinski2, -dist0))
        c, v, y = hj.stationary_solution(sierpinski2, ham)
        from hjgraph.hamiltonian import sigma_field
        costs = hj.edge_costs(sierpinski2, sigma_field(ham, c))
        for x in range(sierpinski2.n_vertices):
            oracle = enumerate_path_costs(sierpinski2, costs, y, x)
            assert v.values[x] == pytest.approx(oracle, abs=1e-12)


class TestStationaryResidual:
    def test_constant_potential_exact(self, interval200):
        ham = eikonal(interval200, f_const=0.3)
        c, v, y = hj.stationary_solution(interval200, ham)
        sub, sup = hj.stationary_residual(interval200, ham, v, c,
                                          source={y})
        assert sub <= 1e-9
        assert sup <= 1e-9

    def test_zero_field_eikonal(self, interval200):
        ham = eikonal(interval200)
        v = NodeFunction.constant(interval200, 0.0)
        assert hj.stationary_residual(interval200, ham, v, 0.0) == (0.0, 0.0)

    def test_doubled_potential_oversteep(self, interval200):
        ham = cosine_affine(interval200)
        c, v, y = hj.stationary_solution(interval200, ham)
        doubled = NodeFunction(interval200, 2.0 * v.values)
        sub, _ = hj.stationary_residual(interval200, ham, doubled, c,
                                        source={y})
        assert sub > 0.1

    def test_scheme_scale_residual_for_varying_potential(self, interval200):
        # trapezoid cost makes S an O(h) solution for non-constant sigma
        ham = cosine_affine(interval200)
        c, v, y = hj.stationary_solution(interval200, ham)
        sub, sup = hj.stationary_residual(interval200, ham, v, c,
                                          source={y})
        h = interval200.max_edge_length
        assert max(sub, sup) <= 10.0 * h


class TestComparisonCheck:
    def test_equal_fields_pass(self, sierpinski2):
        u = NodeFunction.constant(sierpinski2, 1.0)
        assert hj.comparison_check(sierpinski2, u, u, [0]).passed

    def test_constant_shift_passes(self, interval200):
        ham = cosine_affine(interval200)
        c, v, y = hj.stationary_solution(interval200, ham)
        shifted = NodeFunction(interval200, v.values + 1.0)
        assert hj.comparison_check(interval200, v, shifted, [y]).passed

    def test_randomized_sub_super_pairs(self, sierpinski2):
        ham = cosine_affine(sierpinski2)
        c = hj.critical_value(ham, sierpinski2)
        aubry = hj.aubry_set(ham, sierpinski2, c, 1e-9)
        from hjgraph.hamiltonian import sigma_field
        sigma = sigma_field(ham, c)
        phi = head_cost_solution(sierpinski2, sigma, aubry)
        rng = np.random.default_rng(2024)
        for _ in range(25):
            beta = rng.uniform(0.0, 1.0)
            shift = rng.uniform(0.0, 2.0)
            u = NodeFunction(sierpinski2, beta * phi)       # subsolution
            v = NodeFunction(sierpinski2, phi + shift)      # supersolution
            # sanity: the generated pair is what it claims to be
            sub_u, _ = hj.stationary_residual(sierpinski2, ham, u, c)
            _, sup_v = hj.stationary_residual(sierpinski2, ham, v, c,
                                              source=aubry)
            assert sub_u <= 1e-10
            assert sup_v <= 1e-10
            assert hj.comparison_check(sierpinski2, u, v, aubry).passed

    def test_failure_carries_witness(self, interval200):
        ham = cosine_affine(interval200)
        c, v, y = hj.stationary_solution(interval200, ham)
        dip = v.values.copy()
        dip[100] -= 1.0
        res = hj.comparison_check(interval200, v,
                                  NodeFunction(interval200, dip), [y])
        assert not res.passed
        assert res.witness == 100

    def test_empty_boundary_rejected(self, interval200):
        u = NodeFunction.constant(interval200, 0.0)
        with pytest.raises(ValueError, match="nonempty"):
            hj.comparison_check(interval200, u, u, [])


class TestInvariants:
    @pytest.mark.parametrize("maker", [
        lambda: hj.build_interval(100, 1.0),
        lambda: hj.build_circle(128, 1.0),
        lambda: hj.build_sierpinski(3),
    ])
    def test_equi_lipschitz_two_l(self, maker):
        g = maker()
        ham = cosine_affine(g)
        report = hj.check_assumptions(ham, g)
        c, v, y = hj.stationary_solution(g, ham)
        for (a, b), ell in zip(g.edges, g.lengths):
            assert abs(v.values[a] - v.values[b]) \
                <= 2.0 * report.L * ell + 1e-12

    def test_critical_bracketing(self, sierpinski2):
        ham = cosine_affine(sierpinski2)
        c = hj.critical_value(ham, sierpinski2)
        cap = min(ham.p_cap, ham.domain_p_max)
        grid = np.concatenate([[0.0], np.geomspace(1e-6, cap, 64)])
        sampled = np.stack([ham.evaluate_field(p) for p in grid])
        # min over the sampled p-grid of H(x, .) <= c at every vertex
        assert np.all(sampled.min(axis=0) <= c + 1e-12)
        assert c == np.max(ham.zero_values())

    def test_critical_data_summary(self, interval200):
        ham = cosine_affine(interval200)
        crit = hj.CriticalData.compute(ham, interval200)
        assert crit.c == 1.0
        assert np.all(crit.sigma.values >= 0.0)
        assert np.all(crit.sigma.values[crit.aubry] <= 1e-9)
        d = crit.summary_dict()
        assert d["aubry_size"] == 2
        assert d["aubry_members"] == [0, 200]
