import numpy as np
import pytest

from vlcsec.geometry import LITERAL
from vlcsec.noma import is_feasible
from vlcsec.oracle import (
    ORACLES,
    UnionFind,
    check_alloc,
    check_azimuth,
    check_blockage,
    check_linking,
    check_sinr,
    closest_approach_margin,
    grid_allocations,
    run_oracle,
    sampled_blockage,
)


class TestUnionFind:
    def test_singletons(self):
        uf = UnionFind()
        assert uf.find("a") == "a"
        assert uf.components() == {"a": ["a"]}

    def test_merges(self):
        uf = UnionFind()
        uf.union(1, 2)
        uf.union(3, 4)
        uf.union(2, 4)
        uf.find(5)
        groups = sorted(sorted(v) for v in uf.components().values())
        assert groups == [[1, 2, 3, 4], [5]]

    def test_union_is_idempotent(self):
        uf = UnionFind()
        uf.union(1, 2)
        uf.union(2, 1)
        assert len(uf.components()) == 1


class TestReferences:
    def test_margin_through_axis(self):
        S = np.array([[10.0, 10.0, 3.98]])
        D = np.array([[10.1, 10.0, 0.85]])
        U = np.array([[10.0, 10.0, 1.6]])
        assert closest_approach_margin(S, D, U, 0.2, 1.6)[0] < 0.0

    def test_margin_far(self):
        S = np.array([[0.0, 0.0, 3.98]])
        D = np.array([[1.0, 0.0, 0.85]])
        U = np.array([[10.0, 0.0, 1.6]])
        assert closest_approach_margin(S, D, U, 0.2, 1.6)[0] > 8.0

    def test_margin_ignores_part_above_body(self):
        # the segment crosses the axis only above the body top
        S = np.array([[9.0, 10.0, 3.98]])
        D = np.array([[13.0, 10.0, 0.85]])
        U = np.array([[10.0, 10.0, 1.6]])
        margin = closest_approach_margin(S, D, U, 0.2, 1.6)[0]
        assert margin > 0.0
        assert not sampled_blockage(S, D, U, 0.2, 1.6)[0]

    def test_sampling_sees_side_hit(self):
        S = np.array([[5.0, 10.0, 3.98]])
        D = np.array([[10.5, 10.0, 0.85]])
        U = np.array([[10.0, 10.0, 1.6]])
        assert sampled_blockage(S, D, U, 0.2, 1.6, samples=2000)[0]

    def test_grid_allocations(self):
        grid = grid_allocations(2, step=0.1)
        assert len(grid) == 36
        assert all(is_feasible(row) for row in grid)
        assert [1.0, 0.0] in grid.tolist()


class TestChecks:
    def test_blockage(self):
        report = check_blockage(200, 1)
        assert report.passed, report.failures
        assert report.metrics["rectangle_aligned"] == 1.0
        assert report.metrics["intersection_residual"] <= 1e-9

    def test_blockage_literal_reports_mode(self):
        report = check_blockage(100, 1, samples=2000, mode=LITERAL)
        assert report.metrics["rectangle_aligned"] == 0.0
        assert report.metrics["agreement_margin"] >= 0.95

    def test_sinr(self):
        report = check_sinr(100, 2)
        assert report.passed, report.failures

    def test_alloc(self):
        report = check_alloc(4, 3)
        assert report.passed, report.failures
        assert report.metrics["infeasible"] == 0

    def test_azimuth(self):
        report = check_azimuth(10, 4)
        assert report.passed, report.failures

    def test_linking(self):
        report = check_linking(200, 5)
        assert report.passed, report.failures
        assert report.metrics["mismatched"] == 0

    @pytest.mark.slow
    @pytest.mark.parametrize("kind", sorted(ORACLES))
    def test_acceptance_sizes(self, kind):
        n = 100 if kind == "alloc" else 1000
        assert run_oracle(kind, n, 1).passed


class TestRunOracle:
    def test_dispatch(self):
        report = run_oracle("linking", 5, 1)
        assert report.kind == "linking"
        assert report.cases == 5

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            run_oracle("fourier", 5, 1)

    def test_needs_cases(self):
        with pytest.raises(ValueError):
            run_oracle("sinr", 0, 1)
