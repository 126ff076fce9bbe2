import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vlcsec.noma import (
    LITERAL,
    PHYSICAL,
    GroupAssignment,
    GroupObjective,
    SolverSettings,
    fixed_allocation,
    group_objective,
    is_feasible,
    lattice_start,
    optimize_allocation,
    project_monotone,
    project_simplex,
    vertex_starts,
)
from vlcsec.oracle import grid_allocations
from vlcsec.shared.config import dbm_to_watts
from vlcsec.shared.errors import SolverNonConvergence

NOISE = 10 ** ((-98.35 - 30) / 10)
P_S = dbm_to_watts(20.0)


def two_user_group():
    assignment = GroupAssignment.from_sets([{0, 1}], 2)
    est = np.array([[1e-6], [5e-6]])
    return assignment.with_sic_orders(est), est


def three_user_scene():
    # group {0, 1, 2} on two LEDs plus a foreign LED serving user 3
    assignment = GroupAssignment.from_sets([{0, 1, 2}, {0, 1, 2}, {3}], 4)
    est = np.array(
        [
            [2e-6, 1e-6, 4e-7],
            [6e-6, 3e-6, 1e-7],
            [1e-6, 5e-7, 2e-6],
            [1e-7, 1e-7, 6e-6],
        ]
    )
    return assignment.with_sic_orders(est), est


def crowded_scene():
    # users 1 and 2 also hear a strong second LED that the literal set counts as interference
    assignment = GroupAssignment.from_sets([{0, 1, 2}, {1, 2}], 3)
    est = np.array([[5e-6, 0.0], [1e-6, 2e-5], [1.2e-6, 2.1e-5]])
    return assignment.with_sic_orders(est), est


class TestProjection:
    @given(st.lists(st.floats(min_value=-3, max_value=3), min_size=1, max_size=6))
    def test_monotone_projection_is_feasible(self, values):
        assert is_feasible(project_monotone(np.array(values)))

    def test_feasible_point_is_fixed(self):
        v = np.array([0.5, 0.3, 0.1])
        assert project_monotone(v) == pytest.approx(v)

    def test_oversized_vector_scaled_to_simplex(self):
        w = project_monotone(np.array([2.0, 1.0]))
        assert w.sum() == pytest.approx(1.0)
        assert w == pytest.approx([1.0, 0.0])

    def test_unsorted_input_pooled(self):
        assert project_monotone(np.array([0.1, 0.3])) == pytest.approx([0.2, 0.2])

    def test_simplex(self):
        w = project_simplex(np.array([0.9, 0.8, -0.2]))
        assert w.sum() == pytest.approx(1.0)
        assert w == pytest.approx([0.55, 0.45, 0.0])


class TestFeasibility:
    def test_accepts_fixed_split(self):
        assert is_feasible(fixed_allocation(4, 0.7).betas)

    @pytest.mark.parametrize("betas", [[0.3, 0.5], [0.7, 0.4], [0.6, -0.1]])
    def test_rejects(self, betas):
        assert not is_feasible(betas)


class TestStarts:
    def test_vertices(self):
        v = vertex_starts(3)
        assert v == pytest.approx(
            np.array([[1.0, 0.0, 0.0], [0.5, 0.5, 0.0], [1 / 3, 1 / 3, 1 / 3]])
        )
        assert all(is_feasible(row) for row in v)

    @pytest.mark.parametrize("mode", [PHYSICAL, LITERAL])
    def test_lattice_start_dominates_vertices(self, mode):
        assignment, est = crowded_scene()
        order = assignment.order_of(frozenset({0, 1, 2}))
        objective = group_objective(order, est, assignment, P_S, NOISE, mode)
        start = lattice_start(objective)
        assert is_feasible(start)
        assert objective.value(start) >= objective.values(vertex_starts(3)).max() - 1e-12

    def test_values_match_value(self):
        assignment, est = three_user_scene()
        order = assignment.order_of(frozenset({0, 1, 2}))
        objective = group_objective(order, est, assignment, P_S, NOISE)
        rows = grid_allocations(3, step=0.1)
        assert objective.values(rows) == pytest.approx([objective.value(r) for r in rows])


class TestGroupObjective:
    def test_gradient_matches_finite_differences(self):
        objective = GroupObjective(
            np.array([1e-12, 9e-12, 4e-12]), np.array([2e-12, 1e-12, 3e-12])
        )
        beta = np.array([0.5, 0.3, 0.15])
        h = 1e-6
        numeric = [
            (objective.value(beta + h * e) - objective.value(beta - h * e)) / (2 * h)
            for e in np.eye(3)
        ]
        assert objective.gradient(beta) == pytest.approx(numeric, rel=1e-5)

    def test_dead_user_ignored(self):
        objective = GroupObjective(np.array([0.0, 4e-12]), np.array([1e-12, 1e-12]))
        beta = np.array([0.6, 0.4])
        assert np.isfinite(objective.value(beta))
        assert objective.gradient(beta)[0] == pytest.approx(0.0)

    def test_matches_sum_of_rates(self):
        assignment, est = two_user_group()
        order = assignment.order_of(frozenset({0, 1}))
        objective = group_objective(order, est, assignment, P_S, NOISE)
        a0, a1 = 1e-12, 25e-12
        c = NOISE / P_S
        want = 0.5 * np.log2((a0 + c) / (a0 * 0.4 + c)) + 0.5 * np.log2((a1 * 0.4 + c) / c)
        assert objective.value(np.array([0.6, 0.4])) == pytest.approx(want, rel=1e-12)

    def test_interference_sets(self):
        assignment, est = three_user_scene()
        order = assignment.order_of(frozenset({0, 1, 2}))
        physical = group_objective(order, est, assignment, P_S, NOISE, PHYSICAL)
        literal = group_objective(order, est, assignment, P_S, NOISE, LITERAL)
        rows = list(order)
        assert physical.a == pytest.approx(literal.a)
        # physical: the foreign LED 2; literal: the group's second LED
        assert physical.c == pytest.approx(est[rows, 2] ** 2 + NOISE / P_S)
        assert literal.c == pytest.approx(est[rows, 1] ** 2 + NOISE / P_S)


class TestOptimizeAllocation:
    def test_single_user_takes_everything(self):
        assignment = GroupAssignment.from_sets([{0}], 1)
        alloc = optimize_allocation((0,), np.array([[3e-6]]), assignment, P_S, NOISE)
        assert alloc.betas == (1.0,)

    def test_empty_group(self):
        assignment = GroupAssignment.from_sets([set()], 1)
        with pytest.raises(ValueError):
            optimize_allocation((), np.zeros((1, 1)), assignment, P_S, NOISE)

    def test_feasible_and_beats_fixed(self):
        assignment, est = two_user_group()
        order = assignment.order_of(frozenset({0, 1}))
        alloc = optimize_allocation(order, est, assignment, P_S, NOISE)
        objective = group_objective(order, est, assignment, P_S, NOISE)
        assert is_feasible(alloc.betas)
        assert objective.value(np.array(alloc.betas)) >= objective.value(
            np.array(fixed_allocation(2, 0.6).betas)
        )
        assert alloc.group == order

    def test_identical_gains(self):
        assignment = GroupAssignment.from_sets([{0, 1}], 2)
        est = np.array([[3e-6], [3e-6]])
        assignment = assignment.with_sic_orders(est)
        alloc = optimize_allocation((0, 1), est, assignment, P_S, NOISE)
        assert is_feasible(alloc.betas)

    @pytest.mark.parametrize("mode", [PHYSICAL, LITERAL])
    def test_within_one_percent_of_grid(self, mode):
        assignment, est = three_user_scene()
        order = assignment.order_of(frozenset({0, 1, 2}))
        alloc = optimize_allocation(order, est, assignment, P_S, NOISE, mode)
        objective = group_objective(order, est, assignment, P_S, NOISE, mode)
        best = max(objective.value(row) for row in grid_allocations(3, step=0.02))
        assert objective.value(np.array(alloc.betas)) >= best * 0.99

    @pytest.mark.parametrize("mode", [PHYSICAL, LITERAL])
    def test_never_below_a_vertex(self, mode):
        assignment, est = crowded_scene()
        order = assignment.order_of(frozenset({0, 1, 2}))
        alloc = optimize_allocation(order, est, assignment, P_S, NOISE, mode)
        objective = group_objective(order, est, assignment, P_S, NOISE, mode)
        got = objective.value(np.array(alloc.betas))
        assert got >= objective.values(vertex_starts(3)).max() - 1e-12
        best = objective.values(grid_allocations(3, step=0.02)).max()
        assert got >= best * 0.99

    def test_single_restart_still_tries_vertices(self):
        assignment, est = crowded_scene()
        order = assignment.order_of(frozenset({0, 1, 2}))
        settings = SolverSettings(restarts=1)
        alloc = optimize_allocation(order, est, assignment, P_S, NOISE, LITERAL, settings)
        objective = group_objective(order, est, assignment, P_S, NOISE, LITERAL)
        got = objective.value(np.array(alloc.betas))
        assert got >= objective.values(vertex_starts(3)).max() - 1e-12

    def test_deterministic_for_seed(self):
        assignment, est = three_user_scene()
        order = assignment.order_of(frozenset({0, 1, 2}))
        settings = SolverSettings(seed=42)
        a = optimize_allocation(order, est, assignment, P_S, NOISE, settings=settings)
        b = optimize_allocation(order, est, assignment, P_S, NOISE, settings=settings)
        assert a == b

    def test_iteration_cap_flags_allocation(self):
        assignment, est = two_user_group()
        order = assignment.order_of(frozenset({0, 1}))
        settings = SolverSettings(restarts=1, max_iter=1)
        alloc = optimize_allocation(order, est, assignment, P_S, NOISE, settings=settings)
        assert not alloc.converged
        assert is_feasible(alloc.betas)

    def test_iteration_cap_strict(self):
        assignment, est = two_user_group()
        order = assignment.order_of(frozenset({0, 1}))
        settings = SolverSettings(restarts=1, max_iter=1)
        with pytest.raises(SolverNonConvergence) as excinfo:
            optimize_allocation(order, est, assignment, P_S, NOISE, settings=settings,
                                strict=True)
        assert excinfo.value.best is not None
