"""
Estimated-sum-rate power allocation.

Each group's ratios maximize the sum of 1/2 log2(1 + SINR) computed from the
blockage-free estimated gains, subject to sum(beta) <= 1 and
beta_1 >= beta_2 >= ... >= 0. The solver is projected gradient ascent with
several starts: the fixed split, the vertices of the feasible set, a coarse
lattice point for small groups and random restarts.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import isotonic_regression

from ..shared.errors import SolverNonConvergence
from .rates import LITERAL, PHYSICAL, GroupAssignment, PowerAllocation, fixed_allocation

logger = logging.getLogger("vlcsec.noma")

# groups up to this size also start from the best point of a coarse lattice
LATTICE_MAX_MEMBERS = 3
LATTICE_DIVISIONS = 20


@dataclass(frozen=True)
class SolverSettings:
    restarts: int = 8
    tolerance: float = 1e-9
    patience: int = 50
    max_iter: int = 10_000
    initial_step: float = 0.1
    seed: int = 0
    zeta: float = 0.6


@dataclass(frozen=True)
class GroupObjective:
    """f(beta) = sum_k 1/2 log2((a_k S_k + c_k) / (a_k T_k + c_k)).

    S_k sums the ratios from position k on, T_k those after k; a_k is the
    squared combined signal gain and c_k the inter-LED interference plus the
    noise-to-power ratio.
    """

    a: np.ndarray
    c: np.ndarray

    def value(self, beta: np.ndarray) -> float:
        return float(self.values(np.asarray(beta, dtype=float)[None, :])[0])

    def values(self, betas: np.ndarray) -> np.ndarray:
        """Objective for each row of a (points, members) array."""
        s = np.cumsum(betas[:, ::-1], axis=1)[:, ::-1]
        t = s - betas
        live = self.a > 0.0
        a, c = self.a[live], self.c[live]
        total = np.sum(np.log(a * s[:, live] + c) - np.log(a * t[:, live] + c), axis=1)
        return total / (2.0 * math.log(2.0))

    def gradient(self, beta: np.ndarray) -> np.ndarray:
        s = np.cumsum(beta[::-1])[::-1]
        t = s - beta
        live = self.a > 0.0
        u = np.where(live, self.a / np.where(live, self.a * s + self.c, 1.0), 0.0)
        w = np.where(live, self.a / np.where(live, self.a * t + self.c, 1.0), 0.0)
        # beta_j appears in S_k for k <= j and in T_k for k < j
        grad = np.cumsum(u) - (np.cumsum(w) - w)
        return grad / (2.0 * math.log(2.0))


def group_objective(
    group: Sequence[int],
    estimated_gains: np.ndarray,
    assignment: GroupAssignment,
    p_s: float,
    noise: float,
    interference_set: str = PHYSICAL,
) -> GroupObjective:
    """Coefficients of the estimated sum rate for the ordered group."""
    est = np.asarray(estimated_gains, dtype=float)
    key = frozenset(group)
    group_leds = assignment.groups().get(key, ())
    a = np.empty(len(group))
    c = np.empty(len(group))
    for i, k in enumerate(group):
        serving = assignment.serving_leds(k)
        combined = float(est[k, list(serving)].sum())
        if interference_set == PHYSICAL:
            others = assignment.interfering_leds(k)
        elif interference_set == LITERAL:
            anchor = min(group_leds) if group_leds else None
            others = tuple(n for n in serving if n != anchor)
        else:
            raise ValueError(f"unknown interference set {interference_set!r}")
        inter = float(est[k, list(others)].sum()) if others else 0.0
        a[i] = combined * combined
        c[i] = inter * inter + noise / p_s
    return GroupObjective(a, c)


def project_simplex(v: np.ndarray, z: float = 1.0) -> np.ndarray:
    """Euclidean projection onto {w >= 0, sum(w) = z}."""
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - z
    ind = np.arange(1, len(v) + 1)
    rho = np.count_nonzero(u - cssv / ind > 0)
    theta = cssv[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


def project_monotone(v: np.ndarray) -> np.ndarray:
    """Projection onto {beta_1 >= ... >= beta_n >= 0, sum(beta) <= 1}."""
    w = isotonic_regression(np.asarray(v, dtype=float), increasing=False).x
    w = np.maximum(w, 0.0)
    if w.sum() > 1.0:
        # shifting a sorted vector and clipping at zero keeps it sorted
        w = project_simplex(w)
    return w


def is_feasible(beta: Sequence[float], tol: float = 1e-9) -> bool:
    b = np.asarray(beta, dtype=float)
    return bool(
        b.sum() <= 1.0 + tol and np.all(b >= -tol) and np.all(np.diff(b) <= tol)
    )


def vertex_starts(size: int) -> np.ndarray:
    """Extreme points (1/j, ..., 1/j, 0, ..., 0) of the feasible set, one row per j."""
    j = np.arange(1, size + 1)[:, None]
    return np.where(np.arange(size)[None, :] < j, 1.0 / j, 0.0)


def lattice_start(objective: GroupObjective, divisions: int = LATTICE_DIVISIONS) -> np.ndarray:
    """Best convex combination of the vertices, weights in steps of 1/divisions."""
    size = len(objective.a)
    vertices = vertex_starts(size)
    weights = np.array(
        [w for w in itertools.product(range(divisions + 1), repeat=size) if sum(w) <= divisions],
        dtype=float,
    )
    points = weights @ vertices / divisions
    return points[int(np.argmax(objective.values(points)))]


def _ascend(
    objective: GroupObjective, start: np.ndarray, settings: SolverSettings
) -> Tuple[np.ndarray, float, bool]:
    beta = project_monotone(start)
    value = objective.value(beta)
    history = [value]
    step = settings.initial_step
    for _ in range(settings.max_iter):
        grad = objective.gradient(beta)
        norm = float(np.linalg.norm(grad))
        if norm == 0.0:
            return beta, value, True
        moved = False
        while step > 1e-14:
            candidate = project_monotone(beta + step * grad / norm)
            cand_value = objective.value(candidate)
            if cand_value > value:
                beta, value = candidate, cand_value
                step = min(1.0, 2.0 * step)
                moved = True
                break
            step *= 0.5
        history.append(value)
        if not moved:
            return beta, value, True
        if len(history) > settings.patience:
            if history[-1] - history[-1 - settings.patience] < settings.tolerance:
                return beta, value, True
    return beta, value, False


def optimize_allocation(
    group: Sequence[int],
    estimated_gains: np.ndarray,
    assignment: GroupAssignment,
    p_s: float,
    noise: float,
    interference_set: str = PHYSICAL,
    settings: Optional[SolverSettings] = None,
    strict: bool = False,
) -> PowerAllocation:
    """Maximize the group's estimated sum rate over monotone ratios with sum at most one.

    group is in SIC order. The objective is not concave; the ascent runs
    from several starts and keeps the best result:

    - the fixed-ratio split,
    - every extreme point of the feasible set,
    - for small groups, the best point of a coarse lattice over that set,
    - ``restarts - 1`` sorted Dirichlet draws.

    The allocation counts as converged only if no start hit the iteration cap.
    """
    settings = settings or SolverSettings()
    members = tuple(group)
    if not members:
        raise ValueError("cannot allocate power to an empty group")
    if len(members) == 1:
        return PowerAllocation(members, (1.0,))

    objective = group_objective(members, estimated_gains, assignment, p_s, noise,
                                interference_set)
    rng = np.random.default_rng(settings.seed)
    starts = [np.array(fixed_allocation(len(members), settings.zeta).betas)]
    starts.extend(vertex_starts(len(members)))
    if len(members) <= LATTICE_MAX_MEMBERS:
        starts.append(lattice_start(objective))
    for _ in range(max(settings.restarts - 1, 0)):
        starts.append(np.sort(rng.dirichlet(np.ones(len(members))))[::-1])

    best: Optional[Tuple[np.ndarray, float]] = None
    converged = True
    for start in starts:
        beta, value, done = _ascend(objective, start, settings)
        converged = converged and done
        if best is None or value > best[1]:
            best = (beta, value)

    beta, value = best
    allocation = PowerAllocation(members, tuple(float(b) for b in beta), converged)
    if not converged:
        logger.warning(
            "allocation for group %s hit the %d-iteration cap (objective %.6g)",
            members, settings.max_iter, value,
        )
        if strict:
            raise SolverNonConvergence(
                f"allocation for group {members} did not converge", best=allocation
            )
    logger.debug("group %s betas=%s objective=%.9g", members, allocation.betas, value)
    return allocation
