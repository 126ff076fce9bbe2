"""
Independent cross-checks of the geometry, channel, NOMA and linking code.

Each check draws random instances from one seeded generator, evaluates the
library routine and a slower or structurally different reference, and
reports agreement metrics plus a pass flag.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ..channel import estimated_channel_gain, gain_matrix
from ..geometry import (
    ALIGNED,
    BodyCylinder,
    Plane,
    Vec3,
    is_blocked,
    line_plane_intersection,
)
from ..noma import (
    LITERAL,
    PHYSICAL,
    GroupAssignment,
    PowerAllocation,
    SolverSettings,
    eve_sinr,
    fixed_allocation,
    group_objective,
    is_feasible,
    optimize_allocation,
    user_sinr,
)
from ..shared.config import SuiteConfig, dbm_to_watts
from ..sim.engine import CampaignConfig
from ..sim.setup import build_campaign
from ..topology import covered_users, smart_link
from .unionfind import UnionFind

logger = logging.getLogger("vlcsec.oracle")

BOUNDARY_BAND = 1e-6
RESIDUAL_TOL = 1e-9
SINR_RTOL = 1e-12
ALLOC_RTOL = 0.01
AZIMUTH_RTOL = 1e-9
AZIMUTH_GRID = 3600
MAX_FAILURES = 5


@dataclass
class OracleReport:
    kind: str
    cases: int
    passed: bool
    metrics: Dict[str, float] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)

    def note(self, text: str) -> None:
        if len(self.failures) < MAX_FAILURES:
            self.failures.append(text)


def _campaign(suite: Optional[SuiteConfig]) -> CampaignConfig:
    return build_campaign(suite or SuiteConfig())


def _rel_close(a: float, b: float, rtol: float) -> bool:
    if a == b:
        return True
    if math.isinf(a) or math.isinf(b):
        return False
    return abs(a - b) <= rtol * max(abs(a), abs(b))


# -- blockage -----------------------------------------------------------------


def _blockage_cases(rng: np.random.Generator, n: int, cfg: CampaignConfig):
    room = cfg.room
    r = cfg.body.radius
    H = cfg.body.height
    U = np.column_stack([
        rng.uniform(2.0, room.length - 2.0, n),
        rng.uniform(2.0, room.width - 2.0, n),
        np.full(n, H),
    ])
    ang = rng.uniform(-math.pi, math.pi, n)
    dist = rng.uniform(r * 1.001, 3.0, n)
    D = np.column_stack([
        U[:, 0] + dist * np.cos(ang),
        U[:, 1] + dist * np.sin(ang),
        np.full(n, room.device_height),
    ])
    ang = rng.uniform(-math.pi, math.pi, n)
    reach = 10.0 * np.sqrt(rng.uniform(0.0, 1.0, n))
    S = np.column_stack([
        D[:, 0] + reach * np.cos(ang),
        D[:, 1] + reach * np.sin(ang),
        np.full(n, room.height),
    ])
    return S, D, U


def closest_approach_margin(
    S: np.ndarray, D: np.ndarray, U: np.ndarray, radius: float, height: float
) -> np.ndarray:
    """Smallest horizontal distance to the body axis over the segment part with z <= H, minus r.

    Non-positive means the segment enters the cylinder.
    """
    a = D - S
    with np.errstate(divide="ignore", invalid="ignore"):
        t_h = np.where(a[:, 2] != 0.0, (height - S[:, 2]) / a[:, 2], 0.0)
    lo = np.clip(t_h, 0.0, 1.0)
    p = S[:, :2] - U[:, :2]
    q = a[:, :2]
    qq = np.sum(q * q, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_star = np.where(qq > 0.0, -np.sum(p * q, axis=1) / qq, lo)
    t = np.clip(t_star, lo, 1.0)
    off = p + t[:, None] * q
    return np.hypot(off[:, 0], off[:, 1]) - radius


def sampled_blockage(
    S: np.ndarray,
    D: np.ndarray,
    U: np.ndarray,
    radius: float,
    height: float,
    samples: int = 10_000,
    chunk: int = 256,
) -> np.ndarray:
    """Point-in-cylinder test at evenly spaced points of each segment."""
    t = np.linspace(0.0, 1.0, samples)
    out = np.zeros(len(S), dtype=bool)
    for lo in range(0, len(S), chunk):
        s = S[lo:lo + chunk]
        a = D[lo:lo + chunk] - s
        p = s[:, :2] - U[lo:lo + chunk, :2]
        pp = np.sum(p * p, axis=1)[:, None]
        pq = np.sum(p * a[:, :2], axis=1)[:, None]
        qq = np.sum(a[:, :2] * a[:, :2], axis=1)[:, None]
        d2 = pp + t * (2.0 * pq + t * qq)
        z = s[:, 2:3] + t * a[:, 2:3]
        inside = (z <= height) & (z >= 0.0) & (d2 <= radius * radius)
        out[lo:lo + chunk] = inside.any(axis=1)
    return out


def _intersection_residuals(S: np.ndarray, D: np.ndarray, U: np.ndarray) -> float:
    """Worst normalized plane and collinearity residual of the vertical-plane intersection."""
    worst = 0.0
    for s, d, u in zip(S, D, U):
        M = Vec3.from_iter(s)
        v = Vec3.from_iter(d) - M
        a_h = v.horizontal()
        if a_h.norm() == 0.0:
            continue
        plane = Plane(Vec3.from_iter(u), a_h)
        P = line_plane_intersection(M, v, plane)
        scale = max((P - plane.point).norm(), 1.0)
        on_plane = abs(plane.residual(P)) / (a_h.norm() * scale)
        arm = P - M
        collinear = arm.cross(v).norm() / (v.norm() * max(arm.norm(), 1.0))
        worst = max(worst, on_plane, collinear)
    return worst


def check_blockage(
    n: int,
    seed: int,
    suite: Optional[SuiteConfig] = None,
    samples: int = 10_000,
    mode: Optional[str] = None,
) -> OracleReport:
    cfg = _campaign(suite)
    mode = mode or cfg.body.rectangle
    r, H = cfg.body.radius, cfg.body.height
    rng = np.random.default_rng(seed)
    S, D, U = _blockage_cases(rng, n, cfg)

    predicted = np.array([
        is_blocked(
            Vec3.from_iter(s), Vec3.from_iter(d), BodyCylinder(Vec3.from_iter(u), r, H), mode
        )
        for s, d, u in zip(S, D, U)
    ])
    margin = closest_approach_margin(S, D, U, r, H)
    sampled = sampled_blockage(S, D, U, r, H, samples)
    clear = np.abs(margin) > BOUNDARY_BAND
    truth = margin <= 0.0

    analytic_ok = predicted[clear] == truth[clear]
    sampled_ok = predicted[clear] == sampled[clear]
    analytic_rate = float(analytic_ok.mean()) if clear.any() else 1.0
    sampled_rate = float(sampled_ok.mean()) if clear.any() else 1.0
    residual = _intersection_residuals(S[:min(n, 10_000)], D[:min(n, 10_000)], U[:min(n, 10_000)])

    report = OracleReport(
        "blockage",
        n,
        passed=analytic_rate == 1.0 and sampled_rate >= 0.999 and residual <= RESIDUAL_TOL,
        metrics={
            "rectangle_aligned": float(mode == ALIGNED),
            "blocked_fraction": float(truth.mean()),
            "outside_band": int(clear.sum()),
            "agreement_margin": analytic_rate,
            "agreement_sampling": sampled_rate,
            "worst_missed_margin": float(-margin[clear & truth & ~predicted].min(initial=0.0)),
            "worst_false_margin": float(margin[clear & ~truth & predicted].max(initial=0.0)),
            "intersection_residual": residual,
        },
    )
    for i in np.flatnonzero(clear & (predicted != truth)):
        report.note(
            f"S={S[i].tolist()} D={D[i].tolist()} U={U[i].tolist()} "
            f"margin={margin[i]:.3g} predicted={bool(predicted[i])}"
        )
    return report


# -- SINR transcription -------------------------------------------------------


def reference_sinr(
    k: int,
    row: Sequence[float],
    sets: Sequence[frozenset],
    orders: Dict[frozenset, Sequence[int]],
    betas: Dict[frozenset, Sequence[float]],
    p_s: float,
    noise: float,
    interference_set: str,
) -> float:
    """Straight-line evaluation over LEDs, for comparison with user_sinr."""
    own = [n for n in range(len(sets)) if k in sets[n]]
    if not own:
        return 0.0
    g = 0.0
    for n in own:
        g += row[n]
    best, n_star, residual = -1.0, own[0], 0.0
    for n in own:
        order = list(orders[sets[n]])
        share = betas[sets[n]]
        pos = order.index(k)
        signal = g * g * share[pos]
        if signal > best:
            best, n_star = signal, n
        tail = 0.0
        for j in range(pos + 1, len(order)):
            tail += share[j]
        residual = max(residual, g * g * tail)
    if interference_set == PHYSICAL:
        others = [n for n in range(len(sets)) if sets[n] and k not in sets[n]]
    else:
        others = [n for n in own if n != n_star]
    inter = 0.0
    for n in others:
        inter += row[n]
    denom = residual + inter * inter + noise / p_s
    if denom <= 0.0:
        return math.inf if best > 0.0 else 0.0
    return best / denom


def _random_instance(rng: np.random.Generator):
    num_leds = int(rng.integers(1, 4))
    num_users = int(rng.integers(1, 4))
    sets = [
        frozenset(k for k in range(num_users) if rng.random() < 0.6) for _ in range(num_leds)
    ]
    orders, betas = {}, {}
    for s in set(sets):
        if not s:
            continue
        orders[s] = tuple(int(k) for k in rng.permutation(sorted(s)))
        share = np.sort(rng.dirichlet(np.ones(len(s))))[::-1] * rng.uniform(0.5, 1.0)
        betas[s] = tuple(float(b) for b in share)
    gains = rng.uniform(0.0, 1e-5, (num_users + 1, num_leds))
    gains[rng.random(gains.shape) < 0.2] = 0.0
    p_s = 10.0 ** rng.uniform(-2.0, 0.5)
    return sets, orders, betas, gains, p_s


def check_sinr(n: int, seed: int, suite: Optional[SuiteConfig] = None) -> OracleReport:
    noise = (suite or SuiteConfig()).noise.variance_w
    rng = np.random.default_rng(seed)
    worst = 0.0
    compared = 0
    report = OracleReport("sinr", n, passed=True)
    for case in range(n):
        sets, orders, betas, gains, p_s = _random_instance(rng)
        num_users = gains.shape[0] - 1
        assignment = GroupAssignment(tuple(sets), num_users, orders)
        alloc = {s: PowerAllocation(orders[s], betas[s]) for s in orders}
        for mode in (PHYSICAL, LITERAL):
            for k in range(num_users):
                pairs = (
                    (user_sinr(k, assignment, gains, alloc, p_s, noise, mode), gains[k]),
                    (eve_sinr(k, assignment, gains[num_users], alloc, p_s, noise, mode),
                     gains[num_users]),
                )
                for got, row in pairs:
                    want = reference_sinr(k, row, sets, orders, betas, p_s, noise, mode)
                    compared += 1
                    if not _rel_close(got, want, SINR_RTOL):
                        report.passed = False
                        report.note(f"case {case} user {k} {mode}: {got!r} != {want!r}")
                    elif want not in (0.0, math.inf):
                        worst = max(worst, abs(got - want) / abs(want))
    report.metrics = {"comparisons": compared, "max_relative_error": worst}
    return report


# -- power allocation ---------------------------------------------------------


def grid_allocations(size: int, step: float = 0.01) -> np.ndarray:
    """Every nonincreasing, nonnegative ratio vector on the step grid with sum at most one."""
    units = int(round(1.0 / step))
    rows = [
        combo
        for combo in itertools.combinations_with_replacement(range(units, -1, -1), size)
        if sum(combo) <= units
    ]
    return np.array(rows, dtype=float) * step


def _batch_value(a: np.ndarray, c: np.ndarray, betas: np.ndarray) -> np.ndarray:
    s = np.cumsum(betas[:, ::-1], axis=1)[:, ::-1]
    t = s - betas
    live = a > 0.0
    ratio = (a[live] * s[:, live] + c[live]) / (a[live] * t[:, live] + c[live])
    return 0.5 * np.sum(np.log2(ratio), axis=1)


def _allocation_instance(rng: np.random.Generator, size: int):
    group_leds = int(rng.integers(1, 3))
    foreign_leds = int(rng.integers(0, 2))
    # user `size` sits outside the group and is served only by foreign LEDs
    sets = [frozenset(range(size))] * group_leds + [frozenset({size})] * foreign_leds
    assignment = GroupAssignment.from_sets(sets, size + 1)
    est = 10.0 ** rng.uniform(-7.0, -5.0, (size + 1, len(sets)))
    assignment = assignment.with_sic_orders(est)
    return assignment, est, dbm_to_watts(float(rng.uniform(0.0, 30.0)))


def check_alloc(n: int, seed: int, suite: Optional[SuiteConfig] = None) -> OracleReport:
    suite = suite or SuiteConfig()
    noise = suite.noise.variance_w
    rng = np.random.default_rng(seed)
    grids = {size: grid_allocations(size) for size in (2, 3)}
    report = OracleReport("alloc", n, passed=True)
    worst_gap = -math.inf
    infeasible = 0

    for case in range(n):
        size = int(rng.integers(2, 4))
        mode = PHYSICAL if rng.random() < 0.5 else LITERAL
        assignment, est, p_s = _allocation_instance(rng, size)
        order = assignment.order_of(frozenset(range(size)))
        settings = SolverSettings(seed=int(rng.integers(0, 2**31)), zeta=suite.noma.zeta)
        alloc = optimize_allocation(order, est, assignment, p_s, noise, mode, settings)
        objective = group_objective(order, est, assignment, p_s, noise, mode)
        got = objective.value(np.array(alloc.betas))
        best = float(_batch_value(objective.a, objective.c, grids[size]).max())
        gap = (best - got) / abs(best) if best else 0.0
        worst_gap = max(worst_gap, gap)
        if not is_feasible(alloc.betas, RESIDUAL_TOL):
            infeasible += 1
            report.passed = False
            report.note(f"case {case}: infeasible ratios {alloc.betas}")
        if gap > ALLOC_RTOL:
            report.passed = False
            report.note(f"case {case}: objective {got:.6g} vs grid {best:.6g} ({mode})")

    fixed_worst = 0.0
    for _ in range(n):
        zeta = float(rng.uniform(0.5, 1.0))
        if zeta <= 0.5:
            continue
        size = int(rng.integers(1, 7))
        betas = fixed_allocation(size, zeta).betas
        fixed_worst = max(fixed_worst, abs(math.fsum(betas) - 1.0))
        if any(b <= nxt for b, nxt in zip(betas, betas[1:])):
            report.passed = False
            report.note(f"fixed zeta={zeta} size={size} not strictly decreasing: {betas}")
    if fixed_worst > 1e-12:
        report.passed = False

    report.metrics = {
        "worst_relative_gap": worst_gap,
        "infeasible": infeasible,
        "fixed_sum_error": fixed_worst,
    }
    return report


# -- azimuth ------------------------------------------------------------------


def check_azimuth(n: int, seed: int, suite: Optional[SuiteConfig] = None) -> OracleReport:
    cfg = _campaign(suite)
    room = cfg.room
    rng = np.random.default_rng(seed)
    omegas = 2.0 * math.pi * np.arange(AZIMUTH_GRID) / AZIMUTH_GRID
    omegas = np.where(omegas >= math.pi, omegas - 2.0 * math.pi, omegas)
    angles = np.column_stack([omegas, np.full(AZIMUTH_GRID, cfg.polar_mean)])
    no_bodies = np.empty((0, 3))

    report = OracleReport("azimuth", n, passed=True)
    worst_excess = 0.0
    worst_shortfall = 0.0
    dark = 0
    for case in range(n):
        S = Vec3(float(rng.uniform(0.0, room.length)), float(rng.uniform(0.0, room.width)),
                 room.height)
        D = Vec3(float(rng.uniform(0.0, room.length)), float(rng.uniform(0.0, room.width)),
                 room.device_height)
        closed = estimated_channel_gain(S, D, cfg.led, cfg.pd, cfg.polar_mean)
        devices = np.repeat(D.as_array()[None, :], AZIMUTH_GRID, axis=0)
        grid, _ = gain_matrix(
            S.as_array(), devices, angles, no_bodies, cfg.led, cfg.pd,
            cfg.body.radius, cfg.body.height,
        )
        best = float(grid.max())
        if closed == 0.0:
            dark += 1
            if best > 0.0:
                report.passed = False
                report.note(f"case {case}: closed form is dark but the grid reaches {best:.3g}")
            continue
        excess = (best - closed) / closed
        worst_excess = max(worst_excess, excess)
        worst_shortfall = max(worst_shortfall, -excess)
        if excess > AZIMUTH_RTOL:
            report.passed = False
            report.note(f"case {case}: grid {best!r} beats closed form {closed!r}")
    report.metrics = {
        "worst_grid_excess": worst_excess,
        "worst_grid_shortfall": worst_shortfall,
        "dark_pairs": dark,
    }
    return report


# -- smart linking ------------------------------------------------------------


def union_find_clusters(leds, users, r_area: float) -> List[set]:
    """Per-LED user sets after merging LEDs that share a covered user."""
    coverage = [covered_users(led, users, r_area) for led in leds]
    uf = UnionFind()
    owner: Dict[int, int] = {}
    for n, covered in enumerate(coverage):
        if not covered:
            continue
        uf.find(n)
        for k in covered:
            if k in owner:
                uf.union(owner[k], n)
            else:
                owner[k] = n
    merged: Dict[int, set] = {}
    for root, members in uf.components().items():
        merged[root] = set().union(*(coverage[m] for m in members))
    return [merged[uf.find(n)] if coverage[n] else set() for n in range(len(leds))]


def check_linking(n: int, seed: int, suite: Optional[SuiteConfig] = None) -> OracleReport:
    cfg = _campaign(suite)
    room = cfg.room
    rng = np.random.default_rng(seed)
    report = OracleReport("linking", n, passed=True)
    mismatched = 0
    for case in range(n):
        num_leds = int(rng.integers(1, 26))
        num_users = int(rng.integers(1, 11))
        leds = [
            Vec3(float(rng.uniform(0, room.length)), float(rng.uniform(0, room.width)),
                 room.height)
            for _ in range(num_leds)
        ]
        users = [
            (float(rng.uniform(0, room.length)), float(rng.uniform(0, room.width)))
            for _ in range(num_users)
        ]
        r_area = float(rng.uniform(2.0, 12.0))
        got = smart_link(leds, users, r_area)
        want = union_find_clusters(leds, users, r_area)

        distinct = {frozenset(s) for s in got if s}
        served = set().union(*distinct) if distinct else set()
        partitioned = sum(len(s) for s in distinct) == len(served)
        if got != want or not partitioned:
            mismatched += 1
            report.passed = False
            report.note(f"case {case}: smart_link={got} union_find={want}")
    report.metrics = {"mismatched": mismatched}
    return report


ORACLES: Dict[str, Callable[..., OracleReport]] = {
    "blockage": check_blockage,
    "sinr": check_sinr,
    "alloc": check_alloc,
    "azimuth": check_azimuth,
    "linking": check_linking,
}


def run_oracle(kind: str, n: int, seed: int, **options) -> OracleReport:
    if kind not in ORACLES:
        raise ValueError(f"unknown oracle {kind!r}; choose from {sorted(ORACLES)}")
    if n < 1:
        raise ValueError(f"oracle needs at least one case, got {n}")
    logger.info("running %s oracle on %d cases (seed %d)", kind, n, seed)
    report = ORACLES[kind](n, seed, **options)
    log = logger.info if report.passed else logger.error
    log("%s oracle %s: %s", kind, "passed" if report.passed else "FAILED", report.metrics)
    return report
