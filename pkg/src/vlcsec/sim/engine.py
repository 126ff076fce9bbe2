"""
Single Monte Carlo trial: sample orientations and the eavesdropper, build the
gain matrix with body blockage, and evaluate rates and secrecy terms.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..channel import (
    POLAR_MEAN,
    POLAR_STD,
    LedParams,
    PdParams,
    estimated_gain_matrix,
    gain_matrix,
    sample_orientation,
)
from ..geometry import ALIGNED, Vec3, body_top_center
from ..noma import (
    PHYSICAL,
    GroupAssignment,
    PowerAllocation,
    SolverSettings,
    UserSet,
    eve_sinr,
    fixed_allocation,
    optimize_allocation,
    rate,
    secrecy_terms,
    user_sinr,
)
from ..shared.config import dbm_to_watts
from ..topology import RoomLayout, Strategy, assign_groups, coverage_radius
from .scenario import EveKind, Scenario

logger = logging.getLogger("vlcsec.sim")

FIXED = "fixed"
OPTIMIZED = "optimized"


@dataclass(frozen=True)
class BodyParams:
    height: float = 1.6
    radius: float = 0.2
    hold_distance: float = 0.4
    rectangle: str = ALIGNED


@dataclass(frozen=True)
class CampaignConfig:
    """Everything one campaign needs, in SI units and radians."""

    room: RoomLayout
    led: LedParams
    pd: PdParams
    body: BodyParams
    scenario: Scenario
    strategy: Strategy = Strategy.BROADCASTING
    allocation: str = FIXED
    zeta: float = 0.6
    powers_dbm: Tuple[float, ...] = (10.0 * math.log10(250.0),)
    trials: int = 10_000
    seed: int = 1
    noise_w: float = dbm_to_watts(-98.35)
    interference_set: str = PHYSICAL
    polar_mean: float = POLAR_MEAN
    polar_std: float = POLAR_STD
    solver: SolverSettings = field(default_factory=SolverSettings)
    jobs: int = 1
    strict: bool = False
    reference_count: Optional[int] = None

    @property
    def led_power_scale(self) -> float:
        """Factor that holds the total transmit power at reference_count LEDs."""
        if self.reference_count is None:
            return 1.0
        return self.reference_count / len(self.room.led_positions)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.allocation not in (FIXED, OPTIMIZED):
            raise ValueError(f"unknown allocation scheme {self.allocation!r}")
        if not self.powers_dbm:
            raise ValueError("at least one transmit power is required")
        if not self.room.led_positions:
            raise ValueError("room has no LEDs")


@dataclass(frozen=True)
class Deployment:
    """Trial-invariant state for one (scenario, strategy, transmit power) point."""

    power_dbm: float
    p_s: float
    leds: np.ndarray
    users: np.ndarray
    r_area: float
    assignment: GroupAssignment
    estimated: np.ndarray
    allocations: Dict[UserSet, PowerAllocation]

    @property
    def flagged(self) -> int:
        return sum(1 for a in self.allocations.values() if not a.converged)


@dataclass(frozen=True)
class TrialResult:
    index: int
    rates: Tuple[float, ...]
    wiretap: Tuple[float, ...]
    secrecy: Tuple[float, ...]
    blocked_links: int
    links: int
    eve_xy: Tuple[float, float]

    @property
    def sum_rate(self) -> float:
        return float(math.fsum(self.rates))

    @property
    def secrecy_sum(self) -> float:
        return float(math.fsum(self.secrecy))

    @property
    def clipped(self) -> int:
        return sum(1 for r, re in zip(self.rates, self.wiretap) if re > r)


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    """Stream of one trial; depends only on the master seed and the trial index."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def prepare(cfg: CampaignConfig, power_dbm: Optional[float] = None) -> Deployment:
    """Group assignment, SIC orders and power allocations for one transmit power."""
    power_dbm = cfg.powers_dbm[0] if power_dbm is None else power_dbm
    p_s = dbm_to_watts(power_dbm) * cfg.led_power_scale
    room = cfg.room
    leds = room.led_array()
    users = np.array([[x, y, room.device_height] for x, y in cfg.scenario.users], dtype=float)
    r_area = coverage_radius(room.height, room.device_height, cfg.led.half_angle)

    assignment = assign_groups(cfg.strategy, list(room.led_positions), cfg.scenario.users, r_area)
    estimated = estimated_gain_matrix(leds, users, cfg.led, cfg.pd, cfg.polar_mean)
    assignment = assignment.with_sic_orders(estimated)

    cache: Dict[Tuple[int, ...], PowerAllocation] = {}
    allocations: Dict[UserSet, PowerAllocation] = {}
    for group in assignment.groups():
        order = assignment.order_of(group)
        if order not in cache:
            if cfg.allocation == FIXED:
                cache[order] = fixed_allocation(len(order), cfg.zeta, order)
            else:
                cache[order] = optimize_allocation(
                    order,
                    estimated,
                    assignment,
                    p_s,
                    cfg.noise_w,
                    cfg.interference_set,
                    cfg.solver,
                    strict=cfg.strict,
                )
        allocations[group] = cache[order]
    logger.debug(
        "%s linking: %d groups, unserved=%s, P_s=%.4g W",
        Strategy(cfg.strategy).value, len(allocations), list(assignment.unserved()), p_s,
    )
    return Deployment(power_dbm, p_s, leds, users, r_area, assignment, estimated, allocations)


def _eve_position(cfg: CampaignConfig, rng: np.random.Generator) -> Tuple[float, float]:
    eve = cfg.scenario.eve
    if eve.kind is EveKind.FIXED:
        return eve.point
    if eve.kind is EveKind.UNIFORM:
        x0, x1, y0, y1 = eve.box
        return float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1))
    if eve.kind is EveKind.CLONE:
        return cfg.scenario.users[eve.target]
    raise ValueError("grid placements must be expanded into fixed points before running")


def run_trial(
    cfg: CampaignConfig, deployment: Deployment, rng: np.random.Generator, index: int = 0
) -> TrialResult:
    """One realization: eavesdropper position, then user orientations, then the eavesdropper's."""
    room = cfg.room
    num_users = cfg.scenario.num_users
    eve_xy = _eve_position(cfg, rng)

    orientations = [
        sample_orientation(rng, cfg.polar_mean, cfg.polar_std) for _ in range(num_users + 1)
    ]
    if cfg.scenario.eve.kind is EveKind.CLONE:
        orientations[num_users] = orientations[cfg.scenario.eve.target]

    devices = np.vstack([deployment.users, [[eve_xy[0], eve_xy[1], room.device_height]]])
    angles = np.array([[o.azimuth, o.polar] for o in orientations], dtype=float)
    tops = np.array(
        [
            body_top_center(
                Vec3.from_iter(d), o.azimuth, cfg.body.hold_distance, cfg.body.height
            ).as_array()
            for d, o in zip(devices, orientations)
        ]
    )
    gains, blocked = gain_matrix(
        deployment.leds,
        devices,
        angles,
        tops,
        cfg.led,
        cfg.pd,
        cfg.body.radius,
        cfg.body.height,
        cfg.body.rectangle,
    )

    assignment = deployment.assignment
    rates = []
    wiretap = []
    for k in range(num_users):
        rates.append(rate(user_sinr(
            k, assignment, gains, deployment.allocations, deployment.p_s, cfg.noise_w,
            cfg.interference_set,
        )))
        wiretap.append(rate(eve_sinr(
            k, assignment, gains[num_users], deployment.allocations, deployment.p_s,
            cfg.noise_w, cfg.interference_set,
        )))
    report = secrecy_terms(rates, wiretap)
    return TrialResult(
        index,
        report.rates,
        report.wiretap,
        report.secrecy,
        int(blocked.sum()),
        int(blocked.size),
        (float(eve_xy[0]), float(eve_xy[1])),
    )
