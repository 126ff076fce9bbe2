"""
Turn a validated SuiteConfig (degrees, dBm) into a CampaignConfig (radians, watts).
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Optional

from ..channel import LedParams, PdParams
from ..noma import SolverSettings
from ..shared.config import ConfigLoader, SuiteConfig
from ..shared.errors import LatticeConstraintViolated, RangeError
from ..topology import LatticeKind, LatticeSpec, RoomLayout, Strategy, build_leds
from .engine import BodyParams, CampaignConfig
from .scenario import EveKind, EvePlacement, Scenario


def lattice_spec(suite: SuiteConfig) -> LatticeSpec:
    leds = suite.leds
    return LatticeSpec(
        LatticeKind(leds.lattice),
        leds.side,
        leds.resolved_anchor(),
        tuple(tuple(p) for p in leds.positions),
    )


def build_room(suite: SuiteConfig) -> RoomLayout:
    room = RoomLayout(
        suite.room.length, suite.room.width, suite.room.height, suite.room.device_height
    )
    try:
        positions = build_leds(room, lattice_spec(suite), math.radians(suite.leds.half_angle_deg))
    except LatticeConstraintViolated as e:
        raise RangeError(str(e)) from e
    return room.with_leds(positions)


def build_scenario(suite: SuiteConfig, name: Optional[str] = None) -> Scenario:
    name = name or suite.simulation.scenario
    if name not in suite.scenarios:
        raise RangeError(f"unknown scenario {name!r}; known: {sorted(suite.scenarios)}")
    entry = suite.scenarios[name]
    eve_text = entry.eve or suite.simulation.eve
    try:
        eve = EvePlacement.parse(eve_text, tuple(suite.simulation.eve_box))
    except ValueError as e:
        raise RangeError(str(e)) from e
    if eve.kind is EveKind.FIXED:
        x, y = eve.point
        if not (0.0 <= x <= suite.room.length and 0.0 <= y <= suite.room.width):
            raise RangeError(f"eavesdropper point ({x:g}, {y:g}) lies outside the room")
    try:
        return Scenario(name, tuple((float(x), float(y)) for x, y in entry.users), eve)
    except ValueError as e:
        raise RangeError(str(e)) from e


def build_campaign(suite: SuiteConfig) -> CampaignConfig:
    suite.check_ranges()
    noma = suite.noma
    try:
        return CampaignConfig(
            room=build_room(suite),
            led=LedParams(
                math.radians(suite.leds.half_angle_deg),
                optical_power=suite.leds.optical_power_w,
            ),
            pd=PdParams(
                suite.pd.area,
                math.radians(suite.pd.fov_deg),
                suite.pd.refractive_index,
                suite.pd.responsivity,
            ),
            body=BodyParams(
                suite.body.height,
                suite.body.radius,
                suite.body.hold_distance,
                suite.body.rectangle,
            ),
            scenario=build_scenario(suite),
            strategy=Strategy(suite.simulation.strategy),
            allocation=noma.allocation,
            zeta=noma.zeta,
            powers_dbm=tuple(suite.powers_dbm()),
            trials=suite.simulation.trials,
            seed=suite.simulation.seed,
            noise_w=suite.noise.variance_w,
            interference_set=noma.interference_set,
            polar_mean=math.radians(suite.orientation.polar_mean_deg),
            polar_std=math.radians(suite.orientation.polar_std_deg),
            solver=SolverSettings(
                restarts=noma.restarts,
                tolerance=noma.tolerance,
                patience=noma.patience,
                max_iter=noma.max_iter,
                seed=noma.solver_seed,
                zeta=noma.zeta,
            ),
            jobs=suite.simulation.jobs,
            strict=suite.simulation.strict,
            reference_count=suite.leds.reference_count,
        )
    except ValueError as e:
        raise RangeError(str(e)) from e


def parse_config(path: Optional[Path] = None) -> CampaignConfig:
    """Load, validate and resolve a configuration file into a runnable campaign."""
    return build_campaign(ConfigLoader.load(path))
