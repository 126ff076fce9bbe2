from __future__ import annotations

import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import RangeError, SchemaError

logger = logging.getLogger("vlcsec.config")

CONFIG_ENV = "VLCSEC_CONFIG"


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        raise ValueError(f"power must be positive, got {watts} W")
    return 10.0 * math.log10(watts) + 30.0


class _Block(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")


class RoomConfig(_Block):
    length: float = Field(40.0, alias="L", gt=0)
    width: float = Field(40.0, alias="W", gt=0)
    height: float = Field(3.98, alias="Z", gt=0)
    device_height: float = Field(0.85, alias="z_D", gt=0)


class LedConfig(_Block):
    lattice: Literal["triangular", "square", "explicit"] = "triangular"
    side: float = Field(9.6, alias="l", gt=0)
    # None picks (20, 20) for the triangular lattice and (0.8, 0.8) for the square one
    anchor: Optional[Tuple[float, float]] = None
    half_angle_deg: float = Field(70.0, alias="theta_half")
    optical_power_w: float = Field(0.25, alias="P_opt", gt=0)
    positions: List[Tuple[float, float]] = Field(default_factory=list)
    # per-LED power scales by reference_count / (LED count); None leaves it as given
    reference_count: Optional[int] = Field(None, ge=1)

    def resolved_anchor(self) -> Tuple[float, float]:
        if self.anchor is not None:
            return self.anchor
        return (0.8, 0.8) if self.lattice == "square" else (20.0, 20.0)


class PdConfig(_Block):
    area: float = Field(1e-4, alias="A", gt=0)
    fov_deg: float = Field(60.0, alias="Psi")
    refractive_index: float = Field(1.5, alias="eta")
    responsivity: float = Field(1.0, alias="R_PD", gt=0)


class BodyConfig(_Block):
    height: float = Field(1.6, alias="H", gt=0)
    hold_distance: float = Field(0.4, alias="l_d", ge=0)
    radius: float = Field(0.2, alias="r", gt=0)
    rectangle: Literal["aligned", "literal"] = "aligned"


class OrientationConfig(_Block):
    polar_mean_deg: float = Field(29.67, alias="lambda_mean")
    polar_std_deg: float = Field(7.78, alias="lambda_std", ge=0)


class NomaConfig(_Block):
    zeta: float = 0.6
    allocation: Literal["fixed", "optimized"] = "fixed"
    interference_set: Literal["physical", "literal"] = "physical"
    restarts: int = Field(8, ge=1)
    tolerance: float = Field(1e-9, gt=0)
    patience: int = Field(50, ge=1)
    max_iter: int = Field(10_000, ge=1)
    solver_seed: int = 0


class NoiseConfig(_Block):
    n0_dbm: float = Field(-98.35, alias="N0_dbm")

    @property
    def variance_w(self) -> float:
        return dbm_to_watts(self.n0_dbm)


class ScenarioConfig(_Block):
    users: List[Tuple[float, float]]
    eve: Optional[str] = None


def builtin_scenarios() -> Dict[str, ScenarioConfig]:
    """User coordinates of the three reference scenarios."""
    return {
        "1": ScenarioConfig(
            users=[(6, 6), (34, 6), (34, 34), (6, 34), (20, 10), (20, 30)]
        ),
        "2": ScenarioConfig(
            users=[(13, 16), (20, 12), (27, 16), (27, 24), (20, 28), (13, 24)]
        ),
        "3": ScenarioConfig(
            users=[(10.6, 14.5), (15.3, 22.7), (5.9, 22.7), (34.1, 20), (34.1, 32.2),
                   (34.1, 7.8)]
        ),
    }


class SimulationConfig(_Block):
    scenario: str = "1"
    strategy: Literal["broadcasting", "simple", "smart"] = "broadcasting"
    trials: int = Field(10_000, ge=1)
    seed: int = Field(1, ge=0, lt=2**64)
    # empty means the LED optical-power reference
    powers_dbm: List[float] = Field(default_factory=list)
    eve: str = "uniform"
    eve_box: Tuple[float, float, float, float] = (1.0, 39.0, 1.0, 39.0)
    jobs: int = 1
    strict: bool = False

    @field_validator("scenario", mode="before")
    @classmethod
    def _scenario_name(cls, value: Any) -> Any:
        return str(value) if isinstance(value, (int, float)) else value


class SuiteConfig(_Block):
    room: RoomConfig = Field(default_factory=RoomConfig)
    leds: LedConfig = Field(default_factory=LedConfig)
    pd: PdConfig = Field(default_factory=PdConfig)
    body: BodyConfig = Field(default_factory=BodyConfig)
    orientation: OrientationConfig = Field(default_factory=OrientationConfig)
    noma: NomaConfig = Field(default_factory=NomaConfig)
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    scenarios: Dict[str, ScenarioConfig] = Field(default_factory=builtin_scenarios)
    log_level: str = "info"

    @field_validator("scenarios", mode="before")
    @classmethod
    def _scenario_keys(cls, value: Any) -> Any:
        if isinstance(value, Mapping):
            return {str(k): v for k, v in value.items()}
        return value

    @field_validator("scenarios", mode="after")
    @classmethod
    def _keep_builtins(cls, value: Dict[str, ScenarioConfig]) -> Dict[str, ScenarioConfig]:
        merged = builtin_scenarios()
        merged.update(value)
        return merged

    @property
    def reference_power_dbm(self) -> float:
        return watts_to_dbm(self.leds.optical_power_w)

    def powers_dbm(self) -> List[float]:
        return list(self.simulation.powers_dbm) or [self.reference_power_dbm]

    def check_ranges(self) -> "SuiteConfig":
        """Semantic checks the schema cannot express; raises RangeError."""
        room = self.room
        if room.device_height >= room.height:
            raise RangeError(
                f"room.z_D ({room.device_height}) must be below room.Z ({room.height})"
            )
        if self.body.height <= room.device_height:
            raise RangeError(
                f"body.H ({self.body.height}) must exceed room.z_D ({room.device_height})"
            )
        if self.body.height >= room.height:
            raise RangeError(f"body.H ({self.body.height}) must be below room.Z ({room.height})")
        if not 0.0 < self.leds.half_angle_deg < 90.0:
            raise RangeError("leds.theta_half must lie in (0, 90) degrees")
        if not 0.0 < self.pd.fov_deg <= 90.0:
            raise RangeError("pd.Psi must lie in (0, 90] degrees")
        if not 1.0 < self.pd.refractive_index < 2.0:
            raise RangeError("pd.eta must lie in (1, 2)")
        if not 0.0 <= self.orientation.polar_mean_deg <= 90.0:
            raise RangeError("orientation.lambda_mean must lie in [0, 90] degrees")
        if not 0.5 < self.noma.zeta <= 1.0:
            raise RangeError(f"noma.zeta must lie in (0.5, 1], got {self.noma.zeta}")
        if self.leds.lattice == "triangular":
            bound = (
                math.sqrt(3.0)
                * (room.height - room.device_height)
                * math.tan(math.radians(self.leds.half_angle_deg))
            )
            if self.leds.side > bound:
                raise RangeError(
                    f"leds.l ({self.leds.side}) exceeds the triangular coverage bound "
                    f"{bound:.4f} m"
                )
        if self.leds.lattice == "explicit" and not self.leds.positions:
            raise RangeError("leds.positions must list at least one LED for lattice=explicit")
        for x, y in self.leds.positions:
            if not (0.0 <= x <= room.length and 0.0 <= y <= room.width):
                raise RangeError(f"LED position ({x}, {y}) lies outside the room")
        if self.simulation.scenario not in self.scenarios:
            raise RangeError(
                f"unknown scenario {self.simulation.scenario!r}; "
                f"known: {sorted(self.scenarios)}"
            )
        for name, scenario in self.scenarios.items():
            if not scenario.users:
                raise RangeError(f"scenarios.{name}.users is empty")
            for x, y in scenario.users:
                if not (0.0 <= x <= room.length and 0.0 <= y <= room.width):
                    raise RangeError(f"scenarios.{name}: user ({x}, {y}) lies outside the room")
        x0, x1, y0, y1 = self.simulation.eve_box
        if not (0.0 <= x0 <= x1 <= room.length and 0.0 <= y0 <= y1 <= room.width):
            raise RangeError(
                f"simulation.eve_box {self.simulation.eve_box} is not inside the room"
            )
        if self.simulation.trials < 1:
            raise RangeError("simulation.trials must be at least 1")
        if self.simulation.jobs == 0:
            raise RangeError("simulation.jobs must be non-zero")
        return self

    def dump(self) -> Dict[str, Any]:
        """Plain mapping that ConfigLoader.from_mapping reads back unchanged."""
        return self.model_dump(mode="json", by_alias=True)


def _field_path(loc: Tuple[Union[int, str], ...]) -> str:
    return ".".join(str(p) for p in loc)


# Environment overrides applied after the file is read.
ENV_OVERRIDES = {
    "VLCSEC_TRIALS": ("simulation", "trials", int),
    "VLCSEC_SEED": ("simulation", "seed", int),
    "VLCSEC_JOBS": ("simulation", "jobs", int),
    "VLCSEC_LOG_LEVEL": (None, "log_level", str),
}


class ConfigLoader:
    @staticmethod
    def from_mapping(data: Optional[Mapping[str, Any]]) -> SuiteConfig:
        if data is None:
            data = {}
        if not isinstance(data, Mapping):
            raise SchemaError(f"top level must be a mapping, got {type(data).__name__}")
        try:
            return SuiteConfig.model_validate(dict(data))
        except ValidationError as e:
            first = e.errors()[0]
            raise SchemaError(first["msg"], _field_path(first["loc"])) from e

    @staticmethod
    def read(path: Path) -> SuiteConfig:
        text = Path(path).read_text(encoding="utf-8")
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise SchemaError(f"not valid YAML: {e}") from e
        return ConfigLoader.from_mapping(data)

    @staticmethod
    def load(path: Optional[Path] = None) -> SuiteConfig:
        """Read the config file (argument, else $VLCSEC_CONFIG, else defaults) and apply env."""
        if path is not None:
            config = ConfigLoader.read(Path(path))
        else:
            env_config = os.environ.get(CONFIG_ENV)
            if env_config and Path(env_config).exists():
                config = ConfigLoader.read(Path(env_config))
            else:
                if env_config:
                    logger.warning("%s points to missing file %s; using defaults",
                                   CONFIG_ENV, env_config)
                config = SuiteConfig()

        for env_key, (block, field, cast) in ENV_OVERRIDES.items():
            env_val = os.environ.get(env_key)
            if not env_val:
                continue
            try:
                value = cast(env_val)
            except ValueError as e:
                raise SchemaError(f"cannot parse {env_key}={env_val!r}", env_key) from e
            if block is None:
                config = config.model_copy(update={field: value})
            else:
                section = getattr(config, block).model_copy(update={field: value})
                config = config.model_copy(update={block: section})
        return config

    @staticmethod
    def template() -> str:
        """Commented default configuration in YAML."""
        body = yaml.safe_dump(
            SuiteConfig().model_dump(mode="json", by_alias=True, exclude={"scenarios"}),
            sort_keys=False,
        )
        header = (
            "# vlcsec configuration (defaults shown).\n"
            "# Lengths in meters, angles in degrees, powers in dBm unless noted.\n"
            "# Add custom user layouts under `scenarios:`, e.g.\n"
            "#   scenarios:\n"
            "#     corner: {users: [[2, 2], [4, 4]], eve: 'fixed:10,10'}\n"
        )
        return header + body
