"""
User layouts and eavesdropper placement rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

Box = Tuple[float, float, float, float]

DEFAULT_EVE_BOX: Box = (1.0, 39.0, 1.0, 39.0)


class EveKind(str, Enum):
    FIXED = "fixed"
    UNIFORM = "uniform"
    GRID = "grid"
    CLONE = "clone"


@dataclass(frozen=True)
class EvePlacement:
    """Where the eavesdropper stands in each trial.

    fixed:x,y    the same point every trial
    uniform      a fresh uniform draw inside box every trial
    grid:step    one fixed point per grid node (expanded by the sweep)
    clone:k      user k's position and orientation
    """

    kind: EveKind
    point: Optional[Tuple[float, float]] = None
    box: Box = DEFAULT_EVE_BOX
    step: float = 0.0
    target: int = 0

    @classmethod
    def parse(cls, text: str, box: Box = DEFAULT_EVE_BOX) -> "EvePlacement":
        head, _, arg = text.strip().partition(":")
        try:
            kind = EveKind(head.lower())
        except ValueError:
            raise ValueError(
                f"unknown eavesdropper placement {text!r}; "
                "expected fixed:x,y | uniform | grid:step | clone:k"
            ) from None
        if kind is EveKind.FIXED:
            parts = arg.split(",")
            if len(parts) != 2:
                raise ValueError(f"fixed placement needs 'fixed:x,y', got {text!r}")
            return cls(kind, point=(float(parts[0]), float(parts[1])), box=box)
        if kind is EveKind.GRID:
            step = float(arg) if arg else 0.0
            if step <= 0:
                raise ValueError(f"grid placement needs a positive step, got {text!r}")
            return cls(kind, box=box, step=step)
        if kind is EveKind.CLONE:
            if not arg.strip().isdigit():
                raise ValueError(f"clone placement needs a user index, got {text!r}")
            return cls(kind, box=box, target=int(arg))
        if arg:
            raise ValueError(f"uniform placement takes no argument, got {text!r}")
        return cls(kind, box=box)

    def grid_nodes(self) -> List[Tuple[float, float]]:
        """Nodes of the grid placement, row by row (y outer, x inner)."""
        if self.kind is not EveKind.GRID:
            return []
        x0, x1, y0, y1 = self.box
        xs = x0 + self.step * np.arange(int(math.floor((x1 - x0) / self.step + 1e-9)) + 1)
        ys = y0 + self.step * np.arange(int(math.floor((y1 - y0) / self.step + 1e-9)) + 1)
        return [(float(x), float(y)) for y in ys for x in xs]

    def expand(self) -> List["EvePlacement"]:
        """Grid placements become one fixed placement per node; others stay as they are."""
        if self.kind is EveKind.GRID:
            return [replace(self, kind=EveKind.FIXED, point=node) for node in self.grid_nodes()]
        return [self]

    def describe(self) -> str:
        if self.kind is EveKind.FIXED:
            return f"fixed:{self.point[0]:g},{self.point[1]:g}"
        if self.kind is EveKind.GRID:
            return f"grid:{self.step:g}"
        if self.kind is EveKind.CLONE:
            return f"clone:{self.target}"
        return "uniform"


@dataclass(frozen=True)
class Scenario:
    name: str
    users: Tuple[Tuple[float, float], ...]
    eve: EvePlacement = EvePlacement(EveKind.UNIFORM)

    def __post_init__(self):
        if not self.users:
            raise ValueError(f"scenario {self.name!r} has no users")
        if self.eve.kind is EveKind.CLONE and not 0 <= self.eve.target < len(self.users):
            raise ValueError(
                f"clone target {self.eve.target} is not a user of scenario {self.name!r}"
            )

    @property
    def num_users(self) -> int:
        return len(self.users)
