"""
LED-to-user linking strategies: broadcasting, simple linking and smart linking.
"""

from __future__ import annotations

import logging
from enum import Enum
from typing import List, Sequence, Set, Tuple, Union

from ..geometry import Vec3
from ..noma.rates import GroupAssignment

logger = logging.getLogger("vlcsec.topology")

Point = Union[Vec3, Tuple[float, float]]


class Strategy(str, Enum):
    BROADCASTING = "broadcasting"
    SIMPLE = "simple"
    SMART = "smart"


def _xy(p: Point) -> Tuple[float, float]:
    if isinstance(p, Vec3):
        return p.x, p.y
    return float(p[0]), float(p[1])


def covered_users(led: Point, users: Sequence[Point], r_area: float) -> Set[int]:
    """Users inside the LED's coverage disk on the device plane (boundary included)."""
    sx, sy = _xy(led)
    r2 = r_area * r_area
    out = set()
    for k, u in enumerate(users):
        ux, uy = _xy(u)
        if (ux - sx) ** 2 + (uy - sy) ** 2 <= r2:
            out.add(k)
    return out


def smart_link(leds: Sequence[Point], users: Sequence[Point], r_area: float) -> List[Set[int]]:
    """Merge LEDs whose coverage shares a user; every merged LED carries the union.

    Walks the LEDs in order. Each new LED absorbs the sets of earlier LEDs that
    share a user with its (growing) set, then those earlier LEDs are overwritten
    with the merged set.
    """
    merged: List[Set[int]] = []
    for n, led in enumerate(leds):
        current = covered_users(led, users, r_area)
        touched = []
        for m in range(n):
            if merged[m] & current:
                touched.append(m)
                current = merged[m] | current
        for m in touched:
            merged[m] = set(current)
        merged.append(set(current))
    return merged


def assign_groups(
    strategy: Strategy, leds: Sequence[Point], users: Sequence[Point], r_area: float
) -> GroupAssignment:
    strategy = Strategy(strategy)
    if strategy is Strategy.BROADCASTING:
        sets = [set(range(len(users))) for _ in leds]
    elif strategy is Strategy.SIMPLE:
        sets = [covered_users(led, users, r_area) for led in leds]
    else:
        sets = smart_link(leds, users, r_area)
    assignment = GroupAssignment.from_sets(sets, len(users))
    unserved = assignment.unserved()
    if unserved:
        logger.info("%s linking leaves users %s unserved", strategy.value, list(unserved))
    return assignment
