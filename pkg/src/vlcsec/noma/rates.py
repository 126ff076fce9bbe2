"""
NOMA rate engine: fixed power allocation, SIC ordering, user and eavesdropper
SINR, achievable rates and secrecy terms.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..shared.errors import InvalidZeta

logger = logging.getLogger("vlcsec.noma")

PHYSICAL = "physical"
LITERAL = "literal"
INTERFERENCE_SETS = (PHYSICAL, LITERAL)

UserSet = FrozenSet[int]


@dataclass(frozen=True)
class PowerAllocation:
    """Power split inside one NOMA group; group[0] gets the most power and is decoded first."""

    group: Tuple[int, ...]
    betas: Tuple[float, ...]
    converged: bool = True

    def __post_init__(self):
        if len(self.group) != len(self.betas):
            raise ValueError(
                f"group has {len(self.group)} users but {len(self.betas)} power ratios"
            )
        if len(set(self.group)) != len(self.group):
            raise ValueError(f"duplicate user in group {self.group}")

    def beta_of(self, k: int) -> float:
        return self.betas[self.group.index(k)]

    def tail_of(self, k: int) -> float:
        """Sum of the ratios of users decoded after k (residual NOMA interference)."""
        i = self.group.index(k)
        return float(math.fsum(self.betas[i + 1:]))

    @property
    def total(self) -> float:
        return float(math.fsum(self.betas))


@dataclass(frozen=True)
class GroupAssignment:
    """Per-LED serving sets plus the SIC order of every distinct group.

    A group is identified by its user set; LEDs with identical sets carry the
    same superposed signal.
    """

    serving: Tuple[UserSet, ...]
    num_users: int
    orders: Mapping[UserSet, Tuple[int, ...]] = field(default_factory=dict, compare=False)

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[int]], num_users: int) -> "GroupAssignment":
        serving = tuple(frozenset(int(k) for k in s) for s in sets)
        for s in serving:
            bad = [k for k in s if not 0 <= k < num_users]
            if bad:
                raise ValueError(f"users {bad} outside 0..{num_users - 1}")
        return cls(serving, num_users)

    @property
    def num_leds(self) -> int:
        return len(self.serving)

    def groups(self) -> Dict[UserSet, Tuple[int, ...]]:
        """Distinct non-empty user sets mapped to the LEDs transmitting them."""
        out: Dict[UserSet, List[int]] = {}
        for n, s in enumerate(self.serving):
            if s:
                out.setdefault(s, []).append(n)
        return {s: tuple(leds) for s, leds in out.items()}

    def serving_leds(self, k: int) -> Tuple[int, ...]:
        """I_k: LEDs whose serving set contains k."""
        return tuple(n for n, s in enumerate(self.serving) if k in s)

    def groups_of(self, k: int) -> List[UserSet]:
        """P_k: distinct groups containing k, in order of first serving LED."""
        seen: List[UserSet] = []
        for s in self.serving:
            if k in s and s not in seen:
                seen.append(s)
        return seen

    def interfering_leds(self, k: int) -> Tuple[int, ...]:
        """LEDs that transmit a non-empty signal not intended for k."""
        return tuple(n for n, s in enumerate(self.serving) if s and k not in s)

    def unserved(self) -> Tuple[int, ...]:
        served = set().union(*self.serving) if self.serving else set()
        return tuple(k for k in range(self.num_users) if k not in served)

    def order_of(self, group: UserSet) -> Tuple[int, ...]:
        if group in self.orders:
            return self.orders[group]
        return tuple(sorted(group))

    def with_sic_orders(self, estimated_gains: np.ndarray) -> "GroupAssignment":
        """Attach SIC orders computed from estimated gains (users x LEDs)."""
        est = np.asarray(estimated_gains, dtype=float)
        orders = {}
        for group, leds in self.groups().items():
            combined = {k: float(est[k, list(leds)].sum()) for k in group}
            orders[group] = tuple(sic_order(group, combined))
        return GroupAssignment(self.serving, self.num_users, orders)


@dataclass(frozen=True)
class RateReport:
    rates: Tuple[float, ...]
    wiretap: Tuple[float, ...]
    secrecy: Tuple[float, ...]

    @property
    def sum_rate(self) -> float:
        return float(math.fsum(self.rates))

    @property
    def secrecy_sum(self) -> float:
        return float(math.fsum(self.secrecy))

    @property
    def clipped(self) -> int:
        """Users whose wiretap rate exceeds their own rate."""
        return sum(1 for r, re in zip(self.rates, self.wiretap) if re > r)


def fixed_allocation(
    group_size: int, zeta: float, group: Optional[Sequence[int]] = None
) -> PowerAllocation:
    """beta_k = zeta (1 - zeta)^(k-1), with the last user taking the remainder."""
    if group_size < 1:
        raise ValueError(f"group size must be at least 1, got {group_size}")
    if not 0.5 < zeta <= 1.0:
        raise InvalidZeta(f"zeta must lie in (0.5, 1], got {zeta}")
    betas = [zeta * (1.0 - zeta) ** i for i in range(group_size - 1)]
    betas.append((1.0 - zeta) ** (group_size - 1))
    members = tuple(range(group_size)) if group is None else tuple(group)
    return PowerAllocation(members, tuple(betas))


def sic_order(group: Iterable[int], estimated_gains: Mapping[int, float]) -> List[int]:
    """Weakest estimated channel first; ties by user index."""
    return sorted(group, key=lambda k: (estimated_gains[k], k))


def _sinr(
    k: int,
    row: np.ndarray,
    assignment: GroupAssignment,
    alloc: Mapping[UserSet, PowerAllocation],
    p_s: float,
    noise: float,
    interference_set: str,
) -> float:
    groups = assignment.groups_of(k)
    if not groups:
        return 0.0
    serving = assignment.serving_leds(k)
    combined = float(row[list(serving)].sum())
    g2 = combined * combined

    numerator = -1.0
    best_led = serving[0]
    for group in groups:
        value = g2 * alloc[group].beta_of(k)
        if value > numerator:
            numerator = value
            best_led = min(n for n in serving if assignment.serving[n] == group)
    residual = max(g2 * alloc[group].tail_of(k) for group in groups)

    if interference_set == PHYSICAL:
        others = assignment.interfering_leds(k)
    elif interference_set == LITERAL:
        others = tuple(n for n in serving if n != best_led)
    else:
        raise ValueError(f"unknown interference set {interference_set!r}")
    inter = float(row[list(others)].sum()) if others else 0.0

    denominator = residual + inter * inter + noise / p_s
    if denominator <= 0.0:
        return math.inf if numerator > 0.0 else 0.0
    return numerator / denominator


def user_sinr(
    k: int,
    assignment: GroupAssignment,
    gains: np.ndarray,
    alloc: Mapping[UserSet, PowerAllocation],
    p_s: float,
    noise: float,
    interference_set: str = PHYSICAL,
) -> float:
    """SINR of user k; gains is the (receivers x LEDs) matrix, row k belongs to user k."""
    return _sinr(k, np.asarray(gains, dtype=float)[k], assignment, alloc, p_s, noise,
                 interference_set)


def eve_sinr(
    k: int,
    assignment: GroupAssignment,
    eve_gains: np.ndarray,
    alloc: Mapping[UserSet, PowerAllocation],
    p_s: float,
    noise: float,
    interference_set: str = PHYSICAL,
) -> float:
    """Eavesdropper SINR when decoding user k's signal, using k's groups and ratios."""
    return _sinr(k, np.asarray(eve_gains, dtype=float).reshape(-1), assignment, alloc, p_s,
                 noise, interference_set)


def rate(gamma: float) -> float:
    """Achievable rate in bits/s/Hz; the 1/2 accounts for Hermitian symmetry."""
    if gamma < 0:
        raise ValueError(f"SINR must be nonnegative, got {gamma}")
    return 0.5 * math.log2(1.0 + gamma)


def secrecy_terms(rates: Sequence[float], wiretap: Sequence[float]) -> RateReport:
    if len(rates) != len(wiretap):
        raise ValueError("rates and wiretap rates differ in length")
    secrecy = tuple(max(r - re, 0.0) for r, re in zip(rates, wiretap))
    return RateReport(tuple(float(r) for r in rates), tuple(float(r) for r in wiretap), secrecy)
