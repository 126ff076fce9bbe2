"""
Campaign orchestration: run trials (optionally in parallel), aggregate means and
standard errors, and sweep over transmit powers and eavesdropper grids.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from ..topology import Strategy
from .engine import (
    OPTIMIZED,
    CampaignConfig,
    Deployment,
    TrialResult,
    prepare,
    run_trial,
    trial_rng,
)
from .scenario import EveKind, EvePlacement

logger = logging.getLogger("vlcsec.sim")

Z95 = 1.959963984540054


@dataclass(frozen=True)
class Diagnostics:
    unserved_users: int = 0
    clipped_secrecy: int = 0
    flagged_allocations: int = 0
    blockage_incidence: float = 0.0
    # None for the fixed scheme
    saturated: Optional[bool] = None
    # transmit power per LED after any equal-total scaling
    led_power_w: float = 0.0

    def as_dict(self) -> Dict[str, object]:
        return {
            "unserved_users": self.unserved_users,
            "clipped_secrecy": self.clipped_secrecy,
            "flagged_allocations": self.flagged_allocations,
            "blockage_incidence": self.blockage_incidence,
            "saturated": self.saturated,
            "led_power_w": self.led_power_w,
        }


@dataclass(frozen=True)
class CampaignStats:
    strategy: str
    allocation: str
    power_dbm: float
    eve: EvePlacement
    trials: int
    seed: int
    mean_rd: float
    se_rd: float
    mean_rs: float
    se_rs: float
    user_rate: Tuple[float, ...]
    user_wiretap: Tuple[float, ...]
    user_secrecy: Tuple[float, ...]
    diagnostics: Diagnostics = Diagnostics()

    @property
    def eve_xy(self) -> Optional[Tuple[float, float]]:
        if self.eve.kind is EveKind.FIXED:
            return self.eve.point
        return None

    def ci95(self, metric: str = "rd") -> Tuple[float, float]:
        """Normal-approximation 95% interval of the transmission ("rd") or secrecy ("rs") mean."""
        mean, se = (self.mean_rd, self.se_rd) if metric == "rd" else (self.mean_rs, self.se_rs)
        return mean - Z95 * se, mean + Z95 * se


def _standard_error(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def _run_block(
    cfg: CampaignConfig, deployment: Deployment, indices: Sequence[int]
) -> List[TrialResult]:
    return [run_trial(cfg, deployment, trial_rng(cfg.seed, i), i) for i in indices]


def _blocks(trials: int, jobs: int) -> List[range]:
    workers = jobs if jobs > 0 else 8
    size = max(1, math.ceil(trials / (4 * workers)))
    return [range(start, min(start + size, trials)) for start in range(0, trials, size)]


def run_trials(cfg: CampaignConfig, deployment: Deployment) -> List[TrialResult]:
    """All trials of the campaign, in trial-index order whatever the worker count."""
    blocks = _blocks(cfg.trials, cfg.jobs)
    if cfg.jobs == 1:
        chunks = [_run_block(cfg, deployment, block) for block in blocks]
    else:
        chunks = Parallel(n_jobs=cfg.jobs)(
            delayed(_run_block)(cfg, deployment, block) for block in blocks
        )
    results = [r for chunk in chunks for r in chunk]
    results.sort(key=lambda r: r.index)
    return results


def summarize(
    cfg: CampaignConfig, deployment: Deployment, results: Sequence[TrialResult]
) -> CampaignStats:
    rates = np.array([r.rates for r in results], dtype=float)
    wiretap = np.array([r.wiretap for r in results], dtype=float)
    secrecy = np.array([r.secrecy for r in results], dtype=float)
    rd = np.array([r.sum_rate for r in results])
    rs = np.array([r.secrecy_sum for r in results])

    links = sum(r.links for r in results)
    saturated = None
    if cfg.allocation == OPTIMIZED:
        saturated = all(abs(a.total - 1.0) <= 1e-9 for a in deployment.allocations.values())
    diagnostics = Diagnostics(
        unserved_users=len(deployment.assignment.unserved()),
        clipped_secrecy=sum(r.clipped for r in results),
        flagged_allocations=deployment.flagged,
        blockage_incidence=(sum(r.blocked_links for r in results) / links) if links else 0.0,
        saturated=saturated,
        led_power_w=deployment.p_s,
    )
    return CampaignStats(
        strategy=Strategy(cfg.strategy).value,
        allocation=cfg.allocation,
        power_dbm=deployment.power_dbm,
        eve=cfg.scenario.eve,
        trials=len(results),
        seed=cfg.seed,
        mean_rd=float(np.mean(rd)),
        se_rd=_standard_error(rd),
        mean_rs=float(np.mean(rs)),
        se_rs=_standard_error(rs),
        user_rate=tuple(float(v) for v in rates.mean(axis=0)),
        user_wiretap=tuple(float(v) for v in wiretap.mean(axis=0)),
        user_secrecy=tuple(float(v) for v in secrecy.mean(axis=0)),
        diagnostics=diagnostics,
    )


def run_campaign(cfg: CampaignConfig, deployment: Optional[Deployment] = None) -> CampaignStats:
    """Mean transmission and secrecy sum rates over cfg.trials independent trials."""
    if len(cfg.powers_dbm) != 1:
        raise ValueError("run_campaign takes a single transmit power; use sweep for lists")
    if cfg.scenario.eve.kind is EveKind.GRID:
        raise ValueError("run_campaign takes a single eavesdropper placement; use sweep for grids")
    deployment = deployment or prepare(cfg)
    logger.info(
        "campaign %s/%s P_s=%.2f dBm eve=%s: %d trials, seed %d",
        Strategy(cfg.strategy).value, cfg.allocation, deployment.power_dbm,
        cfg.scenario.eve.describe(), cfg.trials, cfg.seed,
    )
    stats = summarize(cfg, deployment, run_trials(cfg, deployment))
    logger.info(
        "R_D=%.6g (se %.2g)  R_S=%.6g (se %.2g)",
        stats.mean_rd, stats.se_rd, stats.mean_rs, stats.se_rs,
    )
    if stats.diagnostics.flagged_allocations:
        logger.warning("%d power allocations did not converge",
                       stats.diagnostics.flagged_allocations)
    return stats


def sweep_points(cfg: CampaignConfig) -> List[CampaignConfig]:
    """Single-point campaigns: powers outer, eavesdropper nodes inner."""
    points = []
    for power in cfg.powers_dbm:
        for eve in cfg.scenario.eve.expand():
            points.append(
                replace(cfg, powers_dbm=(power,), scenario=replace(cfg.scenario, eve=eve))
            )
    return points


def sweep(cfg: CampaignConfig) -> List[CampaignStats]:
    """One CampaignStats row per transmit power and eavesdropper grid node."""
    points = sweep_points(cfg)
    if not points:
        raise ValueError("sweep has no points")
    deployments: Dict[float, Deployment] = {}
    rows = []
    for point in points:
        power = point.powers_dbm[0]
        if power not in deployments:
            deployments[power] = prepare(point)
        rows.append(run_campaign(point, deployments[power]))
    return rows
