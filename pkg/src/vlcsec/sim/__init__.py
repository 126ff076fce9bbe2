"""
Monte Carlo engine: scenarios, trials, campaigns and sweeps.
"""

from .scenario import DEFAULT_EVE_BOX, EveKind, EvePlacement, Scenario
from .engine import (
    FIXED,
    OPTIMIZED,
    BodyParams,
    CampaignConfig,
    Deployment,
    TrialResult,
    trial_rng,
    prepare,
    run_trial,
)
from .campaign import (
    Diagnostics,
    CampaignStats,
    run_trials,
    summarize,
    run_campaign,
    sweep_points,
    sweep,
)
from .setup import build_campaign, build_room, build_scenario, lattice_spec, parse_config

__all__ = [
    "DEFAULT_EVE_BOX",
    "EveKind",
    "EvePlacement",
    "Scenario",
    "FIXED",
    "OPTIMIZED",
    "BodyParams",
    "CampaignConfig",
    "Deployment",
    "TrialResult",
    "trial_rng",
    "prepare",
    "run_trial",
    "Diagnostics",
    "CampaignStats",
    "run_trials",
    "summarize",
    "run_campaign",
    "sweep_points",
    "sweep",
    "build_campaign",
    "build_room",
    "build_scenario",
    "lattice_spec",
    "parse_config",
]
