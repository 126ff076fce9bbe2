"""
Result files: summary.csv, per_user.csv and the run manifest.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .. import __version__
from ..sim import CampaignStats

logger = logging.getLogger("vlcsec.output")

SUMMARY_FILE = "summary.csv"
PER_USER_FILE = "per_user.csv"
MANIFEST_FILE = "manifest.json"

SUMMARY_COLUMNS = [
    "strategy",
    "allocation",
    "P_s_dBm",
    "x_E",
    "y_E",
    "mean_RD",
    "se_RD",
    "mean_RS",
    "se_RS",
    "trials",
    "seed",
]
PER_USER_COLUMNS = [
    "strategy",
    "allocation",
    "P_s_dBm",
    "x_E",
    "y_E",
    "user",
    "mean_R",
    "mean_RE",
    "mean_secrecy",
]


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def _eve_cells(row: CampaignStats) -> List[str]:
    xy = row.eve_xy
    if xy is None:
        return ["", ""]
    return [fmt(xy[0]), fmt(xy[1])]


def summary_rows(rows: Sequence[CampaignStats]) -> List[List[str]]:
    return [
        [
            r.strategy,
            r.allocation,
            fmt(r.power_dbm),
            *_eve_cells(r),
            fmt(r.mean_rd),
            fmt(r.se_rd),
            fmt(r.mean_rs),
            fmt(r.se_rs),
            str(r.trials),
            str(r.seed),
        ]
        for r in rows
    ]


def per_user_rows(rows: Sequence[CampaignStats]) -> List[List[str]]:
    out = []
    for r in rows:
        for k, (rate, wiretap, secrecy) in enumerate(
            zip(r.user_rate, r.user_wiretap, r.user_secrecy)
        ):
            out.append(
                [
                    r.strategy,
                    r.allocation,
                    fmt(r.power_dbm),
                    *_eve_cells(r),
                    str(k),
                    fmt(rate),
                    fmt(wiretap),
                    fmt(secrecy),
                ]
            )
    return out


def _write_csv(path: Path, header: List[str], rows: List[List[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


@dataclass
class RunManifest:
    config: Dict[str, Any]
    seed: int
    started_at: str
    finished_at: str = ""
    outputs: Dict[str, str] = field(default_factory=dict)
    diagnostics: List[Dict[str, Any]] = field(default_factory=list)
    command: str = "run"
    version: str = __version__

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tool": "vlcsec",
            "version": self.version,
            "command": self.command,
            "seed": self.seed,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "outputs": self.outputs,
            "diagnostics": self.diagnostics,
            "config": self.config,
        }

    @classmethod
    def load(cls, path: Path) -> "RunManifest":
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        if not isinstance(data, dict) or "config" not in data:
            raise ValueError(f"{path} is not a vlcsec run manifest")
        return cls(
            config=data["config"],
            seed=int(data.get("seed", 0)),
            started_at=data.get("started_at", ""),
            finished_at=data.get("finished_at", ""),
            outputs=data.get("outputs", {}),
            diagnostics=data.get("diagnostics", []),
            command=data.get("command", "run"),
            version=data.get("version", __version__),
        )


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def write_results(
    out_dir: Path,
    rows: Sequence[CampaignStats],
    config: Dict[str, Any],
    seed: int,
    started_at: Optional[str] = None,
    command: str = "run",
) -> RunManifest:
    """Write both CSV files and the manifest into out_dir (created if missing)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_path = out_dir / SUMMARY_FILE
    per_user_path = out_dir / PER_USER_FILE
    _write_csv(summary_path, SUMMARY_COLUMNS, summary_rows(rows))
    _write_csv(per_user_path, PER_USER_COLUMNS, per_user_rows(rows))

    manifest = RunManifest(
        config=config,
        seed=seed,
        started_at=started_at or utc_now(),
        outputs={"summary": str(summary_path), "per_user": str(per_user_path)},
        diagnostics=[
            {"P_s_dBm": r.power_dbm, "eve": r.eve.describe(), **r.diagnostics.as_dict()}
            for r in rows
        ],
        command=command,
    )
    manifest.finished_at = utc_now()
    manifest_path = out_dir / MANIFEST_FILE
    with open(manifest_path, "w", encoding="utf-8") as f:
        json.dump(manifest.to_dict(), f, indent=2)
    logger.info("wrote %s, %s and %s", summary_path, per_user_path, manifest_path)
    return manifest
