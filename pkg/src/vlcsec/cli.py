from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, List, NoReturn, Optional, Sequence

import numpy as np
import typer
import yaml
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import __version__
from .oracle import ORACLES, run_oracle
from .output import RunManifest, utc_now, write_results
from .shared.config import ConfigLoader, SuiteConfig
from .shared.errors import ConfigError, SchemaError, SolverNonConvergence
from .sim import CampaignStats, build_campaign, build_room, sweep
from .topology import Strategy, max_triangular_side, nearest_neighbor_distances

console = Console()
err_console = Console(stderr=True)
app = typer.Typer(
    add_completion=False,
    help="Monte Carlo secrecy simulator for indoor multi-LED VLC NOMA networks",
)
config_app = typer.Typer(help="Inspect or generate configuration files")
app.add_typer(config_app, name="config")

logger = logging.getLogger("vlcsec.cli")

EXIT_CONFIG = 2
EXIT_CHECK = 3
EXIT_IO = 4


def _setup_logging(level: str) -> None:
    root = logging.getLogger("vlcsec")
    root.handlers.clear()
    root.addHandler(RichHandler(console=err_console, show_path=False, rich_tracebacks=False))
    root.setLevel(level.upper())
    root.propagate = False


def _fail(code: int, message: str) -> NoReturn:
    err_console.print(f"[red]{message}[/red]")
    raise typer.Exit(code)


def parse_power_range(text: str) -> List[float]:
    """START:STOP:STEP in dBm, STOP included."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise SchemaError(f"expected START:STOP:STEP, got {text!r}", "--power-range") from None
    if step <= 0 or stop < start:
        raise SchemaError(f"empty power range {text!r}", "--power-range")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def apply_overrides(suite: SuiteConfig, **flags: Any) -> SuiteConfig:
    """Re-validate the suite with command-line values layered over it."""
    data = suite.dump()
    sim = data["simulation"]
    for key in ("scenario", "strategy", "trials", "seed", "jobs", "strict"):
        if flags.get(key) is not None:
            sim[key] = flags[key]
    if flags.get("powers_dbm"):
        sim["powers_dbm"] = list(flags["powers_dbm"])
    if flags.get("eve") is not None:
        sim["eve"] = flags["eve"]
        # the flag beats a placement stored with the scenario
        entry = data["scenarios"].get(str(sim["scenario"]))
        if entry is not None:
            entry["eve"] = None
    if flags.get("allocation") is not None:
        data["noma"]["allocation"] = flags["allocation"]
    if flags.get("log_level") is not None:
        data["log_level"] = flags["log_level"]
    return ConfigLoader.from_mapping(data)


def _load(config: Optional[Path], **flags: Any) -> SuiteConfig:
    if config is not None and not config.exists():
        raise FileNotFoundError(f"config file not found: {config}")
    powers = list(flags.pop("power_dbm", None) or [])
    power_range = flags.pop("power_range", None)
    if power_range:
        powers.extend(parse_power_range(power_range))
    suite = apply_overrides(ConfigLoader.load(config), powers_dbm=powers, **flags)
    _setup_logging(suite.log_level)
    return suite


def _results_table(title: str, rows: Sequence[CampaignStats]) -> Table:
    table = Table(title=title)
    table.add_column("Strategy", style="cyan")
    table.add_column("Allocation")
    table.add_column("P_s (dBm)", justify="right")
    table.add_column("Eve")
    table.add_column("R_D [95% CI]", justify="right", style="green")
    table.add_column("R_S [95% CI]", justify="right", style="magenta")
    table.add_column("Flags", justify="right")
    for r in rows:
        lo_d, hi_d = r.ci95("rd")
        lo_s, hi_s = r.ci95("rs")
        d = r.diagnostics
        flags = d.flagged_allocations + d.unserved_users
        table.add_row(
            r.strategy,
            r.allocation,
            f"{r.power_dbm:.2f}",
            r.eve.describe(),
            f"{r.mean_rd:.4f} [{lo_d:.4f}, {hi_d:.4f}]",
            f"{r.mean_rs:.4f} [{lo_s:.4f}, {hi_s:.4f}]",
            str(flags) if flags else "-",
        )
    return table


def _campaign_rows(suite: SuiteConfig, strategies: Sequence[str]) -> List[CampaignStats]:
    rows: List[CampaignStats] = []
    for strategy in strategies:
        point = apply_overrides(suite, strategy=strategy)
        rows.extend(sweep(build_campaign(point)))
    return rows


def _execute(
    suite: SuiteConfig, strategies: Sequence[str], out_dir: Path, command: str
) -> List[CampaignStats]:
    """Run, write outputs and map failures onto exit codes."""
    started = utc_now()
    try:
        rows = _campaign_rows(suite, strategies)
    except ConfigError as e:
        _fail(EXIT_CONFIG, f"Configuration error: {e}")
    except SolverNonConvergence as e:
        _fail(EXIT_CHECK, f"Strict mode: {e}")

    try:
        manifest = write_results(
            out_dir, rows, suite.dump(), suite.simulation.seed, started, command
        )
    except OSError as e:
        _fail(EXIT_IO, f"Cannot write results: {e}")

    console.print(_results_table(f"vlcsec {command} (scenario {suite.simulation.scenario})",
                                 rows))
    console.print(f"[green]✓ Results written to {out_dir}[/green] "
                  f"({', '.join(Path(p).name for p in manifest.outputs.values())}, manifest.json)")

    if suite.simulation.strict:
        flagged = sum(r.diagnostics.flagged_allocations for r in rows)
        if flagged:
            _fail(EXIT_CHECK, f"Strict mode: {flagged} power allocations did not converge")
    return rows


def _common_load(config, **flags) -> SuiteConfig:
    try:
        return _load(config, **flags)
    except ConfigError as e:
        _fail(EXIT_CONFIG, f"Configuration error: {e}")
    except OSError as e:
        _fail(EXIT_IO, f"Cannot read configuration: {e}")


ConfigOpt = typer.Option(None, "--config", "-c", help="YAML configuration file")
ScenarioOpt = typer.Option(None, "--scenario", "-s", help="Scenario name (1, 2, 3 or custom)")
AllocationOpt = typer.Option(None, "--allocation", "-a", help="fixed | optimized")
TrialsOpt = typer.Option(None, "--trials", "-n", help="Monte Carlo trials per sweep point")
SeedOpt = typer.Option(None, "--seed", help="Master seed")
PowerOpt = typer.Option(None, "--power-dbm", "-p", help="Transmit power in dBm (repeatable)")
RangeOpt = typer.Option(None, "--power-range", help="Power sweep START:STOP:STEP in dBm")
EveOpt = typer.Option(None, "--eve", help="fixed:x,y | uniform | grid:step | clone:k")
OutOpt = typer.Option(Path("results"), "--out-dir", "-o", help="Output directory")
StrictOpt = typer.Option(None, "--strict/--no-strict", help="Fail on non-converged allocations")
JobsOpt = typer.Option(None, "--jobs", "-j", help="joblib worker count (-1 = all cores)")
LogOpt = typer.Option(None, "--log-level", help="debug | info | warning | error")


@app.command()
def run(
    config: Optional[Path] = ConfigOpt,
    scenario: Optional[str] = ScenarioOpt,
    strategy: Optional[Strategy] = typer.Option(
        None, "--strategy", help="broadcasting | simple | smart"
    ),
    allocation: Optional[str] = AllocationOpt,
    trials: Optional[int] = TrialsOpt,
    seed: Optional[int] = SeedOpt,
    power_dbm: Optional[List[float]] = PowerOpt,
    power_range: Optional[str] = RangeOpt,
    eve: Optional[str] = EveOpt,
    out_dir: Path = OutOpt,
    strict: Optional[bool] = StrictOpt,
    jobs: Optional[int] = JobsOpt,
    log_level: Optional[str] = LogOpt,
):
    """Run a campaign (or a power / eavesdropper-grid sweep) and write CSV results."""
    suite = _common_load(
        config, scenario=scenario, strategy=strategy.value if strategy else None,
        allocation=allocation, trials=trials, seed=seed, power_dbm=power_dbm,
        power_range=power_range, eve=eve, strict=strict, jobs=jobs, log_level=log_level,
    )
    _execute(suite, [suite.simulation.strategy], out_dir, "run")


@app.command()
def compare(
    config: Optional[Path] = ConfigOpt,
    scenario: Optional[str] = ScenarioOpt,
    allocation: Optional[str] = AllocationOpt,
    trials: Optional[int] = TrialsOpt,
    seed: Optional[int] = SeedOpt,
    power_dbm: Optional[List[float]] = PowerOpt,
    power_range: Optional[str] = RangeOpt,
    eve: Optional[str] = EveOpt,
    out_dir: Path = OutOpt,
    strict: Optional[bool] = StrictOpt,
    jobs: Optional[int] = JobsOpt,
    log_level: Optional[str] = LogOpt,
):
    """Run broadcasting, simple and smart linking over the same powers and seed."""
    suite = _common_load(
        config, scenario=scenario, allocation=allocation, trials=trials, seed=seed,
        power_dbm=power_dbm, power_range=power_range, eve=eve, strict=strict, jobs=jobs,
        log_level=log_level,
    )
    _execute(suite, [s.value for s in Strategy], out_dir, "compare")


@app.command()
def oracle(
    kind: str = typer.Argument(..., help=f"One of: {', '.join(ORACLES)}"),
    n: int = typer.Argument(1000, help="Number of random cases"),
    seed: int = typer.Argument(1, help="Seed of the case generator"),
    config: Optional[Path] = ConfigOpt,
    rectangle: Optional[str] = typer.Option(
        None, "--rectangle", help="Blockage rectangle angle: aligned | literal"
    ),
    samples: int = typer.Option(10_000, "--samples", help="Points per segment (blockage)"),
    log_level: Optional[str] = LogOpt,
):
    """Cross-check a library routine against an independent reference."""
    suite = _common_load(config, log_level=log_level)
    if kind not in ORACLES:
        _fail(EXIT_CONFIG, f"Unknown oracle {kind!r}; choose from {', '.join(ORACLES)}")
    options: Dict[str, Any] = {"suite": suite}
    if kind == "blockage":
        options.update(samples=samples, mode=rectangle)
    try:
        report = run_oracle(kind, n, seed, **options)
    except (ConfigError, ValueError) as e:
        _fail(EXIT_CONFIG, f"Oracle setup error: {e}")

    table = Table(title=f"{kind} oracle ({report.cases} cases, seed {seed})")
    table.add_column("Metric", style="cyan")
    table.add_column("Value", justify="right")
    for name, value in report.metrics.items():
        table.add_row(name, f"{value:.6g}" if isinstance(value, float) else str(value))
    console.print(table)
    for line in report.failures:
        console.print(f"  [yellow]{line}[/yellow]")
    if not report.passed:
        _fail(EXIT_CHECK, f"✗ {kind} oracle failed")
    console.print(f"[green]✓ {kind} oracle passed[/green]")


@app.command()
def lattice(
    config: Optional[Path] = ConfigOpt,
    log_level: Optional[str] = LogOpt,
):
    """Print the LED coordinates of the configured arrangement and check the coverage bound."""
    suite = _common_load(config, log_level=log_level)
    try:
        suite.check_ranges()
        room = build_room(suite)
    except ConfigError as e:
        _fail(EXIT_CONFIG, f"Configuration error: {e}")

    table = Table(title=f"{suite.leds.lattice} lattice: {len(room.led_positions)} LEDs")
    table.add_column("#", justify="right")
    table.add_column("x (m)", justify="right")
    table.add_column("y (m)", justify="right")
    table.add_column("Nearest (m)", justify="right")
    nearest = nearest_neighbor_distances(room.led_positions)
    for i, p in enumerate(room.led_positions):
        d = f"{nearest[i]:.4f}" if len(nearest) else "-"
        table.add_row(str(i), f"{p.x:.4f}", f"{p.y:.4f}", d)
    console.print(table)
    if suite.leds.lattice == "triangular":
        bound = max_triangular_side(
            room.height, room.device_height, np.radians(suite.leds.half_angle_deg)
        )
        console.print(f"[green]✓ side {suite.leds.side} m within coverage bound {bound:.4f} m"
                      "[/green]")


@app.command()
def rerun(
    manifest: Path = typer.Argument(..., help="manifest.json of an earlier run"),
    out_dir: Path = typer.Option(
        Path("results-rerun"), "--out-dir", "-o", help="Fresh output directory"
    ),
    jobs: Optional[int] = JobsOpt,
    log_level: Optional[str] = LogOpt,
):
    """Re-execute a campaign from its manifest."""
    try:
        record = RunManifest.load(manifest)
        suite = apply_overrides(
            ConfigLoader.from_mapping(record.config), jobs=jobs, log_level=log_level
        )
    except ConfigError as e:
        _fail(EXIT_CONFIG, f"Manifest holds an invalid configuration: {e}")
    except ValueError as e:
        _fail(EXIT_CONFIG, str(e))
    except OSError as e:
        _fail(EXIT_IO, f"Cannot read manifest: {e}")
    _setup_logging(suite.log_level)
    if record.version != __version__:
        logger.warning("manifest written by vlcsec %s, rerunning with %s",
                       record.version, __version__)
    strategies = (
        [s.value for s in Strategy] if record.command == "compare"
        else [suite.simulation.strategy]
    )
    _execute(suite, strategies, out_dir, record.command)


@config_app.command("show")
def config_show(config: Optional[Path] = ConfigOpt):
    """Print the resolved configuration as YAML."""
    suite = _common_load(config)
    typer.echo(yaml.safe_dump(suite.dump(), sort_keys=False), nl=False)


@config_app.command("template")
def config_template(
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write to this file"),
):
    """Emit a commented default configuration."""
    text = ConfigLoader.template()
    if output is None:
        typer.echo(text, nl=False)
        return
    try:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text, encoding="utf-8")
    except OSError as e:
        _fail(EXIT_IO, f"Cannot write {output}: {e}")
    console.print(f"[green]✓ Template written to {output}[/green]")


@app.command()
def version():
    """Show the vlcsec version."""
    console.print(f"vlcsec {__version__}")


if __name__ == "__main__":
    app()
