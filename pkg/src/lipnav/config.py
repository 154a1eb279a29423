"""Configuration loading from ~/.config/lipnav/config.toml."""

import tomllib
from dataclasses import dataclass, field
from pathlib import Path

from lipnav.constants import DEFAULT_MAX_VIOLATIONS, DEFAULT_POINT_CAP, FEAS_TOL, GAP_TOL
from lipnav.core.linprog import SolveMode, Tolerances


@dataclass
class SolverConfig:
    """Linear-program solver settings."""

    mode: str = "exact"  # exact | float
    feas_tol: float = FEAS_TOL
    gap_tol: float = GAP_TOL

    @property
    def tolerances(self) -> Tolerances:
        return Tolerances(self.feas_tol, self.gap_tol)


@dataclass
class LimitsConfig:
    """Size limits for generators and reports."""

    point_cap: int = DEFAULT_POINT_CAP
    max_violations: int = DEFAULT_MAX_VIOLATIONS


@dataclass
class OutputConfig:
    format: str = "json"  # json | csv | text


@dataclass
class Config:
    """Application configuration."""

    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    limits: LimitsConfig = field(default_factory=LimitsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


@dataclass
class RunConfig:
    """Effective settings of one CLI invocation, echoed into every report."""

    subcommand: str
    inputs: dict[str, str] = field(default_factory=dict)
    mode: SolveMode = SolveMode.EXACT
    format: str = "json"
    point_cap: int = DEFAULT_POINT_CAP
    seed: int = 0

    def to_dict(self) -> dict[str, object]:
        return {
            "subcommand": self.subcommand,
            "inputs": dict(self.inputs),
            "mode": str(self.mode),
            "format": self.format,
            "point_cap": self.point_cap,
            "seed": self.seed,
        }


def default_config_path() -> Path:
    return Path.home() / ".config" / "lipnav" / "config.toml"


def load_config(path: Path | None = None) -> Config:
    """Load configuration from `path` or ~/.config/lipnav/config.toml.

    Returns defaults if file doesn't exist.
    """
    path = path if path is not None else default_config_path()
    if not path.exists():
        return Config()

    with path.open("rb") as f:
        data = tomllib.load(f)

    solver_data = data.get("solver", {})
    solver = SolverConfig(
        mode=str(SolveMode.parse(solver_data.get("mode", "exact"))),
        feas_tol=float(solver_data.get("feas_tol", FEAS_TOL)),
        gap_tol=float(solver_data.get("gap_tol", GAP_TOL)),
    )

    limits_data = data.get("limits", {})
    limits = LimitsConfig(
        point_cap=int(limits_data.get("point_cap", DEFAULT_POINT_CAP)),
        max_violations=int(limits_data.get("max_violations", DEFAULT_MAX_VIOLATIONS)),
    )

    output_data = data.get("output", {})
    output = OutputConfig(format=output_data.get("format", "json"))

    return Config(
        seed=int(data.get("seed", 0)),
        solver=solver,
        limits=limits,
        output=output,
    )
