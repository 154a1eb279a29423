"""Tests for configuration loading."""

from pathlib import Path

import pytest

from lipnav.config import Config, RunConfig, load_config
from lipnav.constants import DEFAULT_POINT_CAP, FEAS_TOL
from lipnav.core.linprog import SolveMode


def test_missing_file_gives_defaults(tmp_path: Path) -> None:
    config = load_config(tmp_path / "absent.toml")
    assert config == Config()
    assert config.solver.mode == "exact"
    assert config.limits.point_cap == DEFAULT_POINT_CAP
    assert config.solver.tolerances.feas_tol == FEAS_TOL


def test_values_are_read(tmp_path: Path) -> None:
    path = tmp_path / "config.toml"
    path.write_text(
        "seed = 7\n"
        "[solver]\nmode = \"FLOAT\"\ngap_tol = 1e-6\n"
        "[limits]\npoint_cap = 100\n"
        "[output]\nformat = \"csv\"\n"
    )
    config = load_config(path)
    assert config.seed == 7
    assert config.solver.mode == "float"
    assert config.solver.gap_tol == 1e-6
    assert config.limits.point_cap == 100
    assert config.limits.max_violations > 0
    assert config.output.format == "csv"


def test_bad_mode_is_rejected(tmp_path: Path) -> None:
    path = tmp_path / "config.toml"
    path.write_text("[solver]\nmode = \"approximate\"\n")
    with pytest.raises(ValueError):
        load_config(path)


def test_run_config_dict() -> None:
    run = RunConfig("norm", {"space": "s.json"}, SolveMode.FLOAT, "text", 10, 3)
    assert run.to_dict() == {
        "subcommand": "norm",
        "inputs": {"space": "s.json"},
        "mode": "float",
        "format": "text",
        "point_cap": 10,
        "seed": 3,
    }
