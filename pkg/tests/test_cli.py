"""Tests for the command-line interface."""

import json
from collections.abc import Callable, Sequence
from pathlib import Path

import pytest
from click.testing import CliRunner, Result

from lipnav.__main__ import main
from lipnav.core.metric import (
    FiniteMetricSpace,
    gen_example_seqltp_not_sltp,
    gen_example_sltp_not_seq,
)
from lipnav.files import dump_space

WriteJson = Callable[[str, object], Path]


@pytest.fixture
def invoke(tmp_path: Path) -> Callable[..., Result]:
    runner = CliRunner()

    def run(*args: str) -> Result:
        return runner.invoke(main, list(args), env={"HOME": str(tmp_path)})

    return run


@pytest.fixture
def two_point_file(write_json: WriteJson) -> Path:
    return write_json("two.json", {"points": ["0", "p"], "dist": [[0, 1], [1, 0]]})


@pytest.fixture
def delta_file(write_json: WriteJson) -> Path:
    return write_json("delta.json", {"weights": {"p": 1}})


def _space_file(tmp_path: Path, space: FiniteMetricSpace, name: str) -> Path:
    path = tmp_path / name
    dump_space(space, path)
    return path


def _report(path: Path) -> dict[str, object]:
    data = json.loads(path.read_text())
    assert isinstance(data, dict)
    return data


def _checked(result: Result, code: int) -> Result:
    assert result.exit_code == code, result.output
    return result


class TestValidate:
    def test_metric_passes(self, invoke: Callable[..., Result], two_point_file: Path, tmp_path: Path) -> None:
        out = tmp_path / "report.json"
        _checked(invoke("-o", str(out), "validate", "--space", str(two_point_file)), 0)
        report = _report(out)
        assert report["status"] == "pass"
        assert report["run"]["subcommand"] == "validate"  # type: ignore[index]

    def test_triangle_violation_exits_one(
        self, invoke: Callable[..., Result], write_json: WriteJson, tmp_path: Path
    ) -> None:
        bad = write_json("bad.json", {"points": ["a", "b", "c"], "dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]})
        out = tmp_path / "report.json"
        _checked(invoke("-o", str(out), "validate", "--space", str(bad)), 1)
        assert _report(out)["status"] == "fail"

    def test_malformed_file_exits_two(self, invoke: Callable[..., Result], tmp_path: Path) -> None:
        broken = tmp_path / "broken.json"
        broken.write_text("{not json")
        result = _checked(invoke("validate", "--space", str(broken)), 2)
        assert "error:" in result.output

    def test_unknown_mode_is_a_usage_error(self, invoke: Callable[..., Result], two_point_file: Path) -> None:
        _checked(invoke("--mode", "approximate", "validate", "--space", str(two_point_file)), 2)


class TestCheck:
    def test_ltp_on_a_good_pair(self, invoke: Callable[..., Result], tmp_path: Path) -> None:
        space = _space_file(tmp_path, gen_example_seqltp_not_sltp(1), "seq.json")
        args = ("--space", str(space), "--A", "u1,v1", "--u", "u1", "--v", "v1", "--eps", "0")
        _checked(invoke("check", "ltp", *args), 0)
        _checked(invoke("check", "sltp", *args), 1)

    def test_finite_search(self, invoke: Callable[..., Result], tmp_path: Path) -> None:
        space = _space_file(tmp_path, gen_example_sltp_not_seq(6), "sltp.json")
        N = ",".join(f"{p}{k}" for k in range(1, 5) for p in "abc")
        out = tmp_path / "report.json"
        args = ("--space", str(space), "--u", "b5", "--v", "b6", "--N", N)
        _checked(invoke("-o", str(out), "check", "sltp", *args), 0)
        assert _report(out)["witness"] == {"u": "b5", "v": "b6"}

    def test_finite_search_over_all_pairs(self, invoke: Callable[..., Result], tmp_path: Path) -> None:
        space = _space_file(tmp_path, gen_example_sltp_not_seq(6), "sltp.json")
        N = ",".join(f"{p}{k}" for k in range(1, 5) for p in "abc")
        out = tmp_path / "report.json"
        _checked(invoke("-o", str(out), "check", "sltp", "--space", str(space), "--N", N), 0)
        report = _report(out)
        assert report["status"] == "pass"
        witness = report["witness"]
        assert isinstance(witness, dict)
        assert witness["u"] != witness["v"]

    def test_lone_u_is_a_usage_error(self, invoke: Callable[..., Result], tmp_path: Path) -> None:
        space = _space_file(tmp_path, gen_example_sltp_not_seq(6), "sltp.json")
        result = _checked(invoke("check", "ltp", "--space", str(space), "--u", "b5", "--N", "a1,b1"), 2)
        assert "both --u and --v" in result.output
        _checked(invoke("check", "ltp", "--space", str(space)), 2)

    def test_family_fails(self, invoke: Callable[..., Result], write_json: WriteJson, tmp_path: Path) -> None:
        space = _space_file(tmp_path, gen_example_sltp_not_seq(6), "sltp.json")
        members = [{"A": [f"a{m}", f"b{m}"], "u": f"a{m}", "v": f"b{m}"} for m in (1, 2, 3)]
        family = write_json("family.json", {"epsilon": "3/10", "members": members})
        _checked(invoke("check", "family", "--space", str(space), "--family", str(family), "--kinds", "ltp"), 1)

    def test_balls_lemma(self, invoke: Callable[..., Result], tmp_path: Path) -> None:
        space = tmp_path / "unbounded.json"
        _checked(invoke("-o", str(space), "generate", "unbounded", "--K", "12"), 0)
        good = ("--p", "0", "--r", "64", "--s", "1", "--u", "8", "--v", "16", "--eps", "1/2")
        _checked(invoke("check", "balls-lemma", "--space", str(space), *good), 0)
        bad = ("--p", "0", "--r", "16", "--s", "1", "--u", "4", "--v", "8", "--eps", "1/2")
        out = tmp_path / "report.json"
        _checked(invoke("-o", str(out), "check", "balls-lemma", "--space", str(space), *bad), 1)
        assert _report(out)["extra"]["conclusions"] == "not asserted"  # type: ignore[index]

    def test_bad_rational_is_a_usage_error(self, invoke: Callable[..., Result], two_point_file: Path) -> None:
        args = ("--space", str(two_point_file), "--u", "0", "--v", "p", "--eps", "a/b")
        _checked(invoke("check", "ltp", *args), 2)


class TestDiameter:
    def test_slice(
        self, invoke: Callable[..., Result], two_point_file: Path, delta_file: Path, tmp_path: Path
    ) -> None:
        out = tmp_path / "report.json"
        args = ("--space", str(two_point_file), "--functional", str(delta_file), "--alpha", "1/10")
        _checked(invoke("-o", str(out), "diameter", "slice", *args), 0)
        report = _report(out)
        assert report["value"] == "1/10"
        assert report["pair"] == ["0", "p"]

    def test_combo_weights_must_sum_to_one(
        self, invoke: Callable[..., Result], two_point_file: Path, delta_file: Path
    ) -> None:
        args = (
            "--space", str(two_point_file),
            "--functional", str(delta_file), "--functional", str(delta_file),
            "--alpha", "1/10", "--lambdas", "1/2,1/4",
        )
        result = _checked(invoke("diameter", "combo", *args), 2)
        assert "sum to 1" in result.output

    def test_alpha_count_mismatch(
        self, invoke: Callable[..., Result], two_point_file: Path, delta_file: Path
    ) -> None:
        args = (
            "--space", str(two_point_file),
            "--functional", str(delta_file), "--functional", str(delta_file),
            "--alpha", "1/10", "--alpha", "1/5", "--alpha", "1/2",
        )
        _checked(invoke("diameter", "ssd2p", *args), 2)

    def test_daugavet(
        self, invoke: Callable[..., Result], two_point_file: Path, write_json: WriteJson, tmp_path: Path
    ) -> None:
        F = write_json("minus.json", {"weights": {"p": -1}})
        f = write_json("f.json", {"values": {"p": 1}})
        out = tmp_path / "report.json"
        args = ("--space", str(two_point_file), "--functional", str(F), "--alpha", "1/10", "--function", str(f))
        _checked(invoke("-o", str(out), "diameter", "daugavet", *args), 0)
        assert _report(out)["value"] == "2"


def test_norm(invoke: Callable[..., Result], two_point_file: Path, delta_file: Path, tmp_path: Path) -> None:
    out = tmp_path / "report.json"
    _checked(invoke("-o", str(out), "norm", "--space", str(two_point_file), "--functional", str(delta_file)), 0)
    report = _report(out)
    assert report["dual"] == report["primal"] == report["min_tv"] == "1"


def test_norm_in_float_mode(invoke: Callable[..., Result], two_point_file: Path, delta_file: Path) -> None:
    _checked(invoke("--mode", "float", "norm", "--space", str(two_point_file), "--functional", str(delta_file)), 0)


@pytest.mark.parametrize("fmt", ["csv", "text"])
def test_other_formats(invoke: Callable[..., Result], two_point_file: Path, tmp_path: Path, fmt: str) -> None:
    out = tmp_path / f"report.{fmt}"
    _checked(invoke("--format", fmt, "-o", str(out), "validate", "--space", str(two_point_file)), 0)
    text = out.read_text()
    assert "pass" in text
    if fmt == "csv":
        assert text.splitlines()[0] == "field,value"


def test_config_file_sets_format(invoke: Callable[..., Result], two_point_file: Path, tmp_path: Path) -> None:
    config = tmp_path / "config.toml"
    config.write_text('[output]\nformat = "csv"\n')
    out = tmp_path / "report.csv"
    _checked(invoke("--config", str(config), "-o", str(out), "validate", "--space", str(two_point_file)), 0)
    assert out.read_text().startswith("field,value")


class TestGenerate:
    def test_writes_a_valid_space(self, invoke: Callable[..., Result], tmp_path: Path) -> None:
        out = tmp_path / "space.json"
        _checked(invoke("-o", str(out), "generate", "ex-seqltp", "--K", "2"), 0)
        data = _report(out)
        assert len(data["points"]) == 8  # type: ignore[arg-type]
        _checked(invoke("validate", "--space", str(out)), 0)

    def test_cap(self, invoke: Callable[..., Result]) -> None:
        _checked(invoke("--cap", "5", "generate", "ex-sltp", "--K", "4"), 2)

    def test_unknown_kind(self, invoke: Callable[..., Result]) -> None:
        result = _checked(invoke("generate", "hexagon"), 2)
        assert "unknown space kind" in result.output


class TestReproduce:
    @pytest.mark.parametrize(
        "args",
        [
            ("kn", "--n", "1", "--dims", "4"),
            ("ex-d2p", "--K", "2"),
            ("ex-seqltp", "--K", "3"),
            ("ex-sltp", "--K", "4"),
        ],
    )
    def test_bundles_pass(self, invoke: Callable[..., Result], tmp_path: Path, args: Sequence[str]) -> None:
        out = tmp_path / "bundle.json"
        _checked(invoke("-o", str(out), "reproduce", *args), 0)
        assert _report(out)["status"] == "pass"

    def test_small_k_is_rejected(self, invoke: Callable[..., Result]) -> None:
        _checked(invoke("reproduce", "ex-sltp", "--K", "3"), 2)

    def test_unknown_target(self, invoke: Callable[..., Result]) -> None:
        _checked(invoke("reproduce", "ex-nothing"), 2)
