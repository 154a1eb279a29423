"""Shared fixtures for lipnav tests."""

import json
from collections.abc import Callable
from pathlib import Path

import pytest

from lipnav.core.metric import (
    FiniteMetricSpace,
    gen_example_d2p_not_ltp,
    gen_example_seqltp_not_sltp,
    gen_example_sltp_not_seq,
    real_line_space,
)


@pytest.fixture
def two_point() -> FiniteMetricSpace:
    """Base "0" and one point "p" at distance 1."""
    return FiniteMetricSpace.create(["0", "p"], [[0, 1], [1, 0]])


@pytest.fixture
def line3() -> FiniteMetricSpace:
    """{0, 1, 3} on the real line."""
    return real_line_space([0, 1, 3])


@pytest.fixture
def seqltp_space() -> FiniteMetricSpace:
    """a1, a2, b1, b2, u1, v1 with base a1."""
    return gen_example_seqltp_not_sltp(1)


@pytest.fixture
def sltp_space() -> FiniteMetricSpace:
    return gen_example_sltp_not_seq(6)


@pytest.fixture
def d2p_space() -> FiniteMetricSpace:
    return gen_example_d2p_not_ltp(2)


@pytest.fixture
def write_json(tmp_path: Path) -> Callable[[str, object], Path]:
    """Write a JSON document under tmp_path and return its path."""

    def write(name: str, data: object) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path

    return write
