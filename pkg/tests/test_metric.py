"""Tests for finite metric spaces, balls and generators."""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from lipnav.core.metric import (
    FamilyKind,
    FiniteMetricSpace,
    annulus,
    ball,
    gen_example_d2p_not_ltp,
    gen_example_seqltp_not_sltp,
    gen_example_sltp_not_seq,
    gen_family,
    gen_kn,
    kn_point_count,
    real_line_space,
    validate,
)
from lipnav.errors import CapExceededError, PreconditionError, StructuralError
from tests.strategies import metric_spaces


@pytest.mark.parametrize(
    "space",
    [
        gen_example_sltp_not_seq(4),
        gen_example_sltp_not_seq(3, fresh_base=False),
        gen_example_seqltp_not_sltp(3),
        gen_example_seqltp_not_sltp(2, fresh_base=True),
        gen_example_d2p_not_ltp(2),
        gen_kn(2, 4, level_cap=2),
        *(gen_family(kind, 5) for kind in FamilyKind),
    ],
)
def test_generators_produce_metrics(space: FiniteMetricSpace) -> None:
    assert validate(space).passed


@given(metric_spaces())
@settings(max_examples=40)
def test_shortest_path_closures_are_metrics(space: FiniteMetricSpace) -> None:
    assert validate(space).passed


def test_triangle_violation_names_the_triple() -> None:
    space = FiniteMetricSpace.create(
        ["a", "b", "c"], [[0, 1, 3], [1, 0, 1], [3, 1, 0]]
    )
    report = validate(space)
    assert not report.passed
    assert report.axiom == "triangle"
    assert report.points == ("a", "b", "c")


def test_symmetry_violation() -> None:
    space = FiniteMetricSpace.create(["a", "b"], [[0, 1], [2, 0]])
    report = validate(space)
    assert report.axiom == "symmetry"
    assert report.points == ("a", "b")


def test_zero_diagonal_and_positivity() -> None:
    diag = FiniteMetricSpace.create(["a", "b"], [[1, 1], [1, 0]])
    assert validate(diag).axiom == "zero-diagonal"
    zero = FiniteMetricSpace.create(["a", "b", "c"], [[0, 0, 1], [0, 0, 1], [1, 1, 0]])
    assert validate(zero).axiom == "positivity"


def test_single_point_fails_size() -> None:
    assert validate(FiniteMetricSpace.create(["a"], [[0]])).axiom == "size"


def test_shape_errors() -> None:
    with pytest.raises(StructuralError, match="duplicate"):
        FiniteMetricSpace.create(["a", "a"], [[0, 1], [1, 0]])
    with pytest.raises(StructuralError):
        FiniteMetricSpace.create(["a", "b"], [[0, 1]])
    with pytest.raises(StructuralError, match="unknown base"):
        FiniteMetricSpace.create(["a", "b"], [[0, 1], [1, 0]], base="z")


def test_rational_strings_are_exact() -> None:
    space = FiniteMetricSpace.create(["0", "x"], [[0, "1/3"], ["1/3", 0]])
    assert space.d("0", "x") == Fraction(1, 3)


def test_essential_pairs_on_a_line() -> None:
    space = real_line_space([0, 1, 2])
    pairs = {tuple(space.names(pair)) for pair in space.essential_pairs}
    assert pairs == {("0", "1"), ("1", "2")}


def test_balls_open_and_closed(line3: FiniteMetricSpace) -> None:
    assert ball(line3, "0", 1).names(line3) == ["0"]
    assert ball(line3, "0", 1, closed=True).names(line3) == ["0", "1"]
    assert annulus(line3, "0", 4, 1).names(line3) == ["1", "3"]
    with pytest.raises(PreconditionError):
        ball(line3, "0", -1)


def test_sltp_example_distances() -> None:
    space = gen_example_sltp_not_seq(3)
    assert space.points[space.base] == "0"
    assert space.d("a2", "c2") == 2
    assert space.d("a1", "b2") == space.d("b2", "a1") == 2
    assert space.d("a2", "b1") == 1
    assert space.d("0", "c3") == 1


def test_seqltp_example_distances(seqltp_space: FiniteMetricSpace) -> None:
    d = seqltp_space.d
    assert seqltp_space.points[seqltp_space.base] == "a1"
    assert d("a1", "b2") == d("a2", "u1") == d("b1", "v1") == d("u1", "v1") == 1
    assert d("a1", "a2") == d("u1", "b1") == d("a1", "v1") == 2


def test_d2p_example_distances(d2p_space: FiniteMetricSpace) -> None:
    d = d2p_space.d
    assert d("a1", "u2_1") == d("a3", "v2_2") == 1
    assert d("a2", "u2_1") == 2
    assert d("u1_2", "v1_2") == 1
    assert d("u1_1", "v1_2") == 2


def test_kn_counts_and_norm() -> None:
    assert kn_point_count(2, 4, 2) == 1 + 4 * 2 + 6 * 4
    space = gen_kn(2, 4, level_cap=2)
    assert space.size == kn_point_count(2, 4, 2)
    assert validate(space).passed


def test_cap_is_enforced() -> None:
    with pytest.raises(CapExceededError):
        gen_kn(3, 6, level_cap=2, cap=10)
    with pytest.raises(CapExceededError):
        gen_example_sltp_not_seq(10, cap=5)


def test_real_line_family_names() -> None:
    space = gen_family(FamilyKind.SHRINKING_PAIRS, 2)
    assert list(space.points) == ["0", "1", "3/2", "2", "9/4"]
    assert space.points[space.base] == "0"
    unbounded = gen_family("unbounded", 3)
    assert list(unbounded.points) == ["0", "2", "4", "8"]


def test_family_needs_two_levels() -> None:
    with pytest.raises(PreconditionError):
        gen_family(FamilyKind.LIMIT_POINT, 1)
