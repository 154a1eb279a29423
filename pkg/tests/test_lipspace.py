"""Tests for Lipschitz functions, norms and McShane extensions."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lipnav.core.lipspace import (
    ExtensionDirection,
    LipschitzFunction,
    PartialFunction,
    de_leeuw,
    lip_norm,
    lip_norm_with_pair,
    mcshane_extend,
    weighted_mcshane_extend,
)
from lipnav.core.metric import FiniteMetricSpace, PointSubset, real_line_space
from lipnav.errors import PreconditionError, StructuralError
from tests.strategies import metric_spaces, unit_functions


def test_norm_and_attaining_pair(line3: FiniteMetricSpace) -> None:
    f = LipschitzFunction.from_mapping(line3, {"1": "1/2", "3": 3})
    norm, pair = lip_norm_with_pair(f)
    assert norm == Fraction(5, 4)
    assert pair is not None
    assert line3.names(pair) == ("1", "3")
    assert f.slope("3", "1") == Fraction(5, 4)


def test_base_value_must_vanish(line3: FiniteMetricSpace) -> None:
    with pytest.raises(StructuralError):
        LipschitzFunction.from_values(line3, [1, 0, 0])


def test_vector_operations(two_point: FiniteMetricSpace) -> None:
    f = LipschitzFunction.from_mapping(two_point, {"p": 1})
    g = LipschitzFunction.from_mapping(two_point, {"p": "1/4"})
    assert (f - g)("p") == Fraction(3, 4)
    assert (-f + g.scaled(2))("p") == Fraction(-1, 2)
    assert lip_norm(LipschitzFunction.zero(two_point)) == 0


def test_mcshane_sup_and_inf() -> None:
    space = real_line_space([0, 1, 2, 3])
    pf = PartialFunction.from_mapping(space, {"0": 0, "2": 0})
    upper = mcshane_extend(pf, direction=ExtensionDirection.INF)
    lower = mcshane_extend(pf, direction=ExtensionDirection.SUP)
    assert lower("1") == -1
    assert upper("1") == 1
    assert lower("3") == -1
    assert upper("3") == 1
    assert lip_norm(lower) <= 1 and lip_norm(upper) <= 1


def test_mcshane_rejects_bad_input() -> None:
    space = real_line_space([0, 1, 2])
    steep = PartialFunction.from_mapping(space, {"0": 0, "1": 2})
    with pytest.raises(PreconditionError, match="Lipschitz"):
        mcshane_extend(steep)
    no_base = PartialFunction.from_mapping(space, {"1": 0})
    with pytest.raises(PreconditionError, match="base"):
        mcshane_extend(no_base)
    with pytest.raises(PreconditionError):
        mcshane_extend(PartialFunction.from_mapping(space, {"0": 0}), slope=0)


def test_weighted_extension() -> None:
    space = real_line_space([0, 1, 2])
    pf = PartialFunction.from_mapping(space, {"0": 0, "2": 0})
    f = weighted_mcshane_extend(pf, {space.index("0"): 0, space.index("2"): Fraction(1, 2)})
    assert f("1") == Fraction(-1, 2)
    with pytest.raises(PreconditionError, match="nonnegative"):
        weighted_mcshane_extend(pf, {space.index("0"): 0, space.index("2"): -1})
    with pytest.raises(PreconditionError, match="exactly"):
        weighted_mcshane_extend(pf, {space.index("0"): 0})


def test_partial_function_domain_checks(line3: FiniteMetricSpace) -> None:
    with pytest.raises(StructuralError):
        PartialFunction(line3, PointSubset((0, 1)), {0: Fraction(0)})
    pf = PartialFunction.from_mapping(line3, {"0": 0}).with_value("3", 2)
    assert pf("3") == 2
    assert list(pf.domain) == [line3.index("0"), line3.index("3")]


@given(st.data())
@settings(max_examples=30)
def test_de_leeuw_sup_matches_norm(data: st.DataObject) -> None:
    space = data.draw(metric_spaces())
    f = data.draw(unit_functions(space))
    assert de_leeuw(f).sup_norm() == lip_norm(f)


@given(st.data())
@settings(max_examples=30)
def test_extension_keeps_values_and_norm(data: st.DataObject) -> None:
    space = data.draw(metric_spaces(min_points=3))
    f = data.draw(unit_functions(space))
    keep = data.draw(
        st.lists(st.sampled_from(space.others()), min_size=1, unique=True)
    )
    domain = PointSubset(tuple(sorted({space.base, *keep})))
    direction = data.draw(st.sampled_from(list(ExtensionDirection)))
    g = mcshane_extend(f.restrict(domain), direction=direction)
    assert g.agrees_with(f, domain)
    assert lip_norm(g) <= 1


scalars = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@given(st.data())
@settings(max_examples=200, deadline=None)
def test_norm_is_homogeneous_and_subadditive(data: st.DataObject) -> None:
    space = data.draw(metric_spaces())
    f = data.draw(unit_functions(space))
    g = data.draw(unit_functions(space))
    t = data.draw(scalars)
    assert lip_norm(f.scaled(t)) == abs(t) * lip_norm(f)
    assert lip_norm(f + g) <= lip_norm(f) + lip_norm(g)
    assert lip_norm(f - g) >= abs(lip_norm(f) - lip_norm(g))
