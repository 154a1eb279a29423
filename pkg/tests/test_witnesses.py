"""Tests for the witness builders and the Daugavet construction."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lipnav.core.freespace import FreeVector
from lipnav.core.lipspace import LipschitzFunction, lip_norm
from lipnav.core.metric import FamilyKind, FiniteMetricSpace, gen_family
from lipnav.core.witnesses import (
    DaugavetCase,
    build_d2p_pair_example,
    build_daugavet_function,
    build_sd2p_witness,
    build_ssd2p_witness,
    check_daugavet_estimate,
    choose_radii,
    daugavet_theta,
)
from lipnav.errors import GeometricPreconditionError, IntervalEmptyError, PreconditionError
from tests.strategies import shrunk_functions, witness_instances

HALF = Fraction(1, 2)
TENTH = Fraction(1, 10)
SUPPORT = ("1", "3/2", "2", "9/4")

# random (space, A, u, v, delta, h) draws per builder
BUILDER_EXAMPLES = 100


class TestSymmetricWitness:
    def test_radii_and_bumps(self, seqltp_space: FiniteMetricSpace) -> None:
        zero = LipschitzFunction.zero(seqltp_space)
        trace = build_ssd2p_witness(seqltp_space, ["u1", "v1"], "u1", "v1", HALF, [zero])
        assert (trace.r0, trace.s0) == (HALF, HALF)
        assert (trace.r, trace.s, trace.swapped) == (HALF, 0, False)
        assert trace.g("u1") == HALF
        assert trace.g("v1") == 0
        assert trace.constants == [0]
        f = trace.functions[0]
        assert f("u1") == 0
        assert f("v1") == -HALF
        assert trace.passed, trace.postconditions

    def test_several_functions(self, seqltp_space: FiniteMetricSpace) -> None:
        h = [
            LipschitzFunction.zero(seqltp_space),
            LipschitzFunction.from_mapping(seqltp_space, {"a2": "1/2", "b1": "1/4"}),
        ]
        trace = build_ssd2p_witness(seqltp_space, ["u1", "v1"], "u1", "v1", HALF, h)
        assert len(trace.functions) == 2
        assert trace.passed, trace.postconditions

    def test_strong_inequality_is_required(self, seqltp_space: FiniteMetricSpace) -> None:
        zero = LipschitzFunction.zero(seqltp_space)
        with pytest.raises(PreconditionError, match="sltp"):
            build_ssd2p_witness(seqltp_space, ["u1", "v1"], "u1", "v1", Fraction(1, 4), [zero])

    def test_preconditions(self, seqltp_space: FiniteMetricSpace) -> None:
        zero = LipschitzFunction.zero(seqltp_space)
        with pytest.raises(PreconditionError, match="base"):
            build_ssd2p_witness(seqltp_space, ["a1", "u1", "v1"], "u1", "v1", HALF, [zero])
        steep = LipschitzFunction.from_mapping(seqltp_space, {"a2": 2})
        with pytest.raises(PreconditionError, match="norm"):
            build_ssd2p_witness(seqltp_space, ["u1", "v1"], "u1", "v1", HALF, [steep])
        with pytest.raises(PreconditionError, match="delta"):
            build_ssd2p_witness(seqltp_space, ["u1", "v1"], "u1", "v1", 1, [zero])

    def test_interval_error_is_a_precondition_error(self) -> None:
        assert issubclass(IntervalEmptyError, PreconditionError)


def test_choose_radii() -> None:
    assert choose_radii(HALF, HALF, HALF) == (HALF, 0, False)
    assert choose_radii(0, 1, HALF) == (HALF, 0, True)
    assert choose_radii(Fraction(1, 4), 1, HALF) == (Fraction(1, 4), Fraction(1, 4), False)
    with pytest.raises(PreconditionError):
        choose_radii(Fraction(1, 4), Fraction(1, 4), 1)


def test_strong_witness(seqltp_space: FiniteMetricSpace) -> None:
    zero = LipschitzFunction.zero(seqltp_space)
    trace = build_sd2p_witness(seqltp_space, ["u1", "v1"], "u1", "v1", Fraction(1, 4), [zero])
    f = trace.functions[0]
    assert f("u1") == 1
    assert f("v1") == 0
    assert trace.passed, trace.postconditions


@given(st.data())
@settings(max_examples=BUILDER_EXAMPLES, deadline=None)
def test_symmetric_builder_on_random_instances(data: st.DataObject) -> None:
    space, A, u, v, delta = data.draw(witness_instances(seqltp_delta=HALF))
    h = data.draw(shrunk_functions(space, delta))
    trace = build_ssd2p_witness(space, A, u, v, delta, h)
    assert trace.passed, trace.postconditions

    rest = space.complement(A).members
    g = trace.g
    assert 1 - delta <= lip_norm(g) <= 1
    assert all(g.values[x] == 0 for x in rest)
    for f, hi in zip(trace.functions, h, strict=True):
        assert lip_norm(f + g) <= 1
        assert lip_norm(f - g) <= 1
        assert f.agrees_with(hi, rest)


@given(st.data())
@settings(max_examples=BUILDER_EXAMPLES, deadline=None)
def test_strong_builder_on_random_instances(data: st.DataObject) -> None:
    space, A, u, v, delta = data.draw(witness_instances())
    h = data.draw(shrunk_functions(space, delta))
    trace = build_sd2p_witness(space, A, u, v, delta, h)
    assert trace.passed, trace.postconditions

    rest = space.complement(A).members
    for f, hi in zip(trace.functions, h, strict=True):
        assert lip_norm(f) <= 1
        assert f(u) - f(v) >= (1 - delta) * space.dist[u][v]
        assert f.agrees_with(hi, rest)


class TestD2pPair:
    def test_flat_h(self, d2p_space: FiniteMetricSpace) -> None:
        example = build_d2p_pair_example(d2p_space, Fraction(1, 4))
        assert (example.k, example.c) == (3, 0)
        assert d2p_space.points[example.u] == "u3_2"
        assert example.f("u3_2") == 1 and example.g("v3_2") == 1
        assert example.difference_norm == 2
        assert example.passed, example.postconditions

    def test_steep_h(self, d2p_space: FiniteMetricSpace) -> None:
        h = LipschitzFunction.from_mapping(
            d2p_space,
            {"a2": "3/2", "a3": "3/2", **{x: 1 for x in d2p_space.points if x[0] in "uv"}},
        )
        example = build_d2p_pair_example(d2p_space, Fraction(1, 4), h, m=1)
        assert (example.k, example.c) == (1, 1)
        assert example.passed, example.postconditions

    def test_norm_of_h_is_checked(self, d2p_space: FiniteMetricSpace) -> None:
        h = LipschitzFunction.from_mapping(d2p_space, {"a2": 3})
        with pytest.raises(PreconditionError):
            build_d2p_pair_example(d2p_space, Fraction(1, 4), h)

    def test_needs_anchor_points(self, seqltp_space: FiniteMetricSpace) -> None:
        with pytest.raises(PreconditionError, match="a1, a2, a3"):
            build_d2p_pair_example(seqltp_space, Fraction(1, 4))


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100)))
@settings(max_examples=50)
def test_theta_is_the_largest_admissible_reciprocal(delta: Fraction) -> None:
    theta = daugavet_theta(delta)
    assert theta.numerator == 1
    assert theta / (1 - theta) < delta / 2
    bigger = Fraction(1, theta.denominator - 1)
    assert bigger / (1 - bigger) >= delta / 2


def test_theta_for_a_tenth() -> None:
    assert daugavet_theta(TENTH) == Fraction(1, 22)


class TestDaugavet:
    def test_disjoint_balls(self) -> None:
        space = gen_family(FamilyKind.SHRINKING_PAIRS, 6)
        h = LipschitzFunction.zero(space)
        trace = build_daugavet_function(space, SUPPORT, h, "4", "65/16", TENTH, DaugavetCase.DISJOINT_BALLS)
        assert trace.r == Fraction(7, 4)
        assert trace.theta == Fraction(1, 22)
        assert trace.f("65/16") == Fraction(-9, 160)
        assert trace.passed, trace.postconditions

    def test_wide_pair_is_rejected(self) -> None:
        space = gen_family(FamilyKind.SHRINKING_PAIRS, 6)
        h = LipschitzFunction.zero(space)
        with pytest.raises(GeometricPreconditionError, match="theta r"):
            build_daugavet_function(space, SUPPORT, h, "3", "25/8", TENTH, "disjoint_balls")

    def test_fixed_u(self) -> None:
        space = gen_family(FamilyKind.LIMIT_POINT, 8)
        h = LipschitzFunction.zero(space)
        trace = build_daugavet_function(space, ["1/2"], h, "0", "1/256", TENTH, DaugavetCase.FIXED_U)
        assert trace.r == HALF
        assert trace.f("1/256") == Fraction(-9, 2560)
        assert trace.passed, trace.postconditions

    def test_converging(self) -> None:
        space = gen_family(FamilyKind.LIMIT_POINT, 8)
        h = LipschitzFunction.zero(space)
        trace = build_daugavet_function(
            space, ["1/2"], h, "1/128", "1/256", TENTH, DaugavetCase.CONVERGING, center="0"
        )
        assert trace.f("1/128") == Fraction(9, 1280)
        assert trace.f("1/256") == Fraction(9, 2560)
        assert trace.passed, trace.postconditions

    def test_converging_needs_a_center(self) -> None:
        space = gen_family(FamilyKind.LIMIT_POINT, 8)
        h = LipschitzFunction.zero(space)
        with pytest.raises(PreconditionError, match="center"):
            build_daugavet_function(space, ["1/2"], h, "1/128", "1/256", TENTH, "converging")

    def test_estimate_on_a_molecule(self) -> None:
        space = gen_family(FamilyKind.SHRINKING_PAIRS, 6)
        F = FreeVector.molecule(space, "1", "9/4")
        report = check_daugavet_estimate(space, F, "4", "65/16", TENTH, DaugavetCase.DISJOINT_BALLS)
        assert report.passed, report.extra
        assert report.extra["gamma_first"] == 0
        assert report.extra["gamma_second"] == 0
        assert report.extra["F_f"] == Fraction(9, 10)
        assert report.extra["norm_F_plus_molecule"] >= Fraction(9, 5)

    def test_estimate_needs_norm_one(self) -> None:
        space = gen_family(FamilyKind.SHRINKING_PAIRS, 6)
        F = FreeVector.molecule(space, "1", "9/4").scaled(2)
        with pytest.raises(PreconditionError, match="norm 1"):
            check_daugavet_estimate(space, F, "4", "65/16", TENTH, "disjoint_balls")
