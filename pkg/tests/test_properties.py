"""Tests for the trapezoid inequalities, finite searches, the balls lemma and locality."""

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lipnav.core.families import annulus_outer_radius, pair_family
from lipnav.core.lipspace import LipschitzFunction
from lipnav.core.metric import (
    FamilyKind,
    FiniteMetricSpace,
    PointSubset,
    gen_example_d2p_not_ltp,
    gen_family,
)
from lipnav.core.properties import (
    TrapezoidWitness,
    WitnessFamily,
    check_balls_lemma,
    check_family,
    check_local,
    check_ltp_finite,
    check_ltp_inequality,
    check_sltp_finite,
    check_sltp_inequality,
)
from lipnav.errors import PreconditionError, StructuralError
from lipnav.utils.rationals import parse_rational
from tests.strategies import metric_spaces


def _below(space: FiniteMetricSpace, K: int) -> PointSubset:
    return PointSubset.of(
        space, [f"{p}{k}" for k in range(1, K - 1) for p in "abc"]
    )


class TestSeqltpExample:
    def test_pair_passes_ltp_at_zero(self, seqltp_space: FiniteMetricSpace) -> None:
        w = TrapezoidWitness.create(seqltp_space, ["u1", "v1"], "u1", "v1", 0)
        assert check_ltp_inequality(seqltp_space, w).passed

    def test_pair_fails_sltp_at_zero(self, seqltp_space: FiniteMetricSpace) -> None:
        w = TrapezoidWitness.create(seqltp_space, ["u1", "v1"], "u1", "v1", 0)
        report = check_sltp_inequality(seqltp_space, w)
        assert not report.passed
        assert report.extra["worst_slack"] < 0
        assert report.violations[0].label == "worst"


class TestSltpExample:
    def test_late_pair_is_a_witness(self, sltp_space: FiniteMetricSpace) -> None:
        N = _below(sltp_space, 6)
        candidates = [("b5", "b6")]
        assert check_ltp_finite(sltp_space, N, 0, candidates).passed
        report = check_sltp_finite(sltp_space, N, 0, candidates)
        assert report.passed
        assert report.witness == {"u": "b5", "v": "b6"}

    def test_no_early_pair_survives(self, sltp_space: FiniteMetricSpace) -> None:
        N = PointSubset.of(sltp_space, ["a6", "b6", "c6"])
        early = [
            (p, q)
            for p in sltp_space.points[1:16]
            for q in sltp_space.points[1:16]
            if p != q
        ]
        report = check_ltp_finite(sltp_space, N, Fraction(3, 10), early, max_violations=len(early))
        assert not report.passed
        assert len(report.violations) == len(early)
        assert all(set(v.points[2:]) == {"a6", "c6"} for v in report.violations)
        assert "exhaustive" in report.notes[0]

    def test_pairs_are_not_a_sequential_family(self, sltp_space: FiniteMetricSpace) -> None:
        fam = pair_family(sltp_space, [("a1", "b1"), ("a2", "b2"), ("a3", "b3")], Fraction(3, 10))
        report = check_family(sltp_space, fam, kinds=["ltp"])
        assert not report.passed
        assert report.violations


def test_d2p_example_fails_finite_ltp() -> None:
    space = gen_example_d2p_not_ltp(2)
    N = PointSubset.of(space, ["a1", "a2", "a3"])
    report = check_ltp_finite(space, N, Fraction(1, 4))
    assert not report.passed
    assert report.notes[-1].startswith("exhaustive")


def test_epsilon_range_is_checked(seqltp_space: FiniteMetricSpace) -> None:
    with pytest.raises(PreconditionError):
        TrapezoidWitness.create(seqltp_space, ["u1", "v1"], "u1", "v1", 1)
    with pytest.raises(PreconditionError):
        check_ltp_finite(seqltp_space, PointSubset.empty(), -1)
    with pytest.raises(PreconditionError, match="lie in A"):
        TrapezoidWitness.create(seqltp_space, ["u1"], "u1", "v1", 0)


def test_vacuous_when_A_is_everything(two_point: FiniteMetricSpace) -> None:
    w = TrapezoidWitness.create(two_point, ["0", "p"], "0", "p", 0)
    report = check_ltp_inequality(two_point, w)
    assert report.passed
    assert "vacuous" in report.notes[0]


def test_family_overlap_is_reported(seqltp_space: FiniteMetricSpace) -> None:
    fam = pair_family(seqltp_space, [("u1", "v1"), ("v1", "b2")], 0)
    report = check_family(seqltp_space, fam)
    assert not report.passed
    assert report.extra["overlaps"] == [{"members": [1, 2], "shared": ["v1"]}]
    with pytest.raises(PreconditionError):
        check_family(seqltp_space, fam, kinds=["wide"])


def test_family_members_share_epsilon(seqltp_space: FiniteMetricSpace) -> None:
    w = TrapezoidWitness.create(seqltp_space, ["u1", "v1"], "u1", "v1", 0)
    with pytest.raises(StructuralError):
        WitnessFamily((w,), Fraction(1, 2))
    assert WitnessFamily.of([w], Fraction(1, 2)).members[0].epsilon == Fraction(1, 2)


class TestBallsLemma:
    def test_unbounded_annulus(self) -> None:
        space = gen_family(FamilyKind.UNBOUNDED, 12)
        report = check_balls_lemma(space, "0", 64, 1, "8", "16", Fraction(1, 2))
        assert report.passed
        assert report.extra["conclusions"] == {"ltp": "pass", "sltp": "pass"}
        assert report.extra["A"] == ["2", "4", "8", "16", "32"]

    def test_failed_hypothesis_leaves_conclusions_open(self) -> None:
        space = gen_family(FamilyKind.UNBOUNDED, 6)
        report = check_balls_lemma(space, "0", 16, 1, "4", "8", Fraction(1, 2))
        assert not report.passed
        assert report.extra["conclusions"] == "not asserted"
        assert report.extra["hypotheses"]["far_points"] == "fail"

    def test_radii_preconditions(self) -> None:
        space = gen_family(FamilyKind.UNBOUNDED, 6)
        with pytest.raises(PreconditionError):
            check_balls_lemma(space, "0", 4, 8, "4", "8", Fraction(1, 2))
        with pytest.raises(PreconditionError, match="not in"):
            check_balls_lemma(space, "0", 8, 1, "4", "8", Fraction(1, 2))

    @given(st.data())
    @settings(max_examples=500, deadline=None)
    def test_conclusions_follow_from_hypotheses(self, data: st.DataObject) -> None:
        space = data.draw(metric_spaces(min_points=3, max_points=7, max_weight=9))
        eps = data.draw(
            st.fractions(min_value=Fraction(1, 10), max_value=Fraction(9, 10), max_denominator=10)
        )
        p, u, v = data.draw(st.lists(st.sampled_from(space.points), min_size=3, max_size=3))
        assume(u != v)
        s = eps * space.d(u, v) / 4
        assume(space.d(p, u) >= s and space.d(p, v) >= s)
        r = annulus_outer_radius(space, p, u, v, eps)
        report = check_balls_lemma(space, p, r, s, u, v, eps)
        assert report.passed


class TestLocal:
    def test_identity_on_shrinking_pairs(self) -> None:
        space = gen_family(FamilyKind.SHRINKING_PAIRS, 4)
        f = LipschitzFunction.from_values(space, [parse_rational(x) for x in space.points])
        report = check_local(space, f, Fraction(1, 8))
        assert report.passed
        assert report.witness is not None
        assert report.witness["distance"] == Fraction(1, 16)

    def test_uniformly_discrete_space_fails_vacuously(self) -> None:
        space = gen_family(FamilyKind.DAUGAVET_REMARK, 4)
        f = LipschitzFunction.from_mapping(space, {"p1": 1})
        report = check_local(space, f, Fraction(1, 2))
        assert not report.passed
        assert "vacuously" in report.notes[0]

    def test_epsilon_must_be_positive(self, two_point: FiniteMetricSpace) -> None:
        with pytest.raises(PreconditionError):
            check_local(two_point, LipschitzFunction.zero(two_point), 0)
