"""Tests for the disjoint witness family constructors."""

from fractions import Fraction

import pytest

from lipnav.core.families import (
    annulus_family,
    annulus_outer_radius,
    ball_family,
    kn_coordinate_set,
    kn_family,
    limit_point_family,
    pair_family,
)
from lipnav.core.metric import FamilyKind, FiniteMetricSpace, gen_family, gen_kn
from lipnav.core.properties import WitnessFamily, check_family
from lipnav.errors import GeometricPreconditionError, PreconditionError

HALF = Fraction(1, 2)


def _pairs(fam: WitnessFamily, space: FiniteMetricSpace) -> list[tuple[str, str]]:
    return [(space.points[w.u], space.points[w.v]) for w in fam.members]


def test_unbounded_annuli() -> None:
    space = gen_family(FamilyKind.UNBOUNDED, 12)
    fam = annulus_family(space, HALF)
    assert _pairs(fam, space) == [("8", "16"), ("512", "1024")]
    outers = [w.shape.outer for w in fam.members if w.shape is not None]
    assert outers == [64, 4096]
    assert fam.members[0].A.names(space) == ["2", "4", "8", "16", "32"]
    assert check_family(space, fam).passed


def test_annulus_count_limit() -> None:
    space = gen_family(FamilyKind.UNBOUNDED, 12)
    assert len(annulus_family(space, HALF, count=1)) == 1


def test_outer_radius_clears_far_points() -> None:
    space = gen_family(FamilyKind.UNBOUNDED, 12)
    assert annulus_outer_radius(space, "0", "8", "16", HALF) == 64
    tiny = gen_family(FamilyKind.UNBOUNDED, 3)
    assert annulus_outer_radius(tiny, "0", "4", "8", HALF) == tiny.diameter() + 1


def test_limit_point_annuli() -> None:
    space = gen_family(FamilyKind.LIMIT_POINT, 8)
    fam = limit_point_family(space, HALF)
    assert _pairs(fam, space) == [("1/2", "1/4"), ("1/128", "1/256")]
    inners = [w.shape.inner for w in fam.members if w.shape is not None]
    assert inners == [Fraction(1, 32), Fraction(1, 2048)]
    assert check_family(space, fam).passed


def test_ball_family_on_shrinking_pairs() -> None:
    space = gen_family(FamilyKind.SHRINKING_PAIRS, 6)
    pairs = [(str(k), f"{2**k * k + 1}/{2**k}") for k in (4, 5, 6)]
    fam = ball_family(space, pairs, HALF)
    assert fam.notes == ("r = 1/2",)
    assert all(len(w.A) == 2 for w in fam.members)
    assert check_family(space, fam).passed


def test_ball_family_rejects_wide_pairs() -> None:
    space = gen_family(FamilyKind.SHRINKING_PAIRS, 6)
    with pytest.raises(GeometricPreconditionError, match="4 d"):
        ball_family(space, [("3", "25/8"), ("4", "65/16")], HALF)
    with pytest.raises(PreconditionError):
        ball_family(space, [("4", "65/16")], HALF)
    with pytest.raises(PreconditionError):
        ball_family(space, [("4", "65/16"), ("5", "161/32")], 0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_kn_family_is_disjoint_and_passes(n: int) -> None:
    space = gen_kn(n, 6, level_cap=2)
    fam = kn_family(space, n, 3)
    assert len(fam) == 3
    assert not fam.overlaps()
    assert check_family(space, fam).passed


def test_kn_coordinate_set_membership() -> None:
    space = gen_kn(2, 4, level_cap=2)
    names = kn_coordinate_set(space, 2, 1).names(space)
    assert "2-1-0-0" in names and "1-2-0-0" in names and "2-0-0-0" in names
    assert "2-0-2-0" not in names
    assert all(not name.startswith("0-0") for name in names)


def test_kn_family_needs_the_witness_points() -> None:
    with pytest.raises(PreconditionError, match="level_cap"):
        kn_family(gen_kn(2, 4, level_cap=1), 2, 2)
    with pytest.raises(PreconditionError, match="dims"):
        kn_family(gen_kn(2, 4, level_cap=2), 2, 3)


def test_pair_family_members() -> None:
    space = gen_family(FamilyKind.DAUGAVET_REMARK, 4)
    fam = pair_family(space, [("p1", "p2"), ("p3", "p4")], Fraction(1, 4))
    assert [w.A.names(space) for w in fam.members] == [["p1", "p2"], ["p3", "p4"]]
    assert fam.epsilon == Fraction(1, 4)
