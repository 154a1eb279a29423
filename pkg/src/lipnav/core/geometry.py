"""Slice diameters, convex combinations of slices and Daugavet gaps.

Every quantity here is a norm, so it is a maximum over essential pairs
(p, q) of a linear objective. Each pair gets its own small program and the
outer maximum is taken in pair order, first maximum winning.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from lipnav.core.freespace import FreeVector, free_norm_dual, pair_with_molecule
from lipnav.core.linprog import (
    DEFAULT_TOLERANCES,
    LpBuilder,
    LpStatus,
    Relation,
    Sense,
    SolveMode,
    Tolerances,
    solve,
)
from lipnav.core.lipspace import LipschitzFunction, add_ball_block, function_from_primal, lip_norm
from lipnav.core.metric import FiniteMetricSpace, PointRef
from lipnav.core.reports import DiameterResult
from lipnav.errors import NumericBreakdownError, PreconditionError, WeightError
from lipnav.utils.formatting import format_scalar
from lipnav.utils.rationals import Scalar, as_fraction

logger = logging.getLogger(__name__)

ZERO = Fraction(0)


@dataclass(frozen=True)
class SliceSpec:
    """Closed slice {f : ||f|| <= 1, F(f) >= 1 - alpha} with F of free norm 1."""

    functional: FreeVector
    alpha: Fraction
    norming: LipschitzFunction

    @classmethod
    def create(
        cls,
        F: FreeVector,
        alpha: Scalar,
        mode: SolveMode | str = SolveMode.EXACT,
        tolerances: Tolerances = DEFAULT_TOLERANCES,
    ) -> "SliceSpec":
        """Normalize F and keep a function where it attains its norm."""
        depth = as_fraction(alpha)
        if not ZERO < depth <= 2:
            raise PreconditionError(f"slice depth must be in (0, 2], got {format_scalar(depth)}")
        norm, norming = free_norm_dual(F, mode, tolerances)
        if norm <= tolerances.margin(SolveMode.parse(mode)):
            raise PreconditionError("a slice needs a nonzero functional")
        return cls(F.scaled(1 / norm), depth, norming)

    @property
    def space(self) -> FiniteMetricSpace:
        return self.functional.space

    def contains(self, f: LipschitzFunction, margin: Fraction = ZERO) -> bool:
        return lip_norm(f) - 1 <= margin and 1 - self.alpha - self.functional.apply(f) <= margin

    def to_dict(self) -> dict[str, object]:
        return {"F": self.functional.as_dict(), "alpha": self.alpha}


def _checked(space: FiniteMetricSpace, slices: Sequence[SliceSpec]) -> None:
    if not slices:
        raise PreconditionError("need at least one slice")
    for s in slices:
        if s.space is not space and s.space != space:
            raise PreconditionError("slice functional lives on a different space")


def _slice_row(builder: LpBuilder, var: dict[int, int], s: SliceSpec, sign: int = 1) -> None:
    builder.add_row(
        {j: sign * s.functional.weights[x] for x, j in var.items()},
        Relation.GE,
        1 - s.alpha,
    )


def _optimum(
    builder: LpBuilder, mode: SolveMode, tolerances: Tolerances, what: str
) -> tuple[Fraction, tuple[Fraction, ...]]:
    solution = solve(builder.build(), mode, tolerances)
    if solution.status is not LpStatus.OPTIMAL or solution.value is None:
        raise NumericBreakdownError(f"{what} program reported {solution.status}")
    return solution.value, solution.primal


def slice_spread(
    s: SliceSpec,
    p: int,
    q: int,
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[Fraction, LipschitzFunction]:
    """max f(p) - f(q) over the closed slice, with a maximizer."""
    mode = SolveMode.parse(mode)
    space = s.space
    builder = LpBuilder(Sense.MAXIMIZE)
    var = add_ball_block(builder, space)
    _slice_row(builder, var, s)
    if p in var:
        builder.set_cost(var[p], 1)
    if q in var:
        builder.set_cost(var[q], -1)
    value, primal = _optimum(builder, mode, tolerances, "slice")
    return value, function_from_primal(space, var, primal)


def _params(mode: SolveMode, tolerances: Tolerances) -> dict[str, object]:
    return {"mode": str(mode), "tolerances": tolerances.to_dict()}


def slice_diameter(
    space: FiniteMetricSpace,
    s: SliceSpec,
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> DiameterResult:
    """sup ||f - g|| over f, g in the closed slice.

    For a fixed pair the program in (f, g) separates, so its optimum is
    spread(p, q) + spread(q, p) with f and g the two maximizers.
    """
    return combo_diameter(space, [s], [1], mode, tolerances, kind="slice")


def _weights(lambdas: Sequence[Scalar], n: int) -> list[Fraction]:
    if n == 0:
        raise WeightError("need at least one slice")
    if len(lambdas) != n:
        raise WeightError(f"{len(lambdas)} weights for {n} slices")
    weights = [as_fraction(x) for x in lambdas]
    negative = [format_scalar(x) for x in weights if x < 0]
    if negative:
        raise WeightError(f"weights must be nonnegative, got {', '.join(negative)}")
    total = sum(weights, ZERO)
    if total != 1:
        raise WeightError(f"weights must sum to 1, got {format_scalar(total)}")
    return weights


def combo_diameter(
    space: FiniteMetricSpace,
    slices: Sequence[SliceSpec],
    lambdas: Sequence[Scalar],
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    kind: str = "combo",
) -> DiameterResult:
    """sup ||sum l_i f_i - sum l_i g_i|| over f_i, g_i in S_i."""
    weights = _weights(lambdas, len(slices))
    _checked(space, slices)
    mode = SolveMode.parse(mode)
    best: tuple[Fraction, tuple[int, int], list[LipschitzFunction], list[LipschitzFunction]] | None = None
    for p, q in space.essential_pairs:
        total = ZERO
        tops, bottoms = [], []
        for lam, s in zip(weights, slices):
            up, f = slice_spread(s, p, q, mode, tolerances)
            down, g = slice_spread(s, q, p, mode, tolerances)
            total += lam * (up + down)
            tops.append(f)
            bottoms.append(g)
        value = total / space.dist[p][q]
        if best is None or value > best[0]:
            best = (value, (p, q), tops, bottoms)
    assert best is not None
    value, (p, q), tops, bottoms = best
    logger.debug("%s diameter %s at (%s, %s)", kind, format_scalar(value), space.points[p], space.points[q])
    functions: dict[str, dict[str, Fraction]] = {}
    if len(slices) == 1:
        functions = {"f": tops[0].as_dict(), "g": bottoms[0].as_dict()}
    else:
        for i, (f, g) in enumerate(zip(tops, bottoms), start=1):
            functions[f"f{i}"] = f.as_dict()
            functions[f"g{i}"] = g.as_dict()
    return DiameterResult(
        kind,
        value,
        (space.points[p], space.points[q]),
        functions,
        str(mode),
        tolerances.to_dict(),
        parameters={
            "slices": [s.to_dict() for s in slices],
            "lambdas": weights,
        },
        extra={"pairs_solved": len(space.essential_pairs)},
    )


def ssd2p_witness_value(
    space: FiniteMetricSpace,
    slices: Sequence[SliceSpec],
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> DiameterResult:
    """Largest ||g|| with f_i and f_i +- g in S_i for every i.

    For each essential pair the program maximizes g(p) - g(q) with every
    f_i + g and f_i - g in the unit ball and in the slice. Replacing g by
    -g keeps the program feasible, so unordered pairs suffice.
    """
    _checked(space, slices)
    mode = SolveMode.parse(mode)
    base = space.base
    best: tuple[Fraction, tuple[int, int], LipschitzFunction, list[LipschitzFunction]] | None = None
    for p, q in space.essential_pairs:
        builder = LpBuilder(Sense.MAXIMIZE)
        gv = {
            x: builder.add_variable(f"g[{space.points[x]}]", lower=-space.dist[x][base])
            for x in space.others()
        }
        blocks = []
        for i, s in enumerate(slices, start=1):
            fv = {
                x: builder.add_variable(f"f{i}[{space.points[x]}]", lower=-space.dist[x][base])
                for x in space.others()
            }
            blocks.append(fv)
            for a, b in space.essential_pairs:
                d = space.dist[a][b]
                for sf in (1, -1):
                    for sg in (1, -1):
                        row: dict[int, Scalar] = {}
                        if a != base:
                            row[fv[a]] = sf
                            row[gv[a]] = sf * sg
                        if b != base:
                            row[fv[b]] = -sf
                            row[gv[b]] = -sf * sg
                        builder.add_row(row, Relation.LE, d)
            weights = s.functional.weights
            for sg in (1, -1):
                row = {}
                for x in space.others():
                    row[fv[x]] = weights[x]
                    row[gv[x]] = sg * weights[x]
                builder.add_row(row, Relation.GE, 1 - s.alpha)
        if p in gv:
            builder.set_cost(gv[p], 1)
        if q in gv:
            builder.set_cost(gv[q], -1)
        value, primal = _optimum(builder, mode, tolerances, "symmetric witness")
        value /= space.dist[p][q]
        if best is None or value > best[0]:
            g = function_from_primal(space, gv, primal)
            fs = [function_from_primal(space, fv, primal) for fv in blocks]
            best = (value, (p, q), g, fs)
    assert best is not None
    value, (p, q), g, fs = best
    functions = {"g": g.as_dict()}
    for i, f in enumerate(fs, start=1):
        functions[f"f{i}"] = f.as_dict()
    return DiameterResult(
        "ssd2p",
        value,
        (space.points[p], space.points[q]),
        functions,
        str(mode),
        tolerances.to_dict(),
        parameters={"slices": [s.to_dict() for s in slices]},
        extra={"pairs_solved": len(space.essential_pairs)},
    )


def daugavet_gap(
    space: FiniteMetricSpace,
    f: LipschitzFunction,
    s: SliceSpec,
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> DiameterResult:
    """sup ||f - g|| over g in the closed slice, for f of norm one.

    Over ordered pairs the value is (f(p) - f(q) + spread(q, p)) / d(p, q).
    """
    _checked(space, [s])
    mode = SolveMode.parse(mode)
    norm = lip_norm(f)
    if abs(norm - 1) > tolerances.margin(mode):
        raise PreconditionError(f"f must have norm 1, got {format_scalar(norm)}")
    best: tuple[Fraction, tuple[int, int], LipschitzFunction] | None = None
    for a, b in space.essential_pairs:
        for p, q in ((a, b), (b, a)):
            spread, g = slice_spread(s, q, p, mode, tolerances)
            value = (f.values[p] - f.values[q] + spread) / space.dist[p][q]
            if best is None or value > best[0]:
                best = (value, (p, q), g)
    assert best is not None
    value, (p, q), g = best
    return DiameterResult(
        "daugavet",
        value,
        (space.points[p], space.points[q]),
        {"f": f.as_dict(), "g": g.as_dict()},
        str(mode),
        tolerances.to_dict(),
        parameters={"slice": s.to_dict()},
        extra={"pairs_solved": 2 * len(space.essential_pairs)},
    )


@dataclass(frozen=True)
class MoleculeGap:
    u: str
    v: str
    distance: Fraction
    value: Fraction

    def to_dict(self) -> dict[str, object]:
        return {"u": self.u, "v": self.v, "distance": self.distance, "value": self.value}


def molecule_gap_sequence(
    space: FiniteMetricSpace,
    F: FreeVector,
    pairs: Sequence[tuple[PointRef, PointRef]],
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> list[MoleculeGap]:
    """||F + m_{u,v}|| per pair, longest pairs first. F must have norm 1."""
    mode = SolveMode.parse(mode)
    norm, _ = free_norm_dual(F, mode, tolerances)
    if abs(norm - 1) > tolerances.margin(mode):
        raise PreconditionError(f"F must have norm 1, got {format_scalar(norm)}")
    gaps = []
    for u, v in pairs:
        iu, iv = space.index(u), space.index(v)
        if iu == iv:
            raise PreconditionError(f"pair ({space.points[iu]}, {space.points[iv]}) repeats a point")
        value = pair_with_molecule(F, iu, iv, mode, tolerances)
        gaps.append(MoleculeGap(space.points[iu], space.points[iv], space.dist[iu][iv], value))
    gaps.sort(key=lambda gap: gap.distance, reverse=True)
    return gaps
