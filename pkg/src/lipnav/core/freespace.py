"""Functionals on Lip_0(M): free-space vectors, Kantorovich-Rubinstein norms and
minimal de Leeuw representations."""

import logging
from collections.abc import Mapping
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction

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
from lipnav.core.lipspace import LipschitzFunction, add_ball_block, function_from_primal
from lipnav.core.metric import FiniteMetricSpace, PointRef, PointSubset
from lipnav.errors import NumericBreakdownError, PreconditionError, StructuralError
from lipnav.utils.rationals import Scalar, as_fraction

logger = logging.getLogger(__name__)

ZERO = Fraction(0)


@dataclass(frozen=True)
class FreeVector:
    """Weights on the points; the base weight is set so the total mass is zero.

    Evaluation is F(f) = sum_x F(x) f(x). Since f(base) = 0 the base weight
    never changes a value or a norm.
    """

    space: FiniteMetricSpace
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.weights) != self.space.size:
            raise StructuralError(
                f"{len(self.weights)} weights for a space of {self.space.size} points"
            )
        base = self.space.base
        balance = -sum((w for i, w in enumerate(self.weights) if i != base), ZERO)
        if self.weights[base] != balance:
            canonical = list(self.weights)
            canonical[base] = balance
            object.__setattr__(self, "weights", tuple(canonical))

    @classmethod
    def create(cls, space: FiniteMetricSpace, weights: Mapping[PointRef, Scalar]) -> "FreeVector":
        out = [ZERO] * space.size
        for ref, w in weights.items():
            out[space.index(ref)] += as_fraction(w)
        return cls(space, tuple(out))

    @classmethod
    def zero(cls, space: FiniteMetricSpace) -> "FreeVector":
        return cls(space, (ZERO,) * space.size)

    @classmethod
    def delta(cls, space: FiniteMetricSpace, x: PointRef) -> "FreeVector":
        return cls.create(space, {x: 1})

    @classmethod
    def molecule(cls, space: FiniteMetricSpace, u: PointRef, v: PointRef) -> "FreeVector":
        """(delta_u - delta_v) / d(u, v)."""
        i, j = space.index(u), space.index(v)
        if i == j:
            raise PreconditionError("a molecule needs two distinct points")
        d = space.dist[i][j]
        return cls.create(space, {i: 1 / d, j: -1 / d})

    def __add__(self, other: "FreeVector") -> "FreeVector":
        self._check(other)
        return FreeVector(self.space, tuple(a + b for a, b in zip(self.weights, other.weights)))

    def __sub__(self, other: "FreeVector") -> "FreeVector":
        self._check(other)
        return FreeVector(self.space, tuple(a - b for a, b in zip(self.weights, other.weights)))

    def __neg__(self) -> "FreeVector":
        return FreeVector(self.space, tuple(-a for a in self.weights))

    def scaled(self, factor: Scalar) -> "FreeVector":
        k = as_fraction(factor)
        return FreeVector(self.space, tuple(k * a for a in self.weights))

    def _check(self, other: "FreeVector") -> None:
        if self.space is not other.space and self.space != other.space:
            raise StructuralError("free vectors live on different spaces")

    def __call__(self, f: LipschitzFunction) -> Fraction:
        return self.apply(f)

    def apply(self, f: LipschitzFunction) -> Fraction:
        return sum((w * v for w, v in zip(self.weights, f.values)), ZERO)

    def support(self) -> PointSubset:
        """Non-base points carrying weight."""
        base = self.space.base
        return PointSubset(tuple(i for i, w in enumerate(self.weights) if w and i != base))

    def is_zero(self) -> bool:
        return not any(self.weights)

    def as_dict(self) -> dict[str, Fraction]:
        return {self.space.points[i]: w for i, w in enumerate(self.weights) if w}


@dataclass(frozen=True)
class TransportPlan:
    """Nonnegative flow on ordered pairs whose net outflow matches a FreeVector."""

    space: FiniteMetricSpace
    flows: Mapping[tuple[int, int], Fraction]

    def cost(self) -> Fraction:
        return sum((m * self.space.dist[i][j] for (i, j), m in self.flows.items()), ZERO)

    def net_outflow(self) -> tuple[Fraction, ...]:
        out = [ZERO] * self.space.size
        for (i, j), m in self.flows.items():
            out[i] += m
            out[j] -= m
        return tuple(out)

    def as_dict(self) -> dict[str, Fraction]:
        names = self.space.points
        return {f"{names[i]}->{names[j]}": m for (i, j), m in sorted(self.flows.items())}


@dataclass(frozen=True)
class DeLeeuwMeasure:
    """Signed weights on ordered pairs (x, y), x != y, acting by sum mu(x,y) f~(x,y)."""

    space: FiniteMetricSpace
    weights: Mapping[tuple[int, int], Fraction]

    def __post_init__(self) -> None:
        if any(i == j for i, j in self.weights):
            raise StructuralError("de Leeuw measures live off the diagonal")

    def total_variation(self) -> Fraction:
        return sum((abs(m) for m in self.weights.values()), ZERO)

    def apply(self, f: LipschitzFunction) -> Fraction:
        dist, vals = self.space.dist, f.values
        return sum(
            (m * (vals[i] - vals[j]) / dist[i][j] for (i, j), m in self.weights.items()),
            ZERO,
        )

    def as_dict(self) -> dict[str, Fraction]:
        names = self.space.points
        return {f"({names[i]},{names[j]})": m for (i, j), m in sorted(self.weights.items())}


class GammaSide(StrEnum):
    FIRST = "first"
    SECOND = "second"
    UNION = "union"


def free_norm_dual(
    F: FreeVector,
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[Fraction, LipschitzFunction]:
    """max F(f) over the Lipschitz unit ball; returns the value and a maximizer."""
    space = F.space
    builder = LpBuilder(Sense.MAXIMIZE)
    var = add_ball_block(builder, space)
    for x, j in var.items():
        builder.set_cost(j, F.weights[x])
    solution = solve(builder.build(), mode, tolerances)
    if solution.status is not LpStatus.OPTIMAL or solution.value is None:
        raise NumericBreakdownError(f"unit-ball program reported {solution.status}")
    return solution.value, function_from_primal(space, var, solution.primal)


def free_norm_primal(
    F: FreeVector,
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[Fraction, TransportPlan]:
    """Min-cost flow on the complete graph whose net outflow at x is F(x).

    The base row is dropped; conservation there follows from total mass zero.
    """
    space = F.space
    if F.is_zero():
        return ZERO, TransportPlan(space, {})
    builder = LpBuilder(Sense.MINIMIZE)
    arcs: dict[int, tuple[int, int]] = {}
    n = space.size
    for i in range(n):
        for j in range(n):
            if i != j:
                k = builder.add_variable(
                    f"t[{space.points[i]}->{space.points[j]}]", cost=space.dist[i][j]
                )
                arcs[k] = (i, j)
    balance: dict[int, dict[int, Scalar]] = {x: {} for x in space.others()}
    for k, (i, j) in arcs.items():
        if i in balance:
            balance[i][k] = 1
        if j in balance:
            balance[j][k] = -1
    for x, coeffs in balance.items():
        builder.add_row(coeffs, Relation.EQ, F.weights[x])
    solution = solve(builder.build(), mode, tolerances)
    if solution.status is not LpStatus.OPTIMAL or solution.value is None:
        raise NumericBreakdownError(f"transport program reported {solution.status}")
    flows = {arcs[k]: m for k, m in enumerate(solution.primal) if m}
    return solution.value, TransportPlan(space, flows)


def min_tv_representation(
    F: FreeVector,
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> DeLeeuwMeasure:
    """A de Leeuw measure of least total variation that acts as F.

    Actions are matched on the point-indicator basis e_p (p != base). A
    negative weight on (x, y) is the same as a positive one on (y, x), so
    weights are sought as nonnegative numbers on ordered pairs.
    """
    space = F.space
    if F.is_zero():
        return DeLeeuwMeasure(space, {})
    builder = LpBuilder(Sense.MINIMIZE)
    pairs: dict[int, tuple[int, int]] = {}
    n = space.size
    for i in range(n):
        for j in range(n):
            if i != j:
                k = builder.add_variable(f"mu[{space.points[i]},{space.points[j]}]", cost=1)
                pairs[k] = (i, j)
    action: dict[int, dict[int, Scalar]] = {p: {} for p in space.others()}
    for k, (i, j) in pairs.items():
        d = space.dist[i][j]
        if i in action:
            action[i][k] = 1 / d
        if j in action:
            action[j][k] = -1 / d
    for p, coeffs in action.items():
        builder.add_row(coeffs, Relation.EQ, F.weights[p])
    solution = solve(builder.build(), mode, tolerances)
    if solution.status is not LpStatus.OPTIMAL:
        raise NumericBreakdownError(f"representation program reported {solution.status}")
    return DeLeeuwMeasure(space, {pairs[k]: m for k, m in enumerate(solution.primal) if m})


def gamma_mass(
    mu: DeLeeuwMeasure, A: PointSubset, side: GammaSide | str = GammaSide.FIRST
) -> Fraction:
    """|mu| restricted to pairs with first coordinate in A, second in A, or either."""
    side = GammaSide(side)
    total = ZERO
    for (x, y), m in mu.weights.items():
        first, second = x in A, y in A
        if side is GammaSide.FIRST:
            hit = first
        elif side is GammaSide.SECOND:
            hit = second
        else:
            hit = first or second
        if hit:
            total += abs(m)
    return total


def pair_with_molecule(
    F: FreeVector,
    u: PointRef,
    v: PointRef,
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Fraction:
    """||F + m_{u,v}||."""
    if F.space.index(u) == F.space.index(v):
        raise PreconditionError("pair_with_molecule needs u != v")
    return free_norm_dual(F + FreeVector.molecule(F.space, u, v), mode, tolerances)[0]
