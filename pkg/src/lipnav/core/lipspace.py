"""Lipschitz functions vanishing at the base point, their norms and extensions."""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction

from lipnav.core.linprog import LpBuilder, Relation
from lipnav.core.metric import FiniteMetricSpace, PointRef, PointSubset
from lipnav.errors import PreconditionError, StructuralError
from lipnav.utils.formatting import format_scalar
from lipnav.utils.rationals import Scalar, as_fraction

logger = logging.getLogger(__name__)

ZERO = Fraction(0)


def _same_space(a: FiniteMetricSpace, b: FiniteMetricSpace) -> None:
    if a is not b and a != b:
        raise StructuralError("functions live on different spaces")


@dataclass(frozen=True)
class LipschitzFunction:
    """Real value per point with value 0 at the base."""

    space: FiniteMetricSpace
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.space.size:
            raise StructuralError(
                f"{len(self.values)} values for a space of {self.space.size} points"
            )
        if self.values[self.space.base] != 0:
            raise StructuralError(
                f"value at base {self.space.points[self.space.base]} must be 0"
            )

    @classmethod
    def from_values(cls, space: FiniteMetricSpace, values: Iterable[Scalar]) -> "LipschitzFunction":
        return cls(space, tuple(as_fraction(v) for v in values))

    @classmethod
    def from_mapping(
        cls, space: FiniteMetricSpace, values: Mapping[PointRef, Scalar]
    ) -> "LipschitzFunction":
        """Unlisted points get value 0."""
        out = [ZERO] * space.size
        for ref, value in values.items():
            out[space.index(ref)] = as_fraction(value)
        return cls(space, tuple(out))

    @classmethod
    def zero(cls, space: FiniteMetricSpace) -> "LipschitzFunction":
        return cls(space, (ZERO,) * space.size)

    def __call__(self, ref: PointRef) -> Fraction:
        return self.values[self.space.index(ref)]

    def __add__(self, other: "LipschitzFunction") -> "LipschitzFunction":
        _same_space(self.space, other.space)
        return LipschitzFunction(self.space, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "LipschitzFunction") -> "LipschitzFunction":
        _same_space(self.space, other.space)
        return LipschitzFunction(self.space, tuple(a - b for a, b in zip(self.values, other.values)))

    def __neg__(self) -> "LipschitzFunction":
        return LipschitzFunction(self.space, tuple(-a for a in self.values))

    def scaled(self, factor: Scalar) -> "LipschitzFunction":
        k = as_fraction(factor)
        return LipschitzFunction(self.space, tuple(k * a for a in self.values))

    def slope(self, p: PointRef, q: PointRef) -> Fraction:
        """(f(p) - f(q)) / d(p, q)."""
        i, j = self.space.index(p), self.space.index(q)
        if i == j:
            raise PreconditionError("slope needs two distinct points")
        return (self.values[i] - self.values[j]) / self.space.dist[i][j]

    def restrict(self, domain: PointSubset) -> "PartialFunction":
        return PartialFunction(self.space, domain, {i: self.values[i] for i in domain})

    def agrees_with(self, other: "LipschitzFunction", on: Iterable[int]) -> bool:
        return all(self.values[i] == other.values[i] for i in on)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(self.space.points, self.values))


@dataclass(frozen=True)
class PartialFunction:
    """Values on a subset L of the space."""

    space: FiniteMetricSpace
    domain: PointSubset
    values: Mapping[int, Fraction]

    def __post_init__(self) -> None:
        if set(self.values) != set(self.domain):
            raise StructuralError("partial function values must cover exactly its domain")
        base = self.space.base
        if base in self.domain and self.values[base] != 0:
            raise StructuralError("a partial function defined at the base must vanish there")

    @classmethod
    def from_mapping(
        cls, space: FiniteMetricSpace, values: Mapping[PointRef, Scalar]
    ) -> "PartialFunction":
        indexed = {space.index(ref): as_fraction(v) for ref, v in values.items()}
        return cls(space, PointSubset(tuple(sorted(indexed))), indexed)

    def __call__(self, ref: PointRef) -> Fraction:
        return self.values[self.space.index(ref)]

    def with_value(self, ref: PointRef, value: Scalar) -> "PartialFunction":
        i = self.space.index(ref)
        updated = dict(self.values)
        updated[i] = as_fraction(value)
        return PartialFunction(self.space, PointSubset(tuple(sorted(updated))), updated)


@dataclass(frozen=True)
class DeLeeuwVector:
    """Slopes (f(x) - f(y)) / d(x, y) indexed by ordered pairs x != y."""

    space: FiniteMetricSpace
    values: Mapping[tuple[int, int], Fraction]

    def __post_init__(self) -> None:
        n = self.space.size
        if len(self.values) != n * (n - 1) or any(i == j for i, j in self.values):
            raise StructuralError("de Leeuw vectors are indexed by all off-diagonal pairs")

    def __getitem__(self, pair: tuple[PointRef, PointRef]) -> Fraction:
        return self.values[(self.space.index(pair[0]), self.space.index(pair[1]))]

    def sup_norm(self) -> Fraction:
        return max((abs(v) for v in self.values.values()), default=ZERO)


def lip_norm(f: LipschitzFunction) -> Fraction:
    """Lipschitz constant max |f(x) - f(y)| / d(x, y).

    The maximum over all pairs is attained on an essential pair, so only
    those are scanned.
    """
    return lip_norm_with_pair(f)[0]


def lip_norm_with_pair(f: LipschitzFunction) -> tuple[Fraction, tuple[int, int] | None]:
    """Lipschitz constant and an essential pair attaining it."""
    best, where = ZERO, None
    dist, vals = f.space.dist, f.values
    for i, j in f.space.essential_pairs:
        slope = abs(vals[i] - vals[j]) / dist[i][j]
        if slope > best:
            best, where = slope, (i, j)
    return best, where


def lip_norm_on(pf: PartialFunction) -> Fraction:
    """Lipschitz constant of a partial function over its own domain."""
    members = list(pf.domain)
    dist = pf.space.dist
    best = ZERO
    for a, i in enumerate(members):
        for j in members[a + 1 :]:
            best = max(best, abs(pf.values[i] - pf.values[j]) / dist[i][j])
    return best


def de_leeuw(f: LipschitzFunction) -> DeLeeuwVector:
    """Transform f to its slopes on ordered pairs; sup norm equals lip_norm(f)."""
    n = f.space.size
    values = {
        (i, j): (f.values[i] - f.values[j]) / f.space.dist[i][j]
        for i in range(n)
        for j in range(n)
        if i != j
    }
    return DeLeeuwVector(f.space, values)


class ExtensionDirection(StrEnum):
    SUP = "sup"
    INF = "inf"


def _require_slope_lipschitz(pf: PartialFunction, slope: Fraction) -> None:
    members = list(pf.domain)
    dist, names = pf.space.dist, pf.space.points
    for a, i in enumerate(members):
        for j in members[a + 1 :]:
            gap = abs(pf.values[i] - pf.values[j])
            if gap > slope * dist[i][j]:
                raise PreconditionError(
                    f"partial function is not {format_scalar(slope)}-Lipschitz on its domain:"
                    f" |f({names[i]}) - f({names[j]})| = {format_scalar(gap)}"
                    f" > {format_scalar(slope * dist[i][j])}"
                )


def _require_base(pf: PartialFunction) -> None:
    if pf.space.base not in pf.domain:
        raise PreconditionError("extension domain must contain the base point")


def mcshane_value(
    pf: PartialFunction,
    target: PointRef,
    slope: Scalar = 1,
    direction: ExtensionDirection | str = ExtensionDirection.SUP,
) -> Fraction:
    """Single-point McShane/Whitney formula over the domain of `pf`."""
    k = as_fraction(slope)
    y = pf.space.index(target)
    row = pf.space.dist[y]
    if ExtensionDirection(direction) is ExtensionDirection.SUP:
        return max(pf.values[x] - k * row[x] for x in pf.domain)
    return min(pf.values[x] + k * row[x] for x in pf.domain)


def mcshane_extend(
    pf: PartialFunction,
    slope: Scalar = 1,
    direction: ExtensionDirection | str = ExtensionDirection.SUP,
) -> LipschitzFunction:
    """Extend a slope-Lipschitz partial function to the whole space.

    sup: y -> max_x (pf(x) - slope d(x,y)); inf: y -> min_x (pf(x) + slope d(x,y)).
    Both agree with pf on its domain and keep the Lipschitz constant.
    """
    k = as_fraction(slope)
    if k <= 0:
        raise PreconditionError(f"slope must be positive, got {format_scalar(k)}")
    _require_base(pf)
    _require_slope_lipschitz(pf, k)
    values = [
        pf.values[y] if y in pf.domain else mcshane_value(pf, y, k, direction)
        for y in range(pf.space.size)
    ]
    return LipschitzFunction(pf.space, tuple(values))


def weighted_mcshane_extend(pf: PartialFunction, weights: Mapping[int, Scalar]) -> LipschitzFunction:
    """Extend by y -> max_{x in L} (pf(x) + w(x) - d(x, y)) off the domain L.

    Requires base in L, nonnegative weights on exactly L and pf 1-Lipschitz
    on L. Whether a companion function stays jointly in the unit ball is
    for the caller to verify.
    """
    _require_base(pf)
    if set(weights) != set(pf.domain):
        raise PreconditionError("weights must be given on exactly the domain of the partial function")
    w = {x: as_fraction(v) for x, v in weights.items()}
    negative = [pf.space.points[x] for x, v in w.items() if v < 0]
    if negative:
        raise PreconditionError(f"weights must be nonnegative, negative at {', '.join(negative)}")
    _require_slope_lipschitz(pf, Fraction(1))
    dist = pf.space.dist
    values = []
    for y in range(pf.space.size):
        if y in pf.domain:
            values.append(pf.values[y])
        else:
            values.append(max(pf.values[x] + w[x] - dist[x][y] for x in pf.domain))
    return LipschitzFunction(pf.space, tuple(values))


def add_ball_block(builder: LpBuilder, space: FiniteMetricSpace, label: str = "f") -> dict[int, int]:
    """Add variables f(x), x != base, constrained to the Lipschitz unit ball.

    Lower bounds -d(x, base) are implied by the ball and keep every shifted
    right-hand side nonnegative. Returns point index -> variable index.
    """
    base = space.base
    var: dict[int, int] = {}
    for x in space.others():
        var[x] = builder.add_variable(f"{label}[{space.points[x]}]", lower=-space.dist[x][base])
    for i, j in space.essential_pairs:
        d = space.dist[i][j]
        forward: dict[int, int] = {}
        if i != base:
            forward[var[i]] = 1
        if j != base:
            forward[var[j]] = -1
        builder.add_row(forward, Relation.LE, d)
        builder.add_row({k: -c for k, c in forward.items()}, Relation.LE, d)
    return var


def function_from_primal(
    space: FiniteMetricSpace, var: Mapping[int, int], primal: tuple[Fraction, ...]
) -> LipschitzFunction:
    values = [ZERO] * space.size
    for x, j in var.items():
        values[x] = primal[j]
    return LipschitzFunction(space, tuple(values))
