"""Finite pointed metric spaces: model, validation, balls and generators."""

import itertools
import logging
import math
from collections import Counter
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from functools import cached_property

import numpy as np
import numpy.typing as npt

from lipnav.constants import DEFAULT_POINT_CAP, INT64_SAFE_BOUND
from lipnav.core.reports import Status, ValidationReport
from lipnav.errors import CapExceededError, PreconditionError, StructuralError
from lipnav.utils.formatting import format_scalar
from lipnav.utils.rationals import Scalar, as_fraction

logger = logging.getLogger(__name__)

PointRef = int | str
IntMatrix = npt.NDArray[np.int64] | npt.NDArray[np.object_]


@dataclass(frozen=True)
class FiniteMetricSpace:
    """A finite metric space with a distinguished base point.

    Distances are exact rationals. Construction checks shape only; use
    `validate` for the metric axioms.
    """

    points: tuple[str, ...]
    base: int
    dist: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.points)
        if len(self.dist) != n:
            raise StructuralError(
                f"distance matrix has {len(self.dist)} rows for {n} points"
            )
        for i, row in enumerate(self.dist):
            if len(row) != n:
                raise StructuralError(
                    f"row {i} ({self.points[i]}) has {len(row)} entries, expected {n}"
                )
        if len(set(self.points)) != n:
            dupes = sorted(p for p, c in Counter(self.points).items() if c > 1)
            raise StructuralError(f"duplicate point names: {', '.join(dupes)}")
        if not 0 <= self.base < max(n, 1):
            raise StructuralError(f"base index {self.base} out of range")

    @classmethod
    def create(
        cls,
        points: Sequence[str],
        dist: Sequence[Sequence[Scalar]],
        base: PointRef = 0,
    ) -> "FiniteMetricSpace":
        """Build a space from names and a matrix of rationals or strings."""
        names = tuple(str(p) for p in points)
        matrix = tuple(tuple(as_fraction(x) for x in row) for row in dist)
        if isinstance(base, str):
            if base not in names:
                raise StructuralError(f"unknown base point: {base}")
            base_index = names.index(base)
        else:
            base_index = base
        return cls(points=names, base=base_index, dist=matrix)

    @property
    def size(self) -> int:
        return len(self.points)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.points)}

    def index(self, ref: PointRef) -> int:
        """Resolve a point name or index to an index."""
        if isinstance(ref, bool):
            raise StructuralError("booleans are not point references")
        if isinstance(ref, int):
            if not 0 <= ref < self.size:
                raise StructuralError(f"point index {ref} out of range")
            return ref
        try:
            return self._index[ref]
        except KeyError:
            raise StructuralError(f"unknown point: {ref}") from None

    def name(self, ref: PointRef) -> str:
        return self.points[self.index(ref)]

    def names(self, refs: Iterable[PointRef]) -> tuple[str, ...]:
        return tuple(self.name(r) for r in refs)

    def d(self, p: PointRef, q: PointRef) -> Fraction:
        return self.dist[self.index(p)][self.index(q)]

    def others(self) -> list[int]:
        """Indices of all points except the base."""
        return [i for i in range(self.size) if i != self.base]

    @cached_property
    def scale(self) -> int:
        """Least common denominator of all distances."""
        return math.lcm(*(x.denominator for row in self.dist for x in row))

    @cached_property
    def scaled(self) -> IntMatrix:
        """Distance matrix times `scale` as an exact integer array."""
        ints = [[(x * self.scale).numerator for x in row] for row in self.dist]
        peak = max((abs(v) for row in ints for v in row), default=0)
        if peak * 64 < INT64_SAFE_BOUND:
            return np.array(ints, dtype=np.int64).reshape(self.size, self.size)
        return np.array(ints, dtype=object).reshape(self.size, self.size)

    def float_matrix(self) -> npt.NDArray[np.float64]:
        """Float view of the distances."""
        return np.array(
            [[float(x) for x in row] for row in self.dist], dtype=np.float64
        ).reshape(self.size, self.size)

    @cached_property
    def essential_pairs(self) -> tuple[tuple[int, int], ...]:
        """Unordered pairs (i, j), i < j, with no point strictly between them.

        A Lipschitz bound on these pairs implies it on every pair, so all
        unit-ball programs constrain only these.
        """
        D = self.scaled
        n = self.size
        pairs: list[tuple[int, int]] = []
        for i in range(n):
            through = D[i][:, None] + D  # through[z, j] = d(i,z) + d(z,j)
            between = through == D[i][None, :]
            between[i, :] = False
            between[np.arange(n), np.arange(n)] = False
            has_between = between.any(axis=0)
            pairs.extend((i, j) for j in range(i + 1, n) if not has_between[j])
        return tuple(pairs)

    def min_positive_distance(self) -> Fraction:
        return min(
            self.dist[i][j] for i in range(self.size) for j in range(i + 1, self.size)
        )

    def diameter(self) -> Fraction:
        return max((x for row in self.dist for x in row), default=Fraction(0))

    def subset(self, refs: Iterable[PointRef]) -> "PointSubset":
        return PointSubset.of(self, refs)

    def complement(self, subset: "PointSubset") -> "PointSubset":
        return PointSubset(tuple(i for i in range(self.size) if i not in subset))


@dataclass(frozen=True)
class PointSubset:
    """Sorted, duplicate-free member indices of a space."""

    members: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(set(self.members)) != len(self.members):
            raise StructuralError("duplicate members in point subset")
        if list(self.members) != sorted(self.members):
            object.__setattr__(self, "members", tuple(sorted(self.members)))

    @classmethod
    def of(cls, space: FiniteMetricSpace, refs: Iterable[PointRef]) -> "PointSubset":
        indices = [space.index(r) for r in refs]
        if len(set(indices)) != len(indices):
            dupes = sorted({space.points[i] for i in indices if indices.count(i) > 1})
            raise StructuralError(f"duplicate points in subset: {', '.join(dupes)}")
        return cls(tuple(sorted(indices)))

    @classmethod
    def empty(cls) -> "PointSubset":
        return cls(())

    def __contains__(self, index: object) -> bool:
        return index in self._lookup

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    @cached_property
    def _lookup(self) -> frozenset[int]:
        return frozenset(self.members)

    def isdisjoint(self, other: "PointSubset") -> bool:
        return self._lookup.isdisjoint(other._lookup)

    def difference(self, other: "PointSubset") -> "PointSubset":
        return PointSubset(tuple(i for i in self.members if i not in other))

    def names(self, space: FiniteMetricSpace) -> list[str]:
        return [space.points[i] for i in self.members]


def validate(space: FiniteMetricSpace) -> ValidationReport:
    """Check the metric axioms and report the first violation.

    Axioms are checked in order: size, zero diagonal, positivity, symmetry,
    triangle. A triangle violation is reported as (x, via, z) meaning
    d(x,z) > d(x,via) + d(via,z), scanning (x, z) lexicographically.
    """
    n = space.size
    names = space.points
    if n < 2:
        return ValidationReport(Status.FAIL, "size", names, "need at least 2 points")
    D = space.scaled
    for i in range(n):
        if D[i, i] != 0:
            return ValidationReport(
                Status.FAIL, "zero-diagonal", (names[i],),
                f"d({names[i]},{names[i]}) = {format_scalar(space.dist[i][i])}",
            )
    for i in range(n):
        for j in range(n):
            if i != j and D[i, j] <= 0:
                return ValidationReport(
                    Status.FAIL, "positivity", (names[i], names[j]),
                    f"d = {format_scalar(space.dist[i][j])}",
                )
    asym = np.argwhere(D != D.T)
    if len(asym):
        i, j = (int(x) for x in asym[0])
        i, j = min(i, j), max(i, j)
        return ValidationReport(
            Status.FAIL, "symmetry", (names[i], names[j]),
            f"{format_scalar(space.dist[i][j])} != {format_scalar(space.dist[j][i])}",
        )
    for i in range(n):
        through = D[i][:, None] + D  # through[j, k] = d(i,j) + d(j,k)
        bad = D[i][None, :] > through
        if bad.any():
            k = int(np.argmax(bad.any(axis=0)))
            j = int(np.argmax(bad[:, k]))
            x, via, z = names[i], names[j], names[k]
            lhs = space.dist[i][k]
            rhs = space.dist[i][j] + space.dist[j][k]
            return ValidationReport(
                Status.FAIL, "triangle", (x, via, z),
                f"d({x},{z}) = {format_scalar(lhs)} > {format_scalar(rhs)}"
                f" = d({x},{via}) + d({via},{z})",
            )
    return ValidationReport(Status.PASS)


def ball(
    space: FiniteMetricSpace,
    center: PointRef,
    radius: Scalar,
    closed: bool = False,
) -> PointSubset:
    """Open ball {y : d(y,center) < r}, or the closed ball with <=."""
    r = as_fraction(radius)
    if r < 0:
        raise PreconditionError(f"ball radius must be >= 0, got {format_scalar(r)}")
    c = space.index(center)
    row = space.dist[c]
    if closed:
        return PointSubset(tuple(i for i, x in enumerate(row) if x <= r))
    return PointSubset(tuple(i for i, x in enumerate(row) if x < r))


def annulus(
    space: FiniteMetricSpace, center: PointRef, outer: Scalar, inner: Scalar
) -> PointSubset:
    """B(center, outer) minus B(center, inner), both open."""
    return ball(space, center, outer).difference(ball(space, center, inner))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def _check_cap(count: int, cap: int) -> None:
    if cap <= 0:
        raise PreconditionError(f"point cap must be positive, got {cap}")
    if count > cap:
        raise CapExceededError(f"space would have {count} points, cap is {cap}")


def _from_rule(
    points: Sequence[str],
    rule: Callable[[int, int], Fraction],
    base: int = 0,
) -> FiniteMetricSpace:
    n = len(points)
    rows = []
    for i in range(n):
        rows.append(tuple(Fraction(0) if i == j else rule(i, j) for j in range(n)))
    return FiniteMetricSpace(points=tuple(points), base=base, dist=tuple(rows))


def kn_point_name(coords: Sequence[int]) -> str:
    return "-".join(str(c) for c in coords)


def parse_kn_point(name: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in name.split("-"))
    except ValueError:
        raise StructuralError(f"not a K_n point name: {name}") from None


def kn_point_count(n: int, dims: int, level_cap: int | None = None) -> int:
    """Number of points of {0..n}^dims with at most level_cap nonzero coordinates."""
    top = dims if level_cap is None else min(level_cap, dims)
    return sum(math.comb(dims, j) * n**j for j in range(top + 1))


def gen_kn(
    n: int,
    dims: int,
    level_cap: int | None = None,
    cap: int = DEFAULT_POINT_CAP,
) -> FiniteMetricSpace:
    """Grid {0..n}^dims under the max-coordinate metric, base at the origin.

    `level_cap` keeps only tuples with at most that many nonzero coordinates.
    """
    if n < 1 or dims < 1:
        raise PreconditionError(f"K_n needs n >= 1 and dims >= 1, got n={n} dims={dims}")
    if level_cap is not None and level_cap < 0:
        raise PreconditionError(f"level_cap must be >= 0, got {level_cap}")
    _check_cap(kn_point_count(n, dims, level_cap), cap)

    tuples = [
        t
        for t in itertools.product(range(n + 1), repeat=dims)
        if level_cap is None or sum(1 for c in t if c) <= level_cap
    ]
    coords = np.array(tuples, dtype=np.int64).reshape(len(tuples), dims)
    rows = []
    for i in range(len(tuples)):
        maxdiff = np.abs(coords - coords[i]).max(axis=1)
        rows.append(tuple(Fraction(int(x)) for x in maxdiff))
    logger.debug("generated K_%d with dims=%d: %d points", n, dims, len(tuples))
    return FiniteMetricSpace(
        points=tuple(kn_point_name(t) for t in tuples), base=0, dist=tuple(rows)
    )


def gen_example_sltp_not_seq(
    K: int, fresh_base: bool = True, cap: int = DEFAULT_POINT_CAP
) -> FiniteMetricSpace:
    """Points a_k, b_k, c_k (k <= K) with d(a_k,c_k) = 2, and for k < l
    d(a_k,b_l) = d(b_k,b_l) = d(c_k,b_l) = 2; every other distance is 1.

    With `fresh_base` a point "0" at distance 1 from all others is
    prepended and used as base; otherwise a1 is the base.
    """
    if K < 2:
        raise PreconditionError(f"K must be >= 2, got {K}")
    _check_cap(3 * K + int(fresh_base), cap)
    labels = [(letter, k) for k in range(1, K + 1) for letter in "abc"]
    one, two = Fraction(1), Fraction(2)

    def rule(i: int, j: int) -> Fraction:
        (p, k), (q, l) = labels[i], labels[j]
        if {p, q} == {"a", "c"} and k == l:
            return two
        if k > l:
            (p, k), (q, l) = (q, l), (p, k)
        if k < l and q == "b":
            return two
        return one

    names = [f"{p}{k}" for p, k in labels]
    if not fresh_base:
        return _from_rule(names, rule)

    def with_base(i: int, j: int) -> Fraction:
        return one if i == 0 or j == 0 else rule(i - 1, j - 1)

    return _from_rule(["0", *names], with_base)


def gen_example_seqltp_not_sltp(
    K: int, fresh_base: bool = False, cap: int = DEFAULT_POINT_CAP
) -> FiniteMetricSpace:
    """Points a1, a2, b1, b2, u_m, v_m (m <= K) with
    d(a_i,b_j) = d(a_i,u_m) = d(b_i,v_m) = d(u_m,v_m) = 1 and 2 otherwise."""
    if K < 1:
        raise PreconditionError(f"K must be >= 1, got {K}")
    _check_cap(4 + 2 * K + int(fresh_base), cap)
    labels = [("a", 1), ("a", 2), ("b", 1), ("b", 2)]
    for m in range(1, K + 1):
        labels += [("u", m), ("v", m)]
    one, two = Fraction(1), Fraction(2)

    def rule(i: int, j: int) -> Fraction:
        (p, k), (q, l) = sorted((labels[i], labels[j]))
        if (p, q) in {("a", "b"), ("a", "u"), ("b", "v")}:
            return one
        if (p, q) == ("u", "v") and k == l:
            return one
        return two

    names = [f"{p}{k}" for p, k in labels]
    if not fresh_base:
        return _from_rule(names, rule)
    return _from_rule(
        ["0", *names], lambda i, j: one if i == 0 or j == 0 else rule(i - 1, j - 1)
    )


def d2p_point_name(kind: str, j: int, m: int) -> str:
    return f"{kind}{j}_{m}"


def gen_example_d2p_not_ltp(
    K: int, fresh_base: bool = False, cap: int = DEFAULT_POINT_CAP
) -> FiniteMetricSpace:
    """Points a_i, u^i_m, v^i_m (i in 1..3, m <= K) with
    d(a_i,u^j_m) = d(a_i,v^j_m) = 1 for i != j, d(u^j_m,v^j_m) = 1, 2 otherwise.

    u^j_m is named "u{j}_{m}".
    """
    if K < 1:
        raise PreconditionError(f"K must be >= 1, got {K}")
    _check_cap(3 + 6 * K + int(fresh_base), cap)
    labels: list[tuple[str, int, int]] = [("a", i, 0) for i in (1, 2, 3)]
    for m in range(1, K + 1):
        for j in (1, 2, 3):
            labels += [("u", j, m), ("v", j, m)]
    one, two = Fraction(1), Fraction(2)

    def rule(x: int, y: int) -> Fraction:
        (p, i, m), (q, j, l) = sorted((labels[x], labels[y]))
        if p == "a" and q in "uv" and i != j:
            return one
        if (p, q) == ("u", "v") and i == j and m == l:
            return one
        return two

    names = [f"a{i}" if p == "a" else d2p_point_name(p, i, m) for p, i, m in labels]
    if not fresh_base:
        return _from_rule(names, rule)
    return _from_rule(
        ["0", *names], lambda i, j: one if i == 0 or j == 0 else rule(i - 1, j - 1)
    )


class FamilyKind(StrEnum):
    """Concrete spaces realizing the unbounded / limit-point / discrete cases."""

    UNBOUNDED = "unbounded"
    LIMIT_POINT = "limit_point"
    SHRINKING_PAIRS = "shrinking_pairs"
    DAUGAVET_REMARK = "daugavet_remark"


def real_line_space(values: Iterable[Scalar]) -> FiniteMetricSpace:
    """Subset of the real line containing 0, which becomes the base."""
    reals = sorted({as_fraction(v) for v in values})
    if Fraction(0) not in reals:
        raise StructuralError("real-line spaces must contain 0")
    rows = tuple(tuple(abs(x - y) for y in reals) for x in reals)
    return FiniteMetricSpace(
        points=tuple(format_scalar(x) for x in reals),
        base=reals.index(Fraction(0)),
        dist=rows,
    )


def gen_family(kind: FamilyKind | str, K: int, cap: int = DEFAULT_POINT_CAP) -> FiniteMetricSpace:
    """Finite realizations of the spaces used in the sequential constructions.

    unbounded: {0, 2, 4, ..., 2^K}
    limit_point: {0} and 2^-k for k <= K
    shrinking_pairs: {0} and k, k + 2^-k for k <= K
    daugavet_remark: base "0" plus p1..pK, distance 1 to base and 2 otherwise
    """
    kind = FamilyKind(kind)
    if K < 2:
        raise PreconditionError(f"K must be >= 2, got {K}")
    half = Fraction(1, 2)
    if kind is FamilyKind.UNBOUNDED:
        _check_cap(K + 1, cap)
        return real_line_space([0, *(2**k for k in range(1, K + 1))])
    if kind is FamilyKind.LIMIT_POINT:
        _check_cap(K + 1, cap)
        return real_line_space([0, *(half**k for k in range(1, K + 1))])
    if kind is FamilyKind.SHRINKING_PAIRS:
        _check_cap(2 * K + 1, cap)
        pts: list[Scalar] = [0]
        for k in range(1, K + 1):
            pts += [Fraction(k), k + half**k]
        return real_line_space(pts)
    _check_cap(K + 1, cap)
    names = ["0", *(f"p{k}" for k in range(1, K + 1))]
    return _from_rule(
        names, lambda i, j: Fraction(1) if i == 0 or j == 0 else Fraction(2)
    )
