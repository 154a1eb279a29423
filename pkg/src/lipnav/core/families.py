"""Constructors for disjoint witness families.

Each helper realizes one shape of excluded set: point pairs, the K_n
coordinate-pair sets, growing annuli around a point (unbounded spaces),
shrinking annuli around a point (limit points) and small balls around
separated pairs (no limit points).
"""

import itertools
import logging
from collections.abc import Sequence
from fractions import Fraction

from lipnav.core.metric import FiniteMetricSpace, PointRef, PointSubset, annulus, ball, kn_point_name, parse_kn_point
from lipnav.core.properties import AnnulusShape, TrapezoidWitness, WitnessFamily, far_point_violations
from lipnav.errors import GeometricPreconditionError, PreconditionError
from lipnav.utils.formatting import format_scalar
from lipnav.utils.rationals import Scalar, as_fraction

logger = logging.getLogger(__name__)

ZERO = Fraction(0)


def _positive_eps(epsilon: Scalar) -> Fraction:
    eps = as_fraction(epsilon)
    if not 0 < eps < 1:
        raise PreconditionError(f"epsilon must be in (0, 1), got {format_scalar(eps)}")
    return eps


def pair_family(
    space: FiniteMetricSpace,
    pairs: Sequence[tuple[PointRef, PointRef]],
    epsilon: Scalar,
) -> WitnessFamily:
    """A_m = {u_m, v_m}."""
    eps = as_fraction(epsilon)
    members = [TrapezoidWitness.create(space, (u, v), u, v, eps) for u, v in pairs]
    return WitnessFamily(tuple(members), eps)


def kn_coordinate_set(space: FiniteMetricSpace, n: int, m: int) -> PointSubset:
    """Points whose top coordinate value n is reached only in coordinates 2m-1, 2m."""
    free = {2 * m - 2, 2 * m - 1}
    members = []
    for i, name in enumerate(space.points):
        coords = parse_kn_point(name)
        if max(coords) == n and all(c < n for j, c in enumerate(coords) if j not in free):
            members.append(i)
    return PointSubset(tuple(members))


def kn_family(
    space: FiniteMetricSpace, n: int, count: int, epsilon: Scalar = 0
) -> WitnessFamily:
    """Witnesses u_m = n e_{2m-1} + (n-1) e_{2m}, v_m its mirror, m = 1..count.

    `space` must come from `gen_kn(n, dims, level_cap)` with dims >= 2*count
    and a level cap of at least 2 (so u_m and v_m are present).
    """
    if n < 1 or count < 0:
        raise PreconditionError(f"need n >= 1 and count >= 0, got n={n} count={count}")
    dims = len(parse_kn_point(space.points[0]))
    if dims < 2 * count:
        raise PreconditionError(f"{count} coordinate pairs need dims >= {2 * count}, got {dims}")
    eps = as_fraction(epsilon)
    members = []
    for m in range(1, count + 1):
        u = [0] * dims
        v = [0] * dims
        u[2 * m - 2], u[2 * m - 1] = n, n - 1
        v[2 * m - 2], v[2 * m - 1] = n - 1, n
        names = [kn_point_name(u), kn_point_name(v)]
        missing = [x for x in names if x not in space.points]
        if missing:
            raise PreconditionError(
                f"points {', '.join(missing)} are missing; use level_cap >= 2"
            )
        A = kn_coordinate_set(space, n, m)
        members.append(TrapezoidWitness(A, space.index(names[0]), space.index(names[1]), eps))
    return WitnessFamily(tuple(members), eps)


def annulus_outer_radius(
    space: FiniteMetricSpace,
    p: PointRef,
    u: PointRef,
    v: PointRef,
    epsilon: Scalar,
) -> Fraction:
    """Smallest distance level r from p beyond u and v such that every x with
    d(p,x) >= r has 2d(u,v) <= eps min(d(x,u), d(x,v)).

    Returns diameter + 1 when no level qualifies (the outside is then empty).
    """
    eps = as_fraction(epsilon)
    ip, iu, iv = space.index(p), space.index(u), space.index(v)
    row = space.dist[ip]
    worst = max(row[iu], row[iv], *(row[x] for x in far_point_violations(space, ip, 0, iu, iv, eps)))
    levels = sorted({d for d in row if d > worst})
    if levels:
        return levels[0]
    return space.diameter() + 1


def annulus_family(
    space: FiniteMetricSpace,
    epsilon: Scalar,
    p: PointRef | None = None,
    count: int | None = None,
    start: Scalar = 1,
) -> WitnessFamily:
    """Growing annuli A_m = B(p, r_m) minus B(p, r_{m-1}) with r_0 = `start`.

    Each step takes the pair u, v outside B(p, r_{m-1}) with
    4 r_{m-1} <= eps d(u,v) that sits closest to p (ties: shorter pair,
    then index order), then the least admissible r_m.
    """
    eps = _positive_eps(epsilon)
    center = space.base if p is None else space.index(p)
    row = space.dist[center]
    previous = as_fraction(start)
    members: list[TrapezoidWitness] = []
    notes = [f"r_0 = {format_scalar(previous)}"]
    while count is None or len(members) < count:
        options = [
            (max(row[u], row[v]), space.dist[u][v], u, v)
            for u, v in itertools.combinations(range(space.size), 2)
            if row[u] >= previous and row[v] >= previous
            and 4 * previous <= eps * space.dist[u][v]
        ]
        if not options:
            break
        _, _, u, v = min(options)
        outer = annulus_outer_radius(space, center, u, v, eps)
        shape = AnnulusShape(center, outer, previous)
        members.append(TrapezoidWitness(shape.members(space), u, v, eps, shape))
        notes.append(f"r_{len(members)} = {format_scalar(outer)}")
        logger.debug(
            "annulus member %d: u=%s v=%s r=%s",
            len(members), space.points[u], space.points[v], format_scalar(outer),
        )
        previous = outer
    return WitnessFamily(tuple(members), eps, tuple(notes))


def limit_point_family(
    space: FiniteMetricSpace,
    epsilon: Scalar,
    p: PointRef | None = None,
    count: int | None = None,
    start: Scalar = 1,
) -> WitnessFamily:
    """Shrinking annuli A_m = B(p, r_m) minus B(p, r_{m+1}) with r_1 = `start`.

    Inside B(p, r_m) minus {p}, candidates are scanned farthest first and
    the first pair meeting the far-point hypothesis is taken; then
    r_{m+1} = min(eps d(u,v) / 4, d(p,u), d(p,v)).
    """
    eps = _positive_eps(epsilon)
    center = space.base if p is None else space.index(p)
    row = space.dist[center]
    radius = as_fraction(start)
    members: list[TrapezoidWitness] = []
    notes = [f"r_1 = {format_scalar(radius)}"]
    while count is None or len(members) < count:
        inside = sorted(
            (x for x in ball(space, center, radius) if x != center),
            key=lambda x: (-row[x], x),
        )
        chosen = next(
            (
                (u, v)
                for u, v in itertools.combinations(inside, 2)
                if not far_point_violations(space, center, radius, u, v, eps)
            ),
            None,
        )
        if chosen is None:
            break
        u, v = chosen
        inner = min(eps * space.dist[u][v] / 4, row[u], row[v])
        shape = AnnulusShape(center, radius, inner)
        members.append(TrapezoidWitness(annulus(space, center, radius, inner), u, v, eps, shape))
        notes.append(f"r_{len(members) + 1} = {format_scalar(inner)}")
        radius = inner
    return WitnessFamily(tuple(members), eps, tuple(notes))


def ball_family(
    space: FiniteMetricSpace,
    pairs: Sequence[tuple[PointRef, PointRef]],
    epsilon: Scalar,
    r: Scalar | None = None,
) -> WitnessFamily:
    """Balls A_m = B(u_m, r) around separated pairs.

    By default r is half the least distance between distinct u_m. Each pair
    must have v_m in B(u_m, r) and 4 d(u_m, v_m) <= eps r.
    """
    eps = _positive_eps(epsilon)
    resolved = [(space.index(u), space.index(v)) for u, v in pairs]
    if r is None:
        if len(resolved) < 2:
            raise PreconditionError("a default radius needs at least two pairs")
        radius = min(space.dist[a][b] for (a, _), (b, _) in itertools.combinations(resolved, 2)) / 2
    else:
        radius = as_fraction(r)
    if radius <= 0:
        raise GeometricPreconditionError(f"ball radius must be positive, got {format_scalar(radius)}")
    members = []
    for u, v in resolved:
        duv = space.dist[u][v]
        names = f"({space.points[u]}, {space.points[v]})"
        if not duv < radius:
            raise GeometricPreconditionError(
                f"pair {names}: d(u,v) = {format_scalar(duv)} is not < r = {format_scalar(radius)}"
            )
        if not 4 * duv <= eps * radius:
            raise GeometricPreconditionError(
                f"pair {names}: 4 d(u,v) = {format_scalar(4 * duv)} > eps r = {format_scalar(eps * radius)}"
            )
        shape = AnnulusShape(u, radius, ZERO)
        members.append(TrapezoidWitness(shape.members(space), u, v, eps, shape))
    return WitnessFamily(tuple(members), eps, (f"r = {format_scalar(radius)}",))
