"""Explicit witness functions for the diameter-two and Daugavet constructions.

Every builder returns a trace carrying the functions it built together with
a `postconditions` map; a build that cannot even start (bad radii, empty
interval, violated metric inequality) raises a PreconditionError instead.
"""

import logging
import math
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction

from lipnav.core.freespace import (
    FreeVector,
    GammaSide,
    free_norm_dual,
    gamma_mass,
    min_tv_representation,
    pair_with_molecule,
)
from lipnav.core.linprog import (
    DEFAULT_TOLERANCES,
    SolveMode,
    Tolerances,
    at_most,
    strictly_greater,
)
from lipnav.core.lipspace import (
    ExtensionDirection,
    LipschitzFunction,
    PartialFunction,
    lip_norm,
    mcshane_extend,
    weighted_mcshane_extend,
)
from lipnav.core.metric import FiniteMetricSpace, PointRef, PointSubset, annulus, ball
from lipnav.core.properties import TrapezoidWitness, check_ltp_inequality, check_sltp_inequality
from lipnav.core.reports import PropertyReport, Status, Violation
from lipnav.errors import GeometricPreconditionError, IntervalEmptyError, PreconditionError
from lipnav.utils.formatting import format_scalar
from lipnav.utils.rationals import Scalar, as_fraction

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


def _delta(delta: Scalar) -> Fraction:
    d = as_fraction(delta)
    if not ZERO < d < ONE:
        raise PreconditionError(f"delta must be in (0, 1), got {format_scalar(d)}")
    return d


def _subset(space: FiniteMetricSpace, A: PointSubset | Iterable[PointRef]) -> PointSubset:
    return A if isinstance(A, PointSubset) else PointSubset.of(space, A)


def _require_base_outside(space: FiniteMetricSpace, A: PointSubset) -> None:
    if space.base in A:
        raise PreconditionError(
            f"base point {space.points[space.base]} must lie outside the excluded set"
        )


def _require_norm_at_most(hs: Sequence[LipschitzFunction], bound: Fraction) -> None:
    for i, h in enumerate(hs, start=1):
        norm = lip_norm(h)
        if norm > bound:
            raise PreconditionError(
                f"h_{i} has norm {format_scalar(norm)} > {format_scalar(bound)}"
            )


def _require_inequality(report: PropertyReport) -> None:
    if not report.passed:
        first = report.violations[0]
        raise PreconditionError(
            f"{report.check} fails at ({', '.join(first.points)}):"
            f" {format_scalar(first.lhs)} > {format_scalar(first.rhs)}"
        )


# ---------------------------------------------------------------------------
# Symmetric strong witness
# ---------------------------------------------------------------------------


@dataclass
class WitnessBuildTrace:
    """Radii, constants and functions of one symmetric witness build."""

    space: FiniteMetricSpace
    A: PointSubset
    u: int
    v: int
    delta: Fraction
    r0: Fraction
    s0: Fraction
    r: Fraction
    s: Fraction
    swapped: bool
    g: LipschitzFunction
    functions: list[LipschitzFunction]
    constants: list[Fraction]
    intervals: list[dict[str, Fraction]]
    postconditions: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.postconditions.values())

    def to_dict(self) -> dict[str, object]:
        names = self.space.points
        return {
            "A": self.A.names(self.space),
            "u": names[self.u],
            "v": names[self.v],
            "delta": self.delta,
            "r0": self.r0,
            "s0": self.s0,
            "r": self.r,
            "s": self.s,
            "swapped": self.swapped,
            "g": self.g.as_dict(),
            "functions": [f.as_dict() for f in self.functions],
            "constants": list(self.constants),
            "intervals": list(self.intervals),
            "postconditions": {k: str(Status.of(ok)) for k, ok in self.postconditions.items()},
        }


def choose_radii(r0: Scalar, s0: Scalar, budget: Scalar) -> tuple[Fraction, Fraction, bool]:
    """Split `budget` into r <= r0 and s <= s0 with r > 0.

    r takes as much as it can; when that leaves r = 0 the roles of the two
    centers are swapped, which the third value reports.
    """
    a, b, total = as_fraction(r0), as_fraction(s0), as_fraction(budget)
    if a + b < total:
        raise PreconditionError(
            f"r0 + s0 = {format_scalar(a + b)} < (1-delta) d(u,v) = {format_scalar(total)}"
        )
    r = min(a, total)
    if r > 0:
        return r, total - r, False
    r = min(b, total)
    return r, total - r, True


def _half_infimum(space: FiniteMetricSpace, rest: Sequence[int], center: int, keep: Fraction) -> Fraction:
    dist = space.dist
    return min(
        dist[x][center] + dist[y][center] - keep * dist[x][y] for x in rest for y in rest
    ) / 2


def build_ssd2p_witness(
    space: FiniteMetricSpace,
    A: PointSubset | Iterable[PointRef],
    u: PointRef,
    v: PointRef,
    delta: Scalar,
    h: Sequence[LipschitzFunction],
) -> WitnessBuildTrace:
    """Build g and f_i with f_i +- g in the unit ball, g vanishing off A.

    g is a tent of height r at u and a pit of depth s at v with
    r + s = (1-delta) d(u,v); f_i copies h_i off A and takes the midpoint
    c_i of its admissible interval on the two balls, then extends by the
    |g|-weighted sup formula.
    """
    d = _delta(delta)
    subset = _subset(space, A)
    iu, iv = space.index(u), space.index(v)
    _require_base_outside(space, subset)
    _require_norm_at_most(h, 1 - d)
    witness = TrapezoidWitness(subset, iu, iv, d)
    _require_inequality(check_ltp_inequality(space, witness, max_violations=1))
    _require_inequality(check_sltp_inequality(space, witness))

    rest = space.complement(subset).members
    keep = 1 - d
    r0 = _half_infimum(space, rest, iu, keep)
    s0 = _half_infimum(space, rest, iv, keep)
    budget = keep * space.dist[iu][iv]
    r, s, swapped = choose_radii(r0, s0, budget)
    if swapped:
        iu, iv, r0, s0 = iv, iu, s0, r0
    logger.debug(
        "ssd2p radii r0=%s s0=%s r=%s s=%s",
        format_scalar(r0), format_scalar(s0), format_scalar(r), format_scalar(s),
    )

    dist = space.dist
    near_u = ball(space, iu, r)
    near_v = ball(space, iv, s)
    g_values = []
    for x in range(space.size):
        if x in near_u:
            g_values.append(r - dist[x][iu])
        elif x in near_v:
            g_values.append(dist[x][iv] - s)
        else:
            g_values.append(ZERO)
    g = LipschitzFunction(space, tuple(g_values))
    bumps = sorted(set(near_u) | set(near_v))
    domain = sorted(set(rest) | set(bumps))
    weights = {x: abs(g.values[x]) for x in domain}

    functions, constants, intervals = [], [], []
    for i, hi in enumerate(h, start=1):
        a_lo = max(hi.values[x] - dist[x][iu] for x in rest)
        a_hi = min(hi.values[x] + dist[x][iu] for x in rest)
        b_lo = max(hi.values[x] - dist[x][iv] for x in rest)
        b_hi = min(hi.values[x] + dist[x][iv] for x in rest)
        low, high = max(a_lo + r, b_lo + s), min(a_hi - r, b_hi - s)
        intervals.append({"a_lo": a_lo, "a_hi": a_hi, "b_lo": b_lo, "b_hi": b_hi})
        if low > high:
            raise IntervalEmptyError(
                f"no constant for h_{i}: lower end {format_scalar(low)}"
                f" > upper end {format_scalar(high)}"
            )
        c = (low + high) / 2
        constants.append(c)
        values = {x: hi.values[x] for x in rest}
        values.update({x: c for x in bumps})
        pf = PartialFunction(space, PointSubset(tuple(domain)), values)
        functions.append(weighted_mcshane_extend(pf, weights))

    trace = WitnessBuildTrace(
        space, subset, iu, iv, d, r0, s0, r, s, swapped, g, functions, constants, intervals
    )
    g_norm = lip_norm(g)
    trace.postconditions = {
        "radii_sum": r + s == budget and r <= r0 and s <= s0 and r > 0,
        "g_vanishes_off_A": all(g.values[x] == 0 for x in rest),
        "g_norm_in_range": 1 - d <= g_norm <= 1,
        "f_restricts_to_h": all(f.agrees_with(hi, rest) for f, hi in zip(functions, h)),
        "f_plus_minus_g_in_ball": all(
            lip_norm(f + g) <= 1 and lip_norm(f - g) <= 1 for f in functions
        ),
    }
    if not trace.passed:
        logger.warning("ssd2p postconditions failed: %s", trace.postconditions)
    return trace


# ---------------------------------------------------------------------------
# Strong witness (inf at u, then sup)
# ---------------------------------------------------------------------------


@dataclass
class Sd2pTrace:
    space: FiniteMetricSpace
    A: PointSubset
    u: int
    v: int
    delta: Fraction
    functions: list[LipschitzFunction]
    postconditions: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.postconditions.values())

    def to_dict(self) -> dict[str, object]:
        return {
            "A": self.A.names(self.space),
            "u": self.space.points[self.u],
            "v": self.space.points[self.v],
            "delta": self.delta,
            "functions": [f.as_dict() for f in self.functions],
            "postconditions": {k: str(Status.of(ok)) for k, ok in self.postconditions.items()},
        }


def build_sd2p_witness(
    space: FiniteMetricSpace,
    A: PointSubset | Iterable[PointRef],
    u: PointRef,
    v: PointRef,
    delta: Scalar,
    h: Sequence[LipschitzFunction],
) -> Sd2pTrace:
    """f_i = h_i off A, f_i(u) = min_x (h_i(x) + d(x,u)), then the sup extension."""
    d = _delta(delta)
    subset = _subset(space, A)
    iu, iv = space.index(u), space.index(v)
    _require_base_outside(space, subset)
    _require_norm_at_most(h, 1 - d)
    _require_inequality(
        check_ltp_inequality(space, TrapezoidWitness(subset, iu, iv, d), max_violations=1)
    )
    rest = space.complement(subset).members
    dist = space.dist
    functions = []
    for hi in h:
        top = min(hi.values[x] + dist[x][iu] for x in rest)
        values = {x: hi.values[x] for x in rest}
        values[iu] = top
        pf = PartialFunction(space, PointSubset(tuple(sorted(values))), values)
        functions.append(mcshane_extend(pf, 1, ExtensionDirection.SUP))
    trace = Sd2pTrace(space, subset, iu, iv, d, functions)
    target = (1 - d) * dist[iu][iv]
    trace.postconditions = {
        "norm_at_most_one": all(lip_norm(f) <= 1 for f in functions),
        "f_restricts_to_h": all(f.agrees_with(hi, rest) for f, hi in zip(functions, h)),
        "gap_at_uv": all(f.values[iu] - f.values[iv] >= target for f in functions),
    }
    return trace


# ---------------------------------------------------------------------------
# Pair example for the plain diameter-two property
# ---------------------------------------------------------------------------


@dataclass
class D2pPairExample:
    space: FiniteMetricSpace
    f: LipschitzFunction
    g: LipschitzFunction
    u: int
    v: int
    A: PointSubset
    k: int
    c: Fraction
    floor: Fraction
    delta: Fraction
    difference_norm: Fraction
    postconditions: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.postconditions.values())

    def to_dict(self) -> dict[str, object]:
        return {
            "u": self.space.points[self.u],
            "v": self.space.points[self.v],
            "A": self.A.names(self.space),
            "k": self.k,
            "c": self.c,
            "L": self.floor,
            "delta": self.delta,
            "f": self.f.as_dict(),
            "g": self.g.as_dict(),
            "norm_f_minus_g": self.difference_norm,
            "bound": 2 * (1 - self.delta),
            "postconditions": {k: str(Status.of(ok)) for k, ok in self.postconditions.items()},
        }


_PAIR_NAME = re.compile(r"^u(\d)_(\d+)$")


def build_d2p_pair_example(
    space: FiniteMetricSpace,
    delta: Scalar,
    h: LipschitzFunction | None = None,
    m: int | None = None,
) -> D2pPairExample:
    """Pick k, c by where h puts a1, a2, a3 and flip the pair u^k_m, v^k_m.

    With the a's sorted by h and L = min h: if the middle value is at most
    L + 1, k is the top a and c = L; otherwise k is the bottom a and
    c = L + 1. Then f = h off A with f(u) = c + 1, f(v) = c, and g is f
    with u and v exchanged. `m` defaults to the largest available index.
    """
    d = _delta(delta)
    h = h if h is not None else LipschitzFunction.zero(space)
    if lip_norm(h) > 1:
        raise PreconditionError(f"h has norm {format_scalar(lip_norm(h))} > 1")
    try:
        anchors = {j: space.index(f"a{j}") for j in (1, 2, 3)}
    except Exception as exc:
        raise PreconditionError("space has no points a1, a2, a3") from exc
    order = sorted(anchors, key=lambda j: h.values[anchors[j]])
    floor = min(h.values)
    if h.values[anchors[order[1]]] <= floor + 1:
        k, c = order[2], floor
    else:
        k, c = order[0], floor + 1
    available = [
        int(match.group(2))
        for name in space.points
        if (match := _PAIR_NAME.match(name)) and int(match.group(1)) == k
    ]
    if not available:
        raise PreconditionError(f"space has no pair points for k={k}")
    m = max(available) if m is None else m
    iu, iv = space.index(f"u{k}_{m}"), space.index(f"v{k}_{m}")
    A = PointSubset.of(space, (iu, iv))
    _require_base_outside(space, A)
    f_values = list(h.values)
    f_values[iu], f_values[iv] = c + 1, c
    g_values = list(h.values)
    g_values[iu], g_values[iv] = c, c + 1
    f = LipschitzFunction(space, tuple(f_values))
    g = LipschitzFunction(space, tuple(g_values))
    duv = space.dist[iu][iv]
    difference = lip_norm(f - g)
    result = D2pPairExample(space, f, g, iu, iv, A, k, c, floor, d, difference)
    result.postconditions = {
        "norm_f_is_one": lip_norm(f) == 1,
        "norm_g_is_one": lip_norm(g) == 1,
        "f_gap_equals_distance": f.values[iu] - f.values[iv] == duv == 1,
        "g_gap_equals_distance": g.values[iv] - g.values[iu] == duv,
        "restricts_to_h": f.agrees_with(h, space.complement(A)) and g.agrees_with(h, space.complement(A)),
        "difference_bound": difference >= 2 * (1 - d),
    }
    return result


# ---------------------------------------------------------------------------
# Daugavet construction
# ---------------------------------------------------------------------------


class DaugavetCase(StrEnum):
    DISJOINT_BALLS = "disjoint_balls"
    FIXED_U = "fixed_u"
    CONVERGING = "converging"


def daugavet_theta(delta: Scalar) -> Fraction:
    """Largest 1/k with theta / (1 - theta) < delta / 2."""
    d = _delta(delta)
    return Fraction(1, math.floor(2 / d) + 2)


@dataclass
class DaugavetTrace:
    space: FiniteMetricSpace
    case: DaugavetCase
    f: LipschitzFunction
    A: PointSubset
    u: int
    v: int
    center: int
    theta: Fraction
    r: Fraction
    s: Fraction
    delta: Fraction
    helper_pairs: int = 0
    postconditions: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.postconditions.values())

    def to_dict(self) -> dict[str, object]:
        names = self.space.points
        return {
            "case": str(self.case),
            "u": names[self.u],
            "v": names[self.v],
            "center": names[self.center],
            "A": self.A.names(self.space),
            "theta": self.theta,
            "r": self.r,
            "s": self.s,
            "delta": self.delta,
            "f": self.f.as_dict(),
            "helper_pairs": self.helper_pairs,
            "postconditions": {k: str(Status.of(ok)) for k, ok in self.postconditions.items()},
        }


def _default_radius(space: FiniteMetricSpace, center: int, support: PointSubset) -> Fraction:
    """Distance from `center` to the nearest support point or base other than itself."""
    keep = {x for x in support if x != center}
    if space.base != center:
        keep.add(space.base)
    if not keep:
        return space.diameter() + 1
    return min(space.dist[center][x] for x in keep)


def _geometric(ok: bool, text: str) -> None:
    if not ok:
        raise GeometricPreconditionError(text)


def build_daugavet_function(
    space: FiniteMetricSpace,
    F_support: PointSubset | Iterable[PointRef],
    h: LipschitzFunction,
    u: PointRef,
    v: PointRef,
    delta: Scalar,
    case: DaugavetCase | str,
    r: Scalar | None = None,
    s: Scalar | None = None,
    center: PointRef | None = None,
) -> DaugavetTrace:
    """Norm-one f equal to h off a small set A with a steep drop from u to v.

    disjoint_balls: A = B(u, r), needs d(u,v) < theta r; f(u) = h(u).
    fixed_u: A = B(u, r) minus B(u, s), needs d(u,v) < theta r and
    s < theta d(u,v).
    converging: A = B(c, r) minus B(c, s) around a separate center c, needs
    max(d(c,u), d(c,v)) < theta r and s < theta min(d(c,u), d(c,v));
    f(u) = h(c) + (1-delta) d(c,u).
    In every case f(v) = f(u) - (1-delta) d(u,v) and the rest comes from the
    sup extension over (M minus A) plus {u, v}. By default r reaches up to
    the nearest support point or base.
    """
    d = _delta(delta)
    kind = DaugavetCase(case)
    support = _subset(space, F_support)
    iu, iv = space.index(u), space.index(v)
    if iu == iv:
        raise PreconditionError("u and v must differ")
    _require_norm_at_most([h], 1 - d)
    theta = daugavet_theta(d)
    dist = space.dist
    keep = 1 - d

    if kind is DaugavetCase.CONVERGING:
        if center is None:
            raise PreconditionError("the converging case needs a center")
        ic = space.index(center)
        if ic in (iu, iv):
            raise PreconditionError("the center must differ from u and v")
    else:
        ic = iu
    radius = _default_radius(space, ic, support) if r is None else as_fraction(r)
    _geometric(radius > 0, f"r must be positive, got {format_scalar(radius)}")
    duv = dist[iu][iv]
    if kind is DaugavetCase.DISJOINT_BALLS:
        inner = ZERO
        _geometric(
            duv < theta * radius,
            f"d(u,v) = {format_scalar(duv)} is not < theta r = {format_scalar(theta * radius)}",
        )
        A = ball(space, iu, radius)
        top = h.values[iu]
    elif kind is DaugavetCase.FIXED_U:
        inner = theta * duv / 2 if s is None else as_fraction(s)
        _geometric(
            duv < theta * radius,
            f"d(v,u) = {format_scalar(duv)} is not < theta r = {format_scalar(theta * radius)}",
        )
        _geometric(
            ZERO < inner < theta * duv,
            f"s = {format_scalar(inner)} is not in (0, theta d(v,u) = {format_scalar(theta * duv)})",
        )
        A = annulus(space, iu, radius, inner)
        top = h.values[iu]
    else:
        near, far = sorted((dist[ic][iu], dist[ic][iv]))
        inner = theta * near / 2 if s is None else as_fraction(s)
        _geometric(
            far < theta * radius,
            f"max(d(c,u), d(c,v)) = {format_scalar(far)} is not < theta r = {format_scalar(theta * radius)}",
        )
        _geometric(
            ZERO < inner < theta * near,
            f"s = {format_scalar(inner)} is not in (0, theta min(d(c,u), d(c,v)) = {format_scalar(theta * near)})",
        )
        A = annulus(space, ic, radius, inner)
        top = h.values[ic] + keep * dist[ic][iu]
    _require_base_outside(space, A)

    rest = space.complement(A).members
    values = {x: h.values[x] for x in rest}
    values[iu] = top
    values[iv] = top - keep * duv
    pf = PartialFunction(space, PointSubset(tuple(sorted(values))), values)
    f = mcshane_extend(pf, 1, ExtensionDirection.SUP)

    # replay the ball-separation estimate on every tested pair
    ratio = theta / (1 - theta)
    close = ball(space, ic, theta * radius)
    inside = ball(space, ic, radius)
    helper_ok, helper_pairs = True, 0
    for y in close:
        for x in range(space.size):
            if x in inside:
                continue
            helper_pairs += 1
            if dist[y][ic] > ratio * dist[x][y]:
                helper_ok = False

    trace = DaugavetTrace(space, kind, f, A, iu, iv, ic, theta, radius, inner, d, helper_pairs)
    trace.postconditions = {
        "norm_at_most_one": lip_norm(f) <= 1,
        "equals_h_off_A": f.agrees_with(h, rest),
        "gap_at_uv": f.values[iu] - f.values[iv] >= keep * duv,
        "helper_estimate": helper_ok,
        "u_v_in_A_or_fixed": (iv in A) and (iu in A or kind is DaugavetCase.FIXED_U),
    }
    return trace


def check_daugavet_estimate(
    space: FiniteMetricSpace,
    F: FreeVector,
    u: PointRef,
    v: PointRef,
    delta: Scalar,
    case: DaugavetCase | str,
    h: LipschitzFunction | None = None,
    r: Scalar | None = None,
    s: Scalar | None = None,
    center: PointRef | None = None,
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> PropertyReport:
    """Run the Daugavet construction for a norm-one F and test its estimates.

    h defaults to (1-delta) times a norming function of F. The report
    passes when the Gamma-masses of A stay below delta, F(f) > 1 - 6 delta
    and ||F + m_{u,v}|| > 2 - 7 delta.
    """
    d = _delta(delta)
    mode = SolveMode.parse(mode)
    margin = tolerances.margin(mode)
    norm, norming = free_norm_dual(F, mode, tolerances)
    if abs(norm - 1) > margin:
        raise PreconditionError(f"F must have norm 1, got {format_scalar(norm)}")
    h = norming.scaled(1 - d) if h is None else h
    trace = build_daugavet_function(space, F.support(), h, u, v, d, case, r, s, center)

    mu = min_tv_representation(F, mode, tolerances)
    first = gamma_mass(mu, trace.A, GammaSide.FIRST)
    second = gamma_mass(mu, trace.A, GammaSide.SECOND)
    value_h = F.apply(h)
    value_f = F.apply(trace.f)
    combined = pair_with_molecule(F, trace.u, trace.v, mode, tolerances)

    checks = {
        "h_in_slice": strictly_greater(value_h, 1 - 2 * d, margin),
        "gamma_first_below_delta": strictly_greater(d, first, margin),
        "gamma_second_below_delta": strictly_greater(d, second, margin),
        "F_of_f": strictly_greater(value_f, 1 - 6 * d, margin),
        "molecule_sum": strictly_greater(combined, 2 - 7 * d, margin),
        "f_in_ball": at_most(lip_norm(trace.f), ONE, margin),
    }
    report = PropertyReport(
        "daugavet-estimate",
        {
            "u": space.name(u),
            "v": space.name(v),
            "delta": d,
            "case": str(trace.case),
        },
        Status.of(trace.passed and all(checks.values())),
        mode=str(mode),
        tolerances=tolerances.to_dict(),
    )
    report.witness = trace.to_dict()
    report.extra = {
        "gamma_first": first,
        "gamma_second": second,
        "F_h": value_h,
        "F_f": value_f,
        "norm_F_plus_molecule": combined,
        "bound": 2 - 7 * d,
        "checks": {k: str(Status.of(ok)) for k, ok in checks.items()},
    }
    for name, ok in checks.items():
        if not ok:
            report.violations.append(Violation((), ZERO, ZERO, name))
    return report
