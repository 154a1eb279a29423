"""Trapezoid-type inequalities, their finite searches and the balls lemma.

All checks here are exact: distances are scaled to integers and the
threshold (1 - eps) is cleared of its denominator before comparing, so a
report never depends on a tolerance.
"""

import itertools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import numpy.typing as npt

from lipnav.constants import DEFAULT_MAX_VIOLATIONS, INT64_SAFE_BOUND
from lipnav.core.lipspace import LipschitzFunction, lip_norm
from lipnav.core.metric import FiniteMetricSpace, IntMatrix, PointRef, PointSubset, annulus, ball
from lipnav.core.reports import PropertyReport, Status, Violation
from lipnav.errors import PreconditionError, StructuralError
from lipnav.utils.formatting import format_scalar
from lipnav.utils.rationals import Scalar, as_fraction

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class AnnulusShape:
    """A = B(center, outer) minus B(center, inner); inner 0 gives a plain ball."""

    center: int
    outer: Fraction
    inner: Fraction = ZERO

    def members(self, space: FiniteMetricSpace) -> PointSubset:
        return annulus(space, self.center, self.outer, self.inner)

    def to_dict(self, space: FiniteMetricSpace) -> dict[str, object]:
        return {
            "center": space.points[self.center],
            "outer": self.outer,
            "inner": self.inner,
        }


@dataclass(frozen=True)
class TrapezoidWitness:
    """Excluded set A with a pair u != v inside it, tested at threshold eps."""

    A: PointSubset
    u: int
    v: int
    epsilon: Fraction
    shape: AnnulusShape | None = None

    def __post_init__(self) -> None:
        if self.u == self.v:
            raise PreconditionError("witness points u and v must differ")
        if self.u not in self.A or self.v not in self.A:
            raise PreconditionError("witness points u and v must lie in A")
        if not ZERO <= self.epsilon < ONE:
            raise PreconditionError(
                f"epsilon must be in [0, 1), got {format_scalar(self.epsilon)}"
            )

    @classmethod
    def create(
        cls,
        space: FiniteMetricSpace,
        A: Iterable[PointRef],
        u: PointRef,
        v: PointRef,
        epsilon: Scalar,
        shape: AnnulusShape | None = None,
    ) -> "TrapezoidWitness":
        return cls(
            PointSubset.of(space, A),
            space.index(u),
            space.index(v),
            as_fraction(epsilon),
            shape,
        )

    def with_epsilon(self, epsilon: Scalar) -> "TrapezoidWitness":
        return TrapezoidWitness(self.A, self.u, self.v, as_fraction(epsilon), self.shape)

    def to_dict(self, space: FiniteMetricSpace) -> dict[str, object]:
        data: dict[str, object] = {
            "A": self.A.names(space),
            "u": space.points[self.u],
            "v": space.points[self.v],
            "epsilon": self.epsilon,
        }
        if self.shape is not None:
            data["shape"] = self.shape.to_dict(space)
        return data


@dataclass(frozen=True)
class WitnessFamily:
    """Ordered witnesses sharing one eps; their A's should be pairwise disjoint."""

    members: tuple[TrapezoidWitness, ...]
    epsilon: Fraction
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        mixed = [m for m in self.members if m.epsilon != self.epsilon]
        if mixed:
            raise StructuralError("family members must share the family epsilon")

    @classmethod
    def of(cls, members: Sequence[TrapezoidWitness], epsilon: Scalar) -> "WitnessFamily":
        eps = as_fraction(epsilon)
        return cls(tuple(m.with_epsilon(eps) for m in members), eps)

    def __len__(self) -> int:
        return len(self.members)

    def overlaps(self) -> list[tuple[int, int, PointSubset]]:
        """Index pairs (i, j), i < j, whose sets intersect, with the shared points."""
        found = []
        for i, j in itertools.combinations(range(len(self.members)), 2):
            a, b = self.members[i].A, self.members[j].A
            if not a.isdisjoint(b):
                found.append((i, j, PointSubset(tuple(x for x in a if x in b))))
        return found


# ---------------------------------------------------------------------------
# Integer views
# ---------------------------------------------------------------------------


def _threshold(space: FiniteMetricSpace, epsilon: Fraction) -> tuple[IntMatrix, int, int]:
    """Scaled distances with (1 - eps) written as keep/q, keep = q - p."""
    p, q = epsilon.numerator, epsilon.denominator
    D = space.scaled
    if D.dtype != object:
        peak = int(np.abs(D).max()) if D.size else 0
        if peak * q * 8 >= INT64_SAFE_BOUND:
            D = D.astype(object)
    return D, q - p, q


def _as_bool(arr: object) -> npt.NDArray[np.bool_]:
    return np.asarray(arr, dtype=bool)


def _base_params(space: FiniteMetricSpace, w: TrapezoidWitness) -> dict[str, object]:
    return {
        "A": w.A.names(space),
        "u": space.points[w.u],
        "v": space.points[w.v],
        "epsilon": w.epsilon,
    }


# ---------------------------------------------------------------------------
# Per-witness inequalities
# ---------------------------------------------------------------------------


def check_ltp_inequality(
    space: FiniteMetricSpace,
    w: TrapezoidWitness,
    max_violations: int = DEFAULT_MAX_VIOLATIONS,
) -> PropertyReport:
    """(1-eps)(d(x,y) + d(u,v)) <= d(x,u) + d(y,v) for all x, y outside A.

    Violations are listed in lexicographic (x, y) order, at most
    `max_violations` of them; the total count goes to `extra`.
    """
    report = PropertyReport("ltp-inequality", _base_params(space, w), Status.PASS)
    rest = np.array(space.complement(w.A).members, dtype=np.intp)
    if rest.size == 0:
        report.notes.append("vacuous: M minus A is empty")
        return report
    D, keep, q = _threshold(space, w.epsilon)
    u, v = w.u, w.v
    lhs = keep * (D[np.ix_(rest, rest)] + D[u, v])
    rhs = q * (D[rest, u][:, None] + D[rest, v][None, :])
    bad = np.argwhere(_as_bool(lhs > rhs))
    if len(bad):
        report.status = Status.FAIL
        report.extra["violation_count"] = len(bad)
        factor = 1 - w.epsilon
        duv = space.dist[u][v]
        for a, b in bad[:max_violations]:
            x, y = int(rest[a]), int(rest[b])
            report.violations.append(
                Violation(
                    (space.points[x], space.points[y]),
                    factor * (space.dist[x][y] + duv),
                    space.dist[x][u] + space.dist[y][v],
                )
            )
        logger.debug("ltp inequality fails at %d pairs", len(bad))
    return report


def _pair_terms(
    D: IntMatrix, rest: npt.NDArray[np.intp], center: int, other: int, keep: int, q: int
) -> IntMatrix:
    """keep*(d(x,y) + d(u,v)) - q*(d(x,c) + d(y,c)) over x, y in `rest`."""
    return keep * (D[np.ix_(rest, rest)] + D[center, other]) - q * (
        D[rest, center][:, None] + D[rest, center][None, :]
    )


def check_sltp_inequality(space: FiniteMetricSpace, w: TrapezoidWitness) -> PropertyReport:
    """(1-eps)(d(x,y) + d(z,w) + 2d(u,v)) <= d(x,u) + d(y,u) + d(z,v) + d(w,v).

    The inequality splits into a term in (x, y) around u and a term in
    (z, w) around v. Maximizing each separately covers every quadruple, and
    the reported violator is the quadruple with the largest excess.
    """
    report = PropertyReport("sltp-inequality", _base_params(space, w), Status.PASS)
    rest = np.array(space.complement(w.A).members, dtype=np.intp)
    if rest.size == 0:
        report.notes.append("vacuous: M minus A is empty")
        return report
    D, keep, q = _threshold(space, w.epsilon)
    P = _pair_terms(D, rest, w.u, w.v, keep, q)
    Q = _pair_terms(D, rest, w.v, w.u, keep, q)
    ip = np.unravel_index(int(np.argmax(P)), P.shape)
    iq = np.unravel_index(int(np.argmax(Q)), Q.shape)
    excess = P[ip] + Q[iq]
    x, y = int(rest[ip[0]]), int(rest[ip[1]])
    z, t = int(rest[iq[0]]), int(rest[iq[1]])
    dist, u, v = space.dist, w.u, w.v
    lhs = (1 - w.epsilon) * (dist[x][y] + dist[z][t] + 2 * dist[u][v])
    rhs = dist[x][u] + dist[y][u] + dist[z][v] + dist[t][v]
    report.extra["worst_quadruple"] = [space.points[i] for i in (x, y, z, t)]
    report.extra["worst_slack"] = rhs - lhs
    if excess > 0:
        report.status = Status.FAIL
        report.violations.append(
            Violation(tuple(space.points[i] for i in (x, y, z, t)), lhs, rhs, "worst")
        )
    return report


# ---------------------------------------------------------------------------
# Finite-set searches
# ---------------------------------------------------------------------------


def _candidate_pairs(
    space: FiniteMetricSpace, candidates: Iterable[tuple[PointRef, PointRef]] | None
) -> list[tuple[int, int]]:
    if candidates is None:
        n = space.size
        return [(u, v) for u in range(n) for v in range(n) if u != v]
    pairs = []
    for a, b in candidates:
        u, v = space.index(a), space.index(b)
        if u == v:
            raise PreconditionError(f"candidate pair ({space.points[u]}, {space.points[u]}) repeats a point")
        pairs.append((u, v))
    return pairs


def _finite_params(space: FiniteMetricSpace, N: PointSubset, eps: Fraction) -> dict[str, object]:
    return {"N": N.names(space), "epsilon": eps}


def check_ltp_finite(
    space: FiniteMetricSpace,
    N: PointSubset,
    epsilon: Scalar,
    candidates: Iterable[tuple[PointRef, PointRef]] | None = None,
    max_violations: int = DEFAULT_MAX_VIOLATIONS,
) -> PropertyReport:
    """Search for u != v with (1-eps)(d(x,y)+d(u,v)) <= d(x,u)+d(y,v) on N.

    Pairs are tried in lexicographic index order unless `candidates` is
    given. On failure each tried pair is listed with its first violating
    (x, y).
    """
    eps = as_fraction(epsilon)
    if not ZERO <= eps < ONE:
        raise PreconditionError(f"epsilon must be in [0, 1), got {format_scalar(eps)}")
    pairs = _candidate_pairs(space, candidates)
    report = PropertyReport("ltp-finite", _finite_params(space, N, eps), Status.FAIL)
    if not pairs:
        report.notes.append("no candidate pairs")
        return report
    idx = np.array(N.members, dtype=np.intp)
    D, keep, q = _threshold(space, eps)
    inner = keep * D[np.ix_(idx, idx)]
    for u, v in pairs:
        if idx.size:
            bad = _as_bool(inner + keep * D[u, v] > q * (D[idx, u][:, None] + D[idx, v][None, :]))
            hit = np.argwhere(bad)
        else:
            hit = np.empty((0, 2), dtype=np.intp)
        if not len(hit):
            report.status = Status.PASS
            report.witness = {"u": space.points[u], "v": space.points[v]}
            report.violations.clear()
            return report
        if len(report.violations) < max_violations:
            x, y = int(idx[hit[0][0]]), int(idx[hit[0][1]])
            report.violations.append(
                Violation(
                    (space.points[u], space.points[v], space.points[x], space.points[y]),
                    (1 - eps) * (space.dist[x][y] + space.dist[u][v]),
                    space.dist[x][u] + space.dist[y][v],
                    "u,v,x,y",
                )
            )
    report.notes.append(f"exhaustive: none of {len(pairs)} pairs works")
    return report


def check_sltp_finite(
    space: FiniteMetricSpace,
    N: PointSubset,
    epsilon: Scalar,
    candidates: Iterable[tuple[PointRef, PointRef]] | None = None,
    max_violations: int = DEFAULT_MAX_VIOLATIONS,
) -> PropertyReport:
    """Search for u != v satisfying the quadruple inequality on N."""
    eps = as_fraction(epsilon)
    if not ZERO <= eps < ONE:
        raise PreconditionError(f"epsilon must be in [0, 1), got {format_scalar(eps)}")
    pairs = _candidate_pairs(space, candidates)
    report = PropertyReport("sltp-finite", _finite_params(space, N, eps), Status.FAIL)
    if not pairs:
        report.notes.append("no candidate pairs")
        return report
    idx = np.array(N.members, dtype=np.intp)
    D, keep, q = _threshold(space, eps)
    # S[c] = max over x, y in N of keep*d(x,y) - q*(d(x,c) + d(y,c))
    S: list[int] = []
    if idx.size:
        inner = keep * D[np.ix_(idx, idx)]
        for c in range(space.size):
            S.append(int((inner - q * (D[idx, c][:, None] + D[idx, c][None, :])).max()))
    for u, v in pairs:
        excess = S[u] + S[v] + 2 * keep * int(D[u, v]) if idx.size else 0
        if excess <= 0:
            report.status = Status.PASS
            report.witness = {"u": space.points[u], "v": space.points[v]}
            report.violations.clear()
            return report
        if len(report.violations) < max_violations:
            report.violations.append(
                Violation(
                    (space.points[u], space.points[v]),
                    Fraction(excess, q * space.scale),
                    ZERO,
                    "scaled excess",
                )
            )
    report.notes.append(f"exhaustive: none of {len(pairs)} pairs works")
    return report


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


def check_family(
    space: FiniteMetricSpace,
    fam: WitnessFamily,
    kinds: Sequence[str] = ("ltp", "sltp"),
    max_violations: int = DEFAULT_MAX_VIOLATIONS,
) -> PropertyReport:
    """Disjointness of the A_m, then each requested inequality per member."""
    unknown = set(kinds) - {"ltp", "sltp"}
    if unknown:
        raise PreconditionError(f"unknown inequality kinds: {', '.join(sorted(unknown))}")
    report = PropertyReport(
        "family",
        {
            "epsilon": fam.epsilon,
            "members": [m.to_dict(space) for m in fam.members],
            "kinds": list(kinds),
        },
        Status.PASS,
    )
    overlaps = fam.overlaps()
    if overlaps:
        report.status = Status.FAIL
        report.extra["overlaps"] = [
            {"members": [i + 1, j + 1], "shared": shared.names(space)} for i, j, shared in overlaps
        ]
        report.notes.append("sets are not pairwise disjoint; inequalities not checked")
        return report
    per_member: list[dict[str, str]] = []
    for m, w in enumerate(fam.members, start=1):
        outcome: dict[str, str] = {}
        for kind in kinds:
            if kind == "ltp":
                sub = check_ltp_inequality(space, w, max_violations)
            else:
                sub = check_sltp_inequality(space, w)
            outcome[kind] = str(sub.status)
            if not sub.passed:
                report.status = Status.FAIL
                for violation in sub.violations[: max(0, max_violations - len(report.violations))]:
                    report.violations.append(
                        Violation(violation.points, violation.lhs, violation.rhs, f"member {m} {kind}")
                    )
        per_member.append(outcome)
    report.extra["members"] = per_member
    if not fam.members:
        report.notes.append("empty family")
    return report


# ---------------------------------------------------------------------------
# Balls lemma
# ---------------------------------------------------------------------------


def far_point_violations(
    space: FiniteMetricSpace,
    p: PointRef,
    r: Scalar,
    u: PointRef,
    v: PointRef,
    epsilon: Scalar,
) -> list[int]:
    """Points x outside B(p, r) with 2d(u,v) > eps * min(d(x,u), d(x,v))."""
    eps = as_fraction(epsilon)
    iu, iv = space.index(u), space.index(v)
    inside = ball(space, p, r)
    twice = 2 * space.dist[iu][iv]
    return [
        x
        for x in range(space.size)
        if x not in inside and twice > eps * min(space.dist[x][iu], space.dist[x][iv])
    ]


def check_balls_lemma(
    space: FiniteMetricSpace,
    p: PointRef,
    r: Scalar,
    s: Scalar,
    u: PointRef,
    v: PointRef,
    epsilon: Scalar,
) -> PropertyReport:
    """Hypotheses of the balls lemma and, when they hold, its two conclusions.

    Hypotheses: 4s <= eps d(u,v), and 2d(u,v) <= eps min(d(x,u), d(x,v))
    for every x outside B(p, r). Conclusions: the pair and quadruple
    inequalities over M minus A, A = B(p, r) minus B(p, s). Failed
    hypotheses leave the conclusions unasserted.
    """
    rr, ss, eps = as_fraction(r), as_fraction(s), as_fraction(epsilon)
    ip, iu, iv = space.index(p), space.index(u), space.index(v)
    if not ZERO <= ss < rr:
        raise PreconditionError(
            f"need 0 <= s < r, got s={format_scalar(ss)} r={format_scalar(rr)}"
        )
    if not ZERO <= eps < ONE:
        raise PreconditionError(f"epsilon must be in [0, 1), got {format_scalar(eps)}")
    if iu == iv:
        raise PreconditionError("u and v must differ")
    A = annulus(space, ip, rr, ss)
    for name, point in (("u", iu), ("v", iv)):
        if point not in A:
            raise PreconditionError(
                f"{name}={space.points[point]} is not in B(p,r) minus B(p,s):"
                f" d(p,{name}) = {format_scalar(space.dist[ip][point])}"
            )
    duv = space.dist[iu][iv]
    report = PropertyReport(
        "balls-lemma",
        {
            "p": space.points[ip],
            "r": rr,
            "s": ss,
            "u": space.points[iu],
            "v": space.points[iv],
            "epsilon": eps,
        },
        Status.PASS,
    )
    inner_ok = 4 * ss <= eps * duv
    if not inner_ok:
        report.violations.append(Violation((), 4 * ss, eps * duv, "hypothesis 4s <= eps d(u,v)"))
    far = far_point_violations(space, ip, rr, iu, iv, eps)
    for x in far:
        report.violations.append(
            Violation(
                (space.points[x],),
                2 * duv,
                eps * min(space.dist[x][iu], space.dist[x][iv]),
                "hypothesis 2d(u,v) <= eps min(d(x,u), d(x,v))",
            )
        )
    hypotheses = inner_ok and not far
    report.extra["hypotheses"] = {
        "inner_radius": str(Status.of(inner_ok)),
        "far_points": str(Status.of(not far)),
    }
    report.extra["A"] = A.names(space)
    if not hypotheses:
        report.status = Status.FAIL
        report.extra["conclusions"] = "not asserted"
        return report
    witness = TrapezoidWitness(A, iu, iv, eps, AnnulusShape(ip, rr, ss))
    ltp = check_ltp_inequality(space, witness)
    sltp = check_sltp_inequality(space, witness)
    report.extra["conclusions"] = {"ltp": str(ltp.status), "sltp": str(sltp.status)}
    report.witness = witness.to_dict(space)
    if not (ltp.passed and sltp.passed):
        report.status = Status.FAIL
        report.violations.extend(ltp.violations + sltp.violations)
        logger.warning("balls lemma conclusion failed under satisfied hypotheses")
    return report


# ---------------------------------------------------------------------------
# Locality
# ---------------------------------------------------------------------------


def check_local(space: FiniteMetricSpace, f: LipschitzFunction, epsilon: Scalar) -> PropertyReport:
    """Look for u != v with d(u,v) < eps and (f(u)-f(v))/d(u,v) > ||f|| - eps."""
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise PreconditionError(f"epsilon must be positive, got {format_scalar(eps)}")
    norm = lip_norm(f)
    report = PropertyReport("local", {"epsilon": eps, "norm": norm}, Status.FAIL)
    best: tuple[Fraction, int, int] | None = None
    n, dist, vals = space.size, space.dist, f.values
    for i in range(n):
        for j in range(n):
            if i == j or dist[i][j] >= eps:
                continue
            slope = (vals[i] - vals[j]) / dist[i][j]
            if best is None or slope > best[0]:
                best = (slope, i, j)
    if best is None:
        report.notes.append(
            f"vacuously fails: uniformly discrete at scale {format_scalar(eps)}"
        )
        return report
    slope, i, j = best
    report.witness = {"u": space.points[i], "v": space.points[j], "slope": slope, "distance": dist[i][j]}
    report.status = Status.of(slope > norm - eps)
    if not report.passed:
        report.violations.append(
            Violation((space.points[i], space.points[j]), slope, norm - eps, "best slope")
        )
    return report
