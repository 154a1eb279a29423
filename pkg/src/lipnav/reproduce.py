"""Batch pipelines that rebuild each example space and verify its claims end to end."""

import logging
from collections.abc import Callable
from enum import StrEnum
from fractions import Fraction

import numpy as np

from lipnav.constants import DEFAULT_POINT_CAP
from lipnav.core.families import kn_family, pair_family
from lipnav.core.freespace import FreeVector, free_norm_dual
from lipnav.core.geometry import molecule_gap_sequence
from lipnav.core.linprog import DEFAULT_TOLERANCES, SolveMode, Tolerances
from lipnav.core.lipspace import ExtensionDirection, LipschitzFunction, PartialFunction, mcshane_extend
from lipnav.core.metric import (
    FamilyKind,
    FiniteMetricSpace,
    PointSubset,
    gen_example_d2p_not_ltp,
    gen_example_seqltp_not_sltp,
    gen_example_sltp_not_seq,
    gen_family,
    gen_kn,
    validate,
)
from lipnav.core.properties import (
    TrapezoidWitness,
    check_family,
    check_ltp_finite,
    check_ltp_inequality,
    check_sltp_finite,
    check_sltp_inequality,
)
from lipnav.core.reports import ReproductionBundle, Status
from lipnav.core.witnesses import (
    DaugavetCase,
    build_d2p_pair_example,
    build_sd2p_witness,
    build_ssd2p_witness,
    check_daugavet_estimate,
)
from lipnav.errors import PreconditionError
from lipnav.utils.formatting import format_scalar
from lipnav.utils.rationals import Scalar, as_fraction

logger = logging.getLogger(__name__)


class Target(StrEnum):
    EX_SLTP = "ex-sltp"
    EX_SEQLTP = "ex-seqltp"
    EX_D2P = "ex-d2p"
    KN = "kn"
    DAUGAVET_PROP = "daugavet-prop"


def _status(ok: bool) -> str:
    return str(Status.of(ok))


def _scalar_text(value: object) -> str:
    return format_scalar(value) if isinstance(value, Fraction) else str(value)


def _validated(bundle: ReproductionBundle, space: FiniteMetricSpace) -> None:
    report = validate(space)
    bundle.add("validate", "pass", str(report.status), report.passed, report.to_dict())


def generate_space(
    kind: str,
    K: int = 3,
    n: int = 2,
    dims: int = 4,
    level_cap: int | None = 2,
    cap: int = DEFAULT_POINT_CAP,
) -> FiniteMetricSpace:
    """Generator dispatch by name: kn, ex-sltp, ex-seqltp, ex-d2p or a family kind."""
    if kind == "kn":
        return gen_kn(n, dims, level_cap, cap)
    if kind == "ex-sltp":
        return gen_example_sltp_not_seq(K, cap=cap)
    if kind == "ex-seqltp":
        return gen_example_seqltp_not_sltp(K, cap=cap)
    if kind == "ex-d2p":
        return gen_example_d2p_not_ltp(K, cap=cap)
    try:
        family = FamilyKind(kind.replace("-", "_"))
    except ValueError:
        raise PreconditionError(f"unknown space kind: {kind}") from None
    return gen_family(family, K, cap)


def reproduce_sltp_not_seq(
    K: int = 6, epsilon: Scalar = Fraction(3, 10), cap: int = DEFAULT_POINT_CAP
) -> ReproductionBundle:
    """The space with d(a_k, c_k) = 2: one good pair, but no three disjoint ones."""
    if K < 4:
        raise PreconditionError(f"ex-sltp needs K >= 4, got {K}")
    eps = as_fraction(epsilon)
    bundle = ReproductionBundle(Target.EX_SLTP, {"K": K, "epsilon": eps}, "exact")
    space = gen_example_sltp_not_seq(K, cap=cap)
    _validated(bundle, space)

    N = PointSubset.of(space, [f"{p}{k}" for k in range(1, K - 1) for p in "abc"])
    pair = [(f"b{K - 1}", f"b{K}")]
    for name, check in (("ltp", check_ltp_finite), ("sltp", check_sltp_finite)):
        report = check(space, N, 0, candidates=pair)
        bundle.add(
            f"witness b{K - 1},b{K} {name} at 0", "pass", str(report.status), report.passed,
            report.to_dict(),
        )

    # a pair below K always meets the violator (a_K, c_K), so no family of them survives
    violator = (f"a{K}", f"c{K}")
    below = [p for p in space.points if p != "0" and int(p[1:]) < K]
    missed = []
    for i, u in enumerate(below):
        for v in below[i + 1 :]:
            w = TrapezoidWitness.create(space, (u, v), u, v, eps)
            report = check_ltp_inequality(space, w, max_violations=space.size**2)
            if report.passed or not any(set(p) == set(violator) for p in report.violating_points()):
                missed.append(f"{u},{v}")
    bundle.add(
        f"every pair below {K} fails at {format_scalar(eps)} via {','.join(violator)}",
        "fail for all",
        f"{len(missed)} pairs escape",
        not missed,
        {"escaping": missed[:20]},
    )
    family = pair_family(space, [(f"a{m}", f"b{m}") for m in (1, 2, 3)], eps)
    report = check_family(space, family, kinds=("ltp",))
    bundle.add("three-pair family", "fail", str(report.status), not report.passed, report.to_dict())
    return bundle


def reproduce_seqltp_not_sltp(
    K: int = 6, delta: Scalar = Fraction(1, 4), cap: int = DEFAULT_POINT_CAP
) -> ReproductionBundle:
    """Pairs u_m, v_m each pass the pair inequality; the quadruple one fails."""
    d = as_fraction(delta)
    bundle = ReproductionBundle(Target.EX_SEQLTP, {"K": K, "delta": d}, "exact")
    space = gen_example_seqltp_not_sltp(K, cap=cap)
    _validated(bundle, space)
    pairs = [(f"u{m}", f"v{m}") for m in range(1, K + 1)]
    family = pair_family(space, pairs, 0)
    report = check_family(space, family, kinds=("ltp",))
    bundle.add("pair family ltp at 0", "pass", str(report.status), report.passed, report.to_dict())
    quadruple = [
        check_sltp_inequality(space, TrapezoidWitness.create(space, pair, *pair, 0))
        for pair in pairs
    ]
    bundle.add(
        "sltp at 0 per pair",
        "fail",
        _status(all(r.passed for r in quadruple)),
        not any(r.passed for r in quadruple),
        {"worst": quadruple[0].extra.get("worst_quadruple")},
    )
    zero = LipschitzFunction.zero(space)
    trace = build_sd2p_witness(space, ("u1", "v1"), "u1", "v1", d, [zero])
    f = trace.functions[0]
    bundle.add(
        f"sd2p witness at delta {format_scalar(d)}",
        "f(u1) = 1, f(v1) = 0",
        f"f(u1) = {format_scalar(f('u1'))}, f(v1) = {format_scalar(f('v1'))}",
        trace.passed and f("u1") == 1 and f("v1") == 0,
        trace.to_dict(),
    )
    half = Fraction(1, 2)
    sym = build_ssd2p_witness(space, ("u1", "v1"), "u1", "v1", half, [zero])
    bundle.add(
        "ssd2p witness at delta 1/2",
        "r = 1/2, s = 0, g(u1) = 1/2",
        f"r = {format_scalar(sym.r)}, s = {format_scalar(sym.s)}, g(u1) = {format_scalar(sym.g('u1'))}",
        sym.passed and sym.r == half and sym.s == 0 and sym.g("u1") == half,
        sym.to_dict(),
    )
    return bundle


def _steep_at_a1(space: FiniteMetricSpace) -> LipschitzFunction:
    """h with h(a1) = 0 and h(a2) = h(a3) = 3/2, extended by the inf formula."""
    pf = PartialFunction.from_mapping(space, {"a1": 0, "a2": Fraction(3, 2), "a3": Fraction(3, 2)})
    return mcshane_extend(pf, 1, ExtensionDirection.INF)


def reproduce_d2p_not_ltp(
    K: int = 3, delta: Scalar = Fraction(1, 4), cap: int = DEFAULT_POINT_CAP
) -> ReproductionBundle:
    """Pair witnesses for both branches of the selection rule and the refutation on a1, a2, a3."""
    d = as_fraction(delta)
    bundle = ReproductionBundle(Target.EX_D2P, {"K": K, "delta": d}, "exact")
    space = gen_example_d2p_not_ltp(K, cap=cap)
    _validated(bundle, space)
    for label, h in (("flat h", LipschitzFunction.zero(space)), ("steep h", _steep_at_a1(space))):
        example = build_d2p_pair_example(space, d, h)
        bundle.add(
            f"pair example, {label}",
            "||f|| = ||g|| = 1, gaps 1",
            f"k={example.k}, ||f-g|| = {format_scalar(example.difference_norm)}",
            example.passed,
            example.to_dict(),
        )
    N = PointSubset.of(space, ("a1", "a2", "a3"))
    report = check_ltp_finite(space, N, Fraction(1, 4))
    bundle.add("ltp on a1,a2,a3 at 1/4", "fail", str(report.status), not report.passed, report.to_dict())
    return bundle


def reproduce_kn(
    n: int = 2, dims: int = 6, epsilon: Scalar = 0, cap: int = DEFAULT_POINT_CAP
) -> ReproductionBundle:
    """Coordinate-pair witnesses in the level-2 truncation of K_n."""
    eps = as_fraction(epsilon)
    bundle = ReproductionBundle(Target.KN, {"n": n, "dims": dims, "epsilon": eps}, "exact")
    space = gen_kn(n, dims, level_cap=2, cap=cap)
    _validated(bundle, space)
    family = kn_family(space, n, dims // 2, eps)
    report = check_family(space, family)
    bundle.add(
        f"{len(family)} coordinate-pair witnesses", "pass", str(report.status), report.passed,
        report.to_dict(),
    )
    return bundle


DAUGAVET_SUPPORT = ("1", "3/2", "2", "9/4")


def random_functional(
    space: FiniteMetricSpace,
    rng: np.random.Generator,
    support: tuple[str, ...] = DAUGAVET_SUPPORT,
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> FreeVector:
    """Nonzero integer weights in [-5, 5] on `support`, scaled to norm one."""
    while True:
        weights = rng.integers(-5, 6, size=len(support))
        if weights.any():
            break
    F = FreeVector.create(space, {p: int(w) for p, w in zip(support, weights)})
    norm, _ = free_norm_dual(F, mode, tolerances)
    return F.scaled(1 / norm)


def reproduce_daugavet(
    K: int = 8,
    delta: Scalar = Fraction(1, 10),
    seed: int = 0,
    samples: int = 3,
    mode: SolveMode | str = SolveMode.EXACT,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    cap: int = DEFAULT_POINT_CAP,
) -> ReproductionBundle:
    """Shrinking pairs k, k + 2^-k against random F supported near the origin."""
    if K < 4:
        raise PreconditionError(f"daugavet-prop needs K >= 4, got {K}")
    d = as_fraction(delta)
    mode = SolveMode.parse(mode)
    bundle = ReproductionBundle(
        Target.DAUGAVET_PROP, {"K": K, "delta": d, "seed": seed, "samples": samples}, str(mode)
    )
    space = gen_family(FamilyKind.SHRINKING_PAIRS, K, cap)
    _validated(bundle, space)
    rng = np.random.default_rng(seed)
    bound = 2 - 7 * d
    pairs = [(format_scalar(Fraction(k)), format_scalar(k + Fraction(1, 2**k))) for k in range(4, K + 1)]
    for sample in range(1, samples + 1):
        F = random_functional(space, rng, mode=mode, tolerances=tolerances)
        for u, v in pairs:
            report = check_daugavet_estimate(
                space, F, u, v, d, DaugavetCase.DISJOINT_BALLS, mode=mode, tolerances=tolerances
            )
            bundle.add(
                f"F{sample} pair ({u}, {v})",
                f"> {format_scalar(bound)}",
                _scalar_text(report.extra["norm_F_plus_molecule"]),
                report.passed,
                report.to_dict(),
            )
        gaps = molecule_gap_sequence(space, F, pairs, mode, tolerances)
        bundle.add(
            f"F{sample} molecule gaps",
            f"all > {format_scalar(bound)}",
            ", ".join(format_scalar(g.value) for g in gaps),
            all(g.value > bound for g in gaps),
            {"gaps": [g.to_dict() for g in gaps]},
        )
    logger.info("daugavet pipeline: %d entries", len(bundle.entries))
    return bundle


PIPELINES: dict[Target, Callable[..., ReproductionBundle]] = {
    Target.EX_SLTP: reproduce_sltp_not_seq,
    Target.EX_SEQLTP: reproduce_seqltp_not_sltp,
    Target.EX_D2P: reproduce_d2p_not_ltp,
    Target.KN: reproduce_kn,
    Target.DAUGAVET_PROP: reproduce_daugavet,
}


def run_reproduction(target: Target | str, **params: object) -> ReproductionBundle:
    """Run one pipeline; parameters not given keep their defaults."""
    target = Target(target)
    logger.info("reproducing %s with %s", target, params)
    return PIPELINES[target](**{k: v for k, v in params.items() if v is not None})
