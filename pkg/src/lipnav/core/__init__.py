"""Core business logic modules for lipnav."""

from lipnav.core.families import (
    annulus_family,
    annulus_outer_radius,
    ball_family,
    kn_coordinate_set,
    kn_family,
    limit_point_family,
    pair_family,
)
from lipnav.core.freespace import (
    DeLeeuwMeasure,
    FreeVector,
    GammaSide,
    TransportPlan,
    free_norm_dual,
    free_norm_primal,
    gamma_mass,
    min_tv_representation,
    pair_with_molecule,
)
from lipnav.core.geometry import (
    MoleculeGap,
    SliceSpec,
    combo_diameter,
    daugavet_gap,
    molecule_gap_sequence,
    slice_diameter,
    ssd2p_witness_value,
)
from lipnav.core.linprog import (
    DEFAULT_TOLERANCES,
    LinearProgram,
    LpBuilder,
    LpSolution,
    LpStatus,
    Relation,
    Sense,
    SolveMode,
    Tolerances,
    solve,
)
from lipnav.core.lipspace import (
    DeLeeuwVector,
    ExtensionDirection,
    LipschitzFunction,
    PartialFunction,
    de_leeuw,
    lip_norm,
    mcshane_extend,
    weighted_mcshane_extend,
)
from lipnav.core.metric import (
    FamilyKind,
    FiniteMetricSpace,
    PointSubset,
    annulus,
    ball,
    gen_example_d2p_not_ltp,
    gen_example_seqltp_not_sltp,
    gen_example_sltp_not_seq,
    gen_family,
    gen_kn,
    validate,
)
from lipnav.core.properties import (
    AnnulusShape,
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
from lipnav.core.reports import (
    DiameterResult,
    PropertyReport,
    ReproductionBundle,
    Status,
    ValidationReport,
    Violation,
)
from lipnav.core.witnesses import (
    D2pPairExample,
    DaugavetCase,
    DaugavetTrace,
    Sd2pTrace,
    WitnessBuildTrace,
    build_d2p_pair_example,
    build_daugavet_function,
    build_sd2p_witness,
    build_ssd2p_witness,
    check_daugavet_estimate,
    daugavet_theta,
)

__all__ = [
    "DEFAULT_TOLERANCES",
    "AnnulusShape",
    "D2pPairExample",
    "DaugavetCase",
    "DaugavetTrace",
    "DeLeeuwMeasure",
    "DeLeeuwVector",
    "DiameterResult",
    "ExtensionDirection",
    "FamilyKind",
    "FiniteMetricSpace",
    "FreeVector",
    "GammaSide",
    "LinearProgram",
    "LipschitzFunction",
    "LpBuilder",
    "LpSolution",
    "LpStatus",
    "MoleculeGap",
    "PartialFunction",
    "PointSubset",
    "PropertyReport",
    "Relation",
    "ReproductionBundle",
    "Sd2pTrace",
    "Sense",
    "SliceSpec",
    "SolveMode",
    "Status",
    "Tolerances",
    "TransportPlan",
    "TrapezoidWitness",
    "ValidationReport",
    "Violation",
    "WitnessBuildTrace",
    "WitnessFamily",
    "annulus",
    "annulus_family",
    "annulus_outer_radius",
    "ball",
    "ball_family",
    "build_d2p_pair_example",
    "build_daugavet_function",
    "build_sd2p_witness",
    "build_ssd2p_witness",
    "check_balls_lemma",
    "check_daugavet_estimate",
    "check_family",
    "check_local",
    "check_ltp_finite",
    "check_ltp_inequality",
    "check_sltp_finite",
    "check_sltp_inequality",
    "combo_diameter",
    "daugavet_gap",
    "daugavet_theta",
    "de_leeuw",
    "free_norm_dual",
    "free_norm_primal",
    "gamma_mass",
    "gen_example_d2p_not_ltp",
    "gen_example_seqltp_not_sltp",
    "gen_example_sltp_not_seq",
    "gen_family",
    "gen_kn",
    "kn_coordinate_set",
    "kn_family",
    "lip_norm",
    "limit_point_family",
    "mcshane_extend",
    "min_tv_representation",
    "molecule_gap_sequence",
    "pair_family",
    "pair_with_molecule",
    "slice_diameter",
    "solve",
    "ssd2p_witness_value",
    "validate",
    "weighted_mcshane_extend",
]
