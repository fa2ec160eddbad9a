"""Exact laboratory for rank-one Sidon constructions and their Poisson suspensions."""

from .construction import (
    Construction,
    ConstructionParams,
    Explicit,
    LevelSet,
    PaperSidon,
    StageGeometry,
    difference,
    intersect,
    shift,
    stage_geometry,
    symmetric_difference,
    tower_set,
    union,
)
from .dynamics import (
    ShiftedTerm,
    SidonWitness,
    Theorem3Report,
    expr_union_measure,
    intersect_shifted_measure,
    mixing_curve,
    sidon_scan,
    sidon_witness,
    spectral_condition_report,
    theorem3_stats,
)
from .poisson import (
    Configuration,
    CylinderSpec,
    ExactPoissonValue,
    JointFactor,
    JointSpec,
    cylinder_measure,
    evolve_configuration,
    joint_count_distribution,
    joint_probability,
    mixing_gap,
    monte_carlo_joint,
    sample_configuration,
)

__version__ = "0.1.0"
