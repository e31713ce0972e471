"""Regional consistency probabilities for multi-regional clinical trials.

Evaluate the probability that a region's observed effect is consistent
with the overall effect (given the trial, or a pair of trials, succeeded),
solve for the regional share of the sample that makes this probability
reach a target, and check everything by trial simulation.
"""

from .consistency_one import (
    CpEstimate,
    FractionSolution,
    cp_criterion1,
    cp_criterion2,
    cp_criterion2_binary,
    max_cp_criterion2,
    solve_f1_criterion2,
    solve_f1_criterion2_binary,
    solve_fk_criterion1,
)
from .consistency_two import (
    CSolution,
    FractionPair,
    TwoStudyPlan,
    cp_criterion1_pooled,
    cp_criterion1_pooled_homogeneous,
    cp_criterion2_pooled,
    cp_criterion2_pooled_binary,
    cp_homogeneous_c,
    enumerate_fraction_pairs,
    max_cp_criterion2_pooled,
    solve_c_homogeneous,
    solve_f1_criterion2_pooled,
    solve_f1_criterion2_pooled_binary,
    solve_fk_pooled_equal,
    solve_pair_partner,
)
from .design import (
    BinaryEndpoint,
    DesignParams,
    NormalEndpoint,
    RegionAllocation,
    StudyPlan,
    overall_sample_size,
    sigma_d,
)
from .errors import DegenerateSimulation, EnumerationBudgetExceeded, UnattainableTarget
from .simulate import OneStudyScenario, SimConfig, SimResult, TwoStudyScenario, empirical_cp

__all__ = [
    "BinaryEndpoint",
    "CSolution",
    "CpEstimate",
    "DegenerateSimulation",
    "DesignParams",
    "EnumerationBudgetExceeded",
    "FractionPair",
    "FractionSolution",
    "NormalEndpoint",
    "OneStudyScenario",
    "RegionAllocation",
    "SimConfig",
    "SimResult",
    "StudyPlan",
    "TwoStudyPlan",
    "TwoStudyScenario",
    "UnattainableTarget",
    "cp_criterion1",
    "cp_criterion1_pooled",
    "cp_criterion1_pooled_homogeneous",
    "cp_criterion2",
    "cp_criterion2_binary",
    "cp_criterion2_pooled",
    "cp_criterion2_pooled_binary",
    "cp_homogeneous_c",
    "empirical_cp",
    "enumerate_fraction_pairs",
    "max_cp_criterion2",
    "max_cp_criterion2_pooled",
    "overall_sample_size",
    "sigma_d",
    "solve_c_homogeneous",
    "solve_f1_criterion2",
    "solve_f1_criterion2_binary",
    "solve_f1_criterion2_pooled",
    "solve_f1_criterion2_pooled_binary",
    "solve_fk_criterion1",
    "solve_fk_pooled_equal",
    "solve_pair_partner",
]
