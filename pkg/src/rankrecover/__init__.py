"""Linear pattern recovery from ordinal targets with pairwise ranking losses."""

from .dataset import Dataset, GroundTruth, Split, load_dataset, save_dataset, stratified_split
from .estimators import FitResult, FitSpec, decision_values, fit, gradient, objective
from .evaluate import (
    CVResult,
    RecoveryCurve,
    correlation,
    cross_validate,
    inversion_score,
    noise_robustness_experiment,
    recovery_experiment,
)
from .inspect import FTestReport, ProjectionProfile, f_test_quadratic, lowess, project_profile
from .pairs import PairPolicy, PairSet, build_pairs, pair_count
from .simulate import (
    ParamDesignConfig,
    SimConfig,
    gen_param_design,
    gen_recovery_dataset,
    gen_smooth_noise_volumes,
    linear_target,
    make_ground_truth,
    sigmoid_warp,
)

__version__ = "0.1.0"
