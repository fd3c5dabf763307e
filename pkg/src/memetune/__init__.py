"""memetune: swarm + stencil-search memetic tuning of SVM hyperparameters."""

from .controller import ALGORITHMS, RunConfig, RunResult, grid_search, run, strategy_for
from .data import Dataset, gen_banana, load_csv, load_libsvm, normalize_apply, normalize_fit
from .objective import CvObjective, FoldPlan, make_folds, test_error
from .pattern_search import PatternConfig, RefinementResult, poll_points, refine
from .pso import Particle, PsoConfig, Swarm, init_swarm, inertia_at, update_bests
from .selection import SelectionOutcome, SelectionStrategy, select_for_variant
from .space import SearchSpace, SvmParams, clamp, decode, encode
from .svm import Kernel, SmoConfig, SvmModel, dual_objective, kernel_eval, predict, smo_train

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "CvObjective",
    "Dataset",
    "FoldPlan",
    "Kernel",
    "Particle",
    "PatternConfig",
    "PsoConfig",
    "RefinementResult",
    "RunConfig",
    "RunResult",
    "SearchSpace",
    "SelectionOutcome",
    "SelectionStrategy",
    "SmoConfig",
    "Swarm",
    "SvmModel",
    "SvmParams",
    "clamp",
    "decode",
    "dual_objective",
    "encode",
    "gen_banana",
    "grid_search",
    "init_swarm",
    "inertia_at",
    "kernel_eval",
    "load_csv",
    "load_libsvm",
    "make_folds",
    "normalize_apply",
    "normalize_fit",
    "poll_points",
    "predict",
    "refine",
    "run",
    "select_for_variant",
    "smo_train",
    "strategy_for",
    "test_error",
    "update_bests",
]
