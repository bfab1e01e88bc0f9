from .panda_engine import (
    PandaConfig,
    PandaEngine,
    PandaFit,
    check_convergence,
    initial_estimate,
    moving_average,
    run_panda,
)
from .inference import InferenceResult, gaussian_sandwich, infer, per_iteration_sigma
from .tuning import TuneGrid, TuneResult, cv_folds, tune

__all__ = [
    "PandaConfig",
    "PandaEngine",
    "PandaFit",
    "check_convergence",
    "initial_estimate",
    "moving_average",
    "run_panda",
    "InferenceResult",
    "gaussian_sandwich",
    "infer",
    "per_iteration_sigma",
    "TuneGrid",
    "TuneResult",
    "cv_folds",
    "tune",
]
