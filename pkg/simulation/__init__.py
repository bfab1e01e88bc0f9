from .designs import (
    AR1Normal,
    BernoulliHalfMixed,
    PredictorLaw,
    SimDesign,
    StdNormal,
    Uniform,
    ar1_correlation,
    generate,
)
from .metrics import classification_rates, mean_deviance, model_error, zero_counts
from .bench import BenchReport, run_benchmark
from .presets import PRESETS, Preset, get_preset, table3, table4, table5

__all__ = [
    "PredictorLaw",
    "StdNormal",
    "AR1Normal",
    "Uniform",
    "BernoulliHalfMixed",
    "ar1_correlation",
    "SimDesign",
    "generate",
    "model_error",
    "zero_counts",
    "mean_deviance",
    "classification_rates",
    "BenchReport",
    "run_benchmark",
    "Preset",
    "PRESETS",
    "get_preset",
    "table3",
    "table4",
    "table5",
]
