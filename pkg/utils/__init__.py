from .errors import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    ConfigError,
    DataError,
    DimensionError,
    DomainError,
    FitError,
    InferenceError,
    PandaError,
    SingularDesignError,
    TuningError,
    UnderAugmentationError,
    UsageError,
)
from .rng import derive_seed, draw_seed, make_rng
