from .base import NoiseScheme, slopes_of
from .bridge import Bridge
from .elastic_net import AdaptiveLasso, ElasticNet
from .scad import Scad
from .group_lasso import GroupLasso
from .fused import FusedLasso, FusedRidge, cyclic_difference
from .factory import SCHEME_NAMES, get_scheme
from .sampling import NoiseBatch, augment, sample_batch

__all__ = [
    "NoiseScheme",
    "Bridge",
    "ElasticNet",
    "AdaptiveLasso",
    "Scad",
    "GroupLasso",
    "FusedRidge",
    "FusedLasso",
    "cyclic_difference",
    "SCHEME_NAMES",
    "get_scheme",
    "slopes_of",
    "NoiseBatch",
    "sample_batch",
    "augment",
]
