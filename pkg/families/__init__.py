from .base import GlmFamily
from .gaussian import GaussianFamily
from .bernoulli import BernoulliFamily
from .poisson import PoissonFamily
from .exponential import ExponentialFamily
from .negative_binomial import NegativeBinomialFamily
from .factory import canonical_name, get_family

__all__ = [
    "GlmFamily",
    "GaussianFamily",
    "BernoulliFamily",
    "PoissonFamily",
    "ExponentialFamily",
    "NegativeBinomialFamily",
    "canonical_name",
    "get_family",
]
