"""Factory for creating GLM family instances."""
from .base import GlmFamily
from .gaussian import GaussianFamily
from .bernoulli import BernoulliFamily
from .poisson import PoissonFamily
from .exponential import ExponentialFamily
from .negative_binomial import NegativeBinomialFamily
from config import DEFAULT_DISPERSION, DEFAULT_FAMILY
from utils.errors import ConfigError

FAMILY_ALIASES = {
    "linear": "gaussian",
    "normal": "gaussian",
    "logistic": "bernoulli",
    "binomial": "bernoulli",
    "nb": "negative_binomial",
    "negbin": "negative_binomial",
}


def canonical_name(name: str | None) -> str:
    """Resolve aliases such as "logistic" or "nb" to the family identifier."""
    key = (name or DEFAULT_FAMILY).strip().lower().replace("-", "_")
    return FAMILY_ALIASES.get(key, key)


def get_family(
    name: str | None = None,
    nb_failures: int | None = None,
    dispersion: float | None = None,
) -> GlmFamily:
    """Factory to get a GLM family instance.

    Args:
        name: Family name or alias. If None, uses config.DEFAULT_FAMILY
        nb_failures: Number of failures r (negative binomial only, required there)
        dispersion: Gaussian dispersion sigma^2 (Gaussian only, default 1)

    Returns:
        GlmFamily instance

    Raises:
        ConfigError: If the name is unknown or parameters do not fit the family
    """
    key = canonical_name(name)

    families = {
        "gaussian": GaussianFamily,
        "bernoulli": BernoulliFamily,
        "poisson": PoissonFamily,
        "exponential": ExponentialFamily,
        "negative_binomial": NegativeBinomialFamily,
    }

    if key not in families:
        available = list(families.keys())
        raise ConfigError(f"Unknown family: {name}. Available: {available}")

    if key == "negative_binomial":
        if nb_failures is None:
            raise ConfigError("negative_binomial requires nb_failures (the number of failures r)")
        return NegativeBinomialFamily(nb_failures)
    if nb_failures is not None:
        raise ConfigError(f"nb_failures only applies to negative_binomial, not {key}")

    if key == "gaussian":
        return GaussianFamily(DEFAULT_DISPERSION if dispersion is None else dispersion)
    if dispersion is not None and dispersion != 1.0:
        raise ConfigError(f"dispersion only applies to gaussian, not {key}")
    return families[key]()
