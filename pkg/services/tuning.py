"""Hyperparameter selection by K-fold cross-validation, AIC or BIC.

lambda and n_e enter the expected penalty only through their product, so the
main grid runs over lambda * n_e. In l0 mode (bridge with gamma = 2) lambda is
held fixed and n_e is the grid dimension instead.
"""
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from config import DEFAULT_FOLDS, N_JOBS
from families import GlmFamily
from models import Dataset, neg_log_likelihood
from schemes import Bridge, NoiseScheme
from services.panda_engine import PandaConfig, PandaFit, run_panda
from utils.errors import ConfigError, PandaError, TuningError
from utils.rng import derive_seed, draw_seed

logger = logging.getLogger(__name__)

CRITERIA = ("cv", "aic", "bic")

# Scheme attribute each optional grid dimension sets
EXTRA_DIMENSIONS = {"gamma_values": "gamma", "a_values": "a", "sigma2_values": "sigma2"}


@dataclass(frozen=True)
class Candidate:
    """One grid point: a fully specified scheme and the n_e it runs with."""

    index: int
    scheme: NoiseScheme
    n_e: int
    lambda_ne: float
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TuneGrid:
    """Search grid for tune().

    Args:
        scheme_template: Scheme whose lambda (and optional extras) are varied
        lambda_ne_values: Values of lambda * n_e; ignored in l0 mode
        n_e_values: Values of n_e (empty means the config's n_e)
        criterion: "cv", "aic" or "bic"
        folds: Number of CV folds
        gamma_values: Bridge / adaptive-lasso exponents to try
        a_values: SCAD shapes to try
        sigma2_values: Elastic-net ridge variances to try
        sigma2_ratio: If set, elastic-net sigma2 follows lambda as sigma2_ratio * lambda
    """

    scheme_template: NoiseScheme
    lambda_ne_values: tuple[float, ...] = ()
    n_e_values: tuple[int, ...] = ()
    criterion: str = "cv"
    folds: int = DEFAULT_FOLDS
    gamma_values: tuple[float, ...] = ()
    a_values: tuple[float, ...] = ()
    sigma2_values: tuple[float, ...] = ()
    sigma2_ratio: float | None = None

    def __post_init__(self):
        for name in ("lambda_ne_values", "n_e_values", *EXTRA_DIMENSIONS):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "criterion", str(self.criterion).lower())
        self.validate()

    @property
    def l0_mode(self) -> bool:
        return isinstance(self.scheme_template, Bridge) and self.scheme_template.is_l0

    def validate(self) -> None:
        if self.criterion not in CRITERIA:
            raise ConfigError(f"Unknown criterion: {self.criterion}. Available: {list(CRITERIA)}")
        if self.criterion == "cv" and (int(self.folds) != self.folds or self.folds < 2):
            raise ConfigError(f"cross-validation needs folds >= 2, got {self.folds}")
        if self.l0_mode:
            if not self.n_e_values:
                raise ConfigError("l0 tuning runs over n_e; give at least one n_e value")
        elif not self.lambda_ne_values:
            raise ConfigError("lambda_ne_values must not be empty")
        if any(not np.isfinite(v) or v <= 0 for v in self.lambda_ne_values):
            raise ConfigError(f"lambda_ne_values must be positive, got {list(self.lambda_ne_values)}")
        if any(int(v) != v or v < 1 for v in self.n_e_values):
            raise ConfigError(f"n_e_values must be positive integers, got {list(self.n_e_values)}")
        for grid_name, attr in EXTRA_DIMENSIONS.items():
            if getattr(self, grid_name) and not hasattr(self.scheme_template, attr):
                raise ConfigError(f"{grid_name} given but scheme '{self.scheme_template.name}' has no '{attr}'")
        if self.sigma2_ratio is not None:
            if self.sigma2_values:
                raise ConfigError("give either sigma2_values or sigma2_ratio, not both")
            if not hasattr(self.scheme_template, "sigma2") or not self.sigma2_ratio >= 0:
                raise ConfigError(f"sigma2_ratio needs an elastic-net template and a value >= 0, got {self.sigma2_ratio}")

    def candidates(self, default_n_e: int) -> list[Candidate]:
        """Expand the grid in a fixed order."""
        n_es = [int(v) for v in self.n_e_values] or [int(default_n_e)]
        extras = {attr: getattr(self, grid) for grid, attr in EXTRA_DIMENSIONS.items() if getattr(self, grid)}
        extra_keys = list(extras)
        extra_combos = list(itertools.product(*extras.values())) if extras else [()]

        out: list[Candidate] = []
        if self.l0_mode:
            lam = self.scheme_template.lam
            for n_e, combo in itertools.product(n_es, extra_combos):
                params = dict(zip(extra_keys, combo))
                scheme = self.scheme_template.with_params(**params)
                out.append(Candidate(len(out), scheme, n_e, lam * n_e, params))
            return out

        for lambda_ne, n_e, combo in itertools.product(self.lambda_ne_values, n_es, extra_combos):
            params = dict(zip(extra_keys, combo))
            lam = float(lambda_ne) / n_e
            if self.sigma2_ratio is not None:
                params["sigma2"] = self.sigma2_ratio * lam
            scheme = self.scheme_template.with_params(lam=lam, **params)
            out.append(Candidate(len(out), scheme, n_e, float(lambda_ne), params))
        return out

    def to_dict(self) -> dict:
        return {
            "scheme_template": self.scheme_template.to_dict(),
            "lambda_ne_values": list(self.lambda_ne_values),
            "n_e_values": list(self.n_e_values),
            "criterion": self.criterion,
            "folds": self.folds,
            "sigma2_ratio": self.sigma2_ratio,
            **{name: list(getattr(self, name)) for name in EXTRA_DIMENSIONS},
        }


@dataclass(frozen=True, eq=False)
class TuneResult:
    """Selected scheme and config, the full score table and the full-data refit."""

    best_scheme: NoiseScheme
    best_config: PandaConfig
    scores: pd.DataFrame
    best_index: int
    refit: PandaFit | None = None

    def to_dict(self) -> dict:
        return {
            "best_index": self.best_index,
            "best_scheme": self.best_scheme.to_dict(),
            "best_config": self.best_config.to_dict(),
            "scores": self.scores.to_dict(orient="records"),
        }


def cv_folds(seed: int, n: int, K: int) -> list[np.ndarray]:
    """Split range(n) into K test folds; a pure function of (seed, n, K)."""
    if K < 2 or K > n:
        raise ConfigError(f"need 2 <= K <= n for cross-validation, got K={K}, n={n}")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(n), int(K)]))
    return [np.sort(fold) for fold in np.array_split(rng.permutation(n), K)]


def information_criterion(criterion: str, nll: float, k: int, n: int) -> float:
    """AIC = 2 nll + 2k, BIC = 2 nll + k log n."""
    if criterion == "aic":
        return 2.0 * nll + 2.0 * k
    if criterion == "bic":
        return 2.0 * nll + k * np.log(n)
    raise ConfigError(f"Unknown information criterion: {criterion}")


def _evaluate_candidate(
    candidate: Candidate,
    family: GlmFamily,
    data: Dataset,
    config: PandaConfig,
    criterion: str,
    folds: int,
    master_seed: int,
) -> dict:
    """Score one candidate; failures are returned as an error tag, never raised."""
    row = {
        "candidate": candidate.index,
        "scheme": candidate.scheme.name,
        "lambda_ne": candidate.lambda_ne,
        "n_e": candidate.n_e,
        "lam": candidate.scheme.lam,
        **candidate.params,
        "score": np.nan,
        "n_zero": np.nan,
        "error": "",
    }
    try:
        if criterion == "cv":
            total = 0.0
            for k, test_rows in enumerate(cv_folds(master_seed, data.n, folds)):
                train_rows = np.setdiff1d(np.arange(data.n), test_rows)
                cfg = config.replace(n_e=candidate.n_e, seed=derive_seed(master_seed, candidate.index, k))
                fit = run_panda(family, data.subset(train_rows), candidate.scheme, cfg)
                test = data.subset(test_rows)
                total += float(np.sum(family.nll_terms(test.y, fit.linear_predictor(test.X))))
            row["score"] = total / data.n
        else:
            cfg = config.replace(n_e=candidate.n_e, seed=derive_seed(master_seed, candidate.index, 0))
            fit = run_panda(family, data, candidate.scheme, cfg)
            nll = neg_log_likelihood(family, fit.data, fit.theta_hat)
            k = int(np.count_nonzero(fit.theta_hat.slopes)) + 1
            row["score"] = information_criterion(criterion, nll, k, data.n)
            row["n_zero"] = int(fit.zero_mask.sum())
        if not np.isfinite(row["score"]):
            raise TuningError(f"non-finite score {row['score']}")
    except (PandaError, np.linalg.LinAlgError) as e:
        row["score"] = np.nan
        row["error"] = f"{type(e).__name__}: {e}"
    return row


def tune(
    family: GlmFamily,
    data: Dataset,
    grid: TuneGrid,
    config: PandaConfig | None = None,
    n_jobs: int = N_JOBS,
    refit: bool = True,
) -> TuneResult:
    """Evaluate every grid candidate and return the best one.

    Args:
        family: Response family
        data: Observed data
        grid: Search grid and criterion
        config: Base PANDA settings; n_e and seed are set per candidate
        n_jobs: Worker processes (1 runs in-process)
        refit: Refit the selected candidate on the full data

    Returns:
        TuneResult; ties go to the smallest lambda * n_e, then the smallest n_e

    Raises:
        TuningError: If every candidate fails
    """
    config = config or PandaConfig()
    master_seed = config.seed
    if master_seed is None:
        master_seed = draw_seed()
        logger.warning(f"TUNE: no seed given; using seed {master_seed}")

    candidates = grid.candidates(config.n_e)
    logger.info(f"{'='*60}")
    logger.info(f"TUNE: {len(candidates)} candidates | criterion={grid.criterion} "
                f"| scheme={grid.scheme_template.name} | l0_mode={grid.l0_mode}")
    logger.info(f"{'='*60}")

    args = [(c, family, data, config, grid.criterion, grid.folds, master_seed) for c in candidates]
    if n_jobs > 1 and len(candidates) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            rows = list(pool.map(_evaluate_candidate, *zip(*args)))
    else:
        rows = [_evaluate_candidate(*a) for a in args]
    rows.sort(key=lambda row: row["candidate"])

    for row in rows:
        status = f"score={row['score']:.6f}" if not row["error"] else f"FAILED {row['error']}"
        logger.info(f"[{row['candidate']}] lambda_ne={row['lambda_ne']:g} n_e={row['n_e']} {status}")

    scores = pd.DataFrame(rows)
    ok = [row for row in rows if not row["error"]]
    if not ok:
        raise TuningError(f"all {len(rows)} tuning candidates failed", scores=scores)

    best_row = min(ok, key=lambda row: (row["score"], row["lambda_ne"], row["n_e"]))
    best = candidates[best_row["candidate"]]
    best_config = config.replace(n_e=best.n_e, seed=derive_seed(master_seed, best.index, 0))
    logger.info(f"BEST: candidate {best.index} lambda_ne={best.lambda_ne:g} n_e={best.n_e} "
                f"score={best_row['score']:.6f}")

    fit = run_panda(family, data, best.scheme, best_config) if refit else None
    return TuneResult(
        best_scheme=best.scheme,
        best_config=best_config,
        scores=scores,
        best_index=best.index,
        refit=fit,
    )
