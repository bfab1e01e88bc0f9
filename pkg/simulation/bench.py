"""Replicate harness: model error, zero selection, coverage and test deviance."""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from config import N_JOBS
from families import BernoulliFamily, GaussianFamily
from models import fit_mle
from schemes import AdaptiveLasso, NoiseScheme
from services.inference import infer
from services.panda_engine import PandaConfig, run_panda
from services.tuning import TuneGrid, tune
from utils.errors import ConfigError, FitError, PandaError
from utils.rng import derive_seed
from .designs import SimDesign, generate
from .metrics import classification_rates, mean_deviance, model_error, zero_counts

logger = logging.getLogger(__name__)

COMPARATORS = ("mle", "ols")

# derive_seed slots for one replicate; 0 and 1 are the training and test draws
PANDA_SLOT = 2


def _fit_comparator(comparator: str, design: SimDesign, data):
    family = GaussianFamily() if comparator == "ols" else design.family
    return fit_mle(family, data.center())


def _with_pilot(scheme: NoiseScheme, tune_grid: TuneGrid | None, pilot: np.ndarray):
    """Give adaptive-lasso schemes this replicate's un-penalized slopes as pilot."""
    if isinstance(scheme, AdaptiveLasso):
        scheme = scheme.with_params(pilot=pilot)
    if tune_grid is not None and isinstance(tune_grid.scheme_template, AdaptiveLasso):
        tune_grid = replace(tune_grid, scheme_template=tune_grid.scheme_template.with_params(pilot=pilot))
    return scheme, tune_grid


def _run_replicate(
    index: int,
    design: SimDesign,
    scheme: NoiseScheme,
    config: PandaConfig,
    comparator: str,
    tune_grid: TuneGrid | None,
    with_inference: bool,
    alpha: float,
) -> dict:
    """Fit one replicate; errors are recorded in the row instead of raised."""
    record: dict = {"replicate": index, "status": "ok", "error": ""}
    try:
        data, beta_true = generate(design, index)
        test, _ = generate(design, index, test=True)
        cfg = config.replace(seed=derive_seed(design.seed, index, PANDA_SLOT))

        comp = None
        try:
            comp = _fit_comparator(comparator, design, data)
            record["me_comparator"] = model_error(comp.slopes, beta_true, design.predictor_law)
            eta_comp = comp.linear_predictor(data.center().apply_centering(test.X))
            record["test_dev_comparator"] = mean_deviance(design.family, test.y, eta_comp)
        except PandaError as e:
            record["me_comparator"] = record["test_dev_comparator"] = np.nan
            record["comparator_error"] = f"{type(e).__name__}: {e}"

        needs_pilot = isinstance(scheme, AdaptiveLasso) or (
            tune_grid is not None and isinstance(tune_grid.scheme_template, AdaptiveLasso)
        )
        if needs_pilot:
            if comp is None:
                raise FitError(f"adaptive lasso needs a pilot fit: {record['comparator_error']}")
            scheme, tune_grid = _with_pilot(scheme, tune_grid, comp.slopes)

        if tune_grid is not None:
            result = tune(design.family, data, tune_grid, cfg, n_jobs=1)
            fit = result.refit
            record["tuned_lambda_ne"] = float(result.scores.loc[result.best_index, "lambda_ne"])
            record["tuned_n_e"] = int(result.best_config.n_e)
        else:
            fit = run_panda(design.family, data, scheme, cfg)

        beta_hat = fit.theta_hat.slopes
        record["converged_at"] = fit.converged_at if fit.converged_at is not None else np.nan
        record["me_panda"] = model_error(beta_hat, beta_true, design.predictor_law)
        correct, incorrect = zero_counts(fit.zero_mask, design.true_zero_mask)
        record["correct_zeros"], record["incorrect_zeros"] = correct, incorrect
        record["test_dev_panda"] = mean_deviance(design.family, test.y, fit.linear_predictor(test.X))

        if isinstance(design.family, BernoulliFamily):
            record.update(classification_rates(test.y, fit.predict(test.X)))

        with np.errstate(divide="ignore", invalid="ignore"):
            record["rme"] = float(np.divide(100.0 * record["me_panda"], record["me_comparator"]))
            record["dev_ratio"] = float(np.divide(record["test_dev_panda"], record["test_dev_comparator"]))

        if with_inference:
            try:
                res = infer(fit, alpha=alpha)
                lower, upper = res.ci_lower[-design.p:], res.ci_upper[-design.p:]
                for j in range(design.p):
                    record[f"covered_{j + 1}"] = float(lower[j] <= beta_true[j] <= upper[j])
                    record[f"width_{j + 1}"] = float(upper[j] - lower[j])
            except PandaError as e:
                record["inference_error"] = f"{type(e).__name__}: {e}"
    except PandaError as e:
        record["status"] = "failed"
        record["error"] = f"{type(e).__name__}: {e}"
    return record


def _nan_to_none(value):
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


@dataclass(frozen=True, eq=False)
class BenchReport:
    """Aggregates over successful replicates plus the raw per-replicate records.

    ``mrme`` is the median of 100 * ME(PANDA) / ME(comparator).
    """

    design: SimDesign
    scheme: NoiseScheme
    config: PandaConfig
    comparator: str
    records: pd.DataFrame
    n_ok: int
    n_failed: int
    mrme: float
    correct_zeros: float
    incorrect_zeros: float
    coverage_by_coef: np.ndarray
    ci_width_by_coef: np.ndarray
    median_dev_ratio: float
    classification: dict = field(default_factory=dict)
    elapsed_ms: int = 0

    def _group_mean(self, values: np.ndarray, zero: bool) -> float:
        mask = self.design.true_zero_mask if zero else ~self.design.true_zero_mask
        chosen = values[mask]
        if chosen.size == 0 or np.all(np.isnan(chosen)):
            return float("nan")
        return float(np.nanmean(chosen))

    @property
    def coverage_zero(self) -> float:
        return self._group_mean(self.coverage_by_coef, zero=True)

    @property
    def coverage_nonzero(self) -> float:
        return self._group_mean(self.coverage_by_coef, zero=False)

    @property
    def width_zero(self) -> float:
        return self._group_mean(self.ci_width_by_coef, zero=True)

    @property
    def width_nonzero(self) -> float:
        return self._group_mean(self.ci_width_by_coef, zero=False)

    def summary(self) -> dict:
        """JSON-ready aggregates; NaN becomes None."""
        out = {
            "design": self.design.to_dict(),
            "scheme": self.scheme.to_dict(),
            "config": self.config.to_dict(),
            "comparator": self.comparator,
            "n_ok": self.n_ok,
            "n_failed": self.n_failed,
            "mrme": self.mrme,
            "correct_zeros": self.correct_zeros,
            "incorrect_zeros": self.incorrect_zeros,
            "coverage_zero": self.coverage_zero,
            "coverage_nonzero": self.coverage_nonzero,
            "width_zero": self.width_zero,
            "width_nonzero": self.width_nonzero,
            "median_dev_ratio": self.median_dev_ratio,
            "coverage_by_coef": [_nan_to_none(float(v)) for v in self.coverage_by_coef],
            "ci_width_by_coef": [_nan_to_none(float(v)) for v in self.ci_width_by_coef],
            **{k: _nan_to_none(v) for k, v in self.classification.items()},
        }
        return {k: _nan_to_none(v) for k, v in out.items()}


def _column_stat(frame: pd.DataFrame, column: str, how: str) -> float:
    if column not in frame or frame[column].dropna().empty:
        return float("nan")
    values = frame[column].astype(float).replace([np.inf, -np.inf], np.nan).dropna()
    if values.empty:
        return float("nan")
    return float(values.median() if how == "median" else values.mean())


def run_benchmark(
    design: SimDesign,
    scheme: NoiseScheme,
    config: PandaConfig | None = None,
    comparator: str = "mle",
    tune_grid: TuneGrid | None = None,
    with_inference: bool = True,
    alpha: float | None = None,
    n_jobs: int = N_JOBS,
) -> BenchReport:
    """Run PANDA and the comparator on every replicate of a design.

    Args:
        design: Data-generating design
        scheme: Noise scheme (ignored when tune_grid is given)
        config: PANDA settings; the seed is derived per replicate
        comparator: "mle" (un-penalized fit of the design's family) or "ols"
        tune_grid: Tune per replicate instead of using a fixed scheme
        with_inference: Record CI coverage and width per coefficient
        alpha: CI level (default config.alpha)
        n_jobs: Worker processes

    Returns:
        BenchReport; failed replicates are counted and excluded from aggregates
    """
    start_time = time.time()
    config = config or PandaConfig()
    comparator = comparator.lower()
    if comparator not in COMPARATORS:
        raise ConfigError(f"Unknown comparator: {comparator}. Available: {list(COMPARATORS)}")
    alpha = config.alpha if alpha is None else alpha

    logger.info(f"{'='*60}")
    logger.info(f"BENCHMARK: family={design.family.name} scheme={scheme.name} n={design.n} "
                f"p={design.p} replicates={design.replicates} comparator={comparator}")
    logger.info(f"{'='*60}")

    indices = list(range(design.replicates))
    fixed = (design, scheme, config, comparator, tune_grid, with_inference, alpha)
    if n_jobs > 1 and len(indices) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            records = list(pool.map(_run_replicate, indices, *[[arg] * len(indices) for arg in fixed]))
    else:
        records = [_run_replicate(i, *fixed) for i in indices]

    records.sort(key=lambda r: r["replicate"])
    for record in records:
        if record["status"] != "ok":
            logger.warning(f"[{record['replicate']}] REPLICATE FAILED: {record['error']}")

    frame = pd.DataFrame(records)
    ok = frame[frame["status"] == "ok"]
    n_failed = len(frame) - len(ok)

    coverage = np.array([100.0 * _column_stat(ok, f"covered_{j + 1}", "mean") for j in range(design.p)])
    widths = np.array([_column_stat(ok, f"width_{j + 1}", "mean") for j in range(design.p)])
    classification = {}
    if isinstance(design.family, BernoulliFamily):
        classification = {k: _column_stat(ok, k, "mean") for k in ("accuracy", "sensitivity", "specificity")}

    report = BenchReport(
        design=design,
        scheme=scheme,
        config=config,
        comparator=comparator,
        records=frame,
        n_ok=len(ok),
        n_failed=n_failed,
        mrme=_column_stat(ok, "rme", "median"),
        correct_zeros=_column_stat(ok, "correct_zeros", "mean"),
        incorrect_zeros=_column_stat(ok, "incorrect_zeros", "mean"),
        coverage_by_coef=coverage,
        ci_width_by_coef=widths,
        median_dev_ratio=_column_stat(ok, "dev_ratio", "median"),
        classification=classification,
        elapsed_ms=int((time.time() - start_time) * 1000),
    )
    logger.info(f"DONE: ok={report.n_ok} failed={n_failed} mrme={report.mrme:.2f} "
                f"zeros={report.correct_zeros:.2f}/{report.incorrect_zeros:.2f} | {report.elapsed_ms}ms")
    return report
