"""PANDA engine - iterative noise augmentation with moving-average stabilization."""
import logging
import time
from collections import deque
from dataclasses import asdict, dataclass, fields
from typing import Any, Sequence

import numpy as np
import pandas as pd
from scipy.stats import norm

from config import (
    DEFAULT_ALPHA,
    DEFAULT_CONVERGENCE,
    DEFAULT_M,
    DEFAULT_MAX_ITER,
    DEFAULT_N_E,
    DEFAULT_R,
    DEFAULT_TAU,
    DEFAULT_TAU0,
    DEFAULT_ZTEST_REGIME,
    INIT_RIDGE_LAMBDA,
    MAX_FIT_RETRIES,
)
from families import GlmFamily
from models import CoefVector, Dataset, fit_mle, neg_log_likelihood
from schemes import NoiseBatch, NoiseScheme, augment, sample_batch
from utils.errors import ConfigError, DomainError, FitError, UnderAugmentationError
from utils.rng import make_rng

logger = logging.getLogger(__name__)

CONVERGENCE_MODES = ("relchange", "ztest", "both")
ZTEST_REGIMES = ("large_ne", "large_m")
INIT_MODES = ("auto", "mle", "ridge")


@dataclass(frozen=True)
class PandaConfig:
    """Algorithmic settings of one PANDA run.

    ``max_iter`` is the iteration cap before convergence; after convergence
    (or the cap) the engine always runs ``m + r`` further iterations.
    """

    n_e: int = DEFAULT_N_E
    m: int = DEFAULT_M
    r: int = DEFAULT_R
    max_iter: int = DEFAULT_MAX_ITER
    tau: float = DEFAULT_TAU
    tau0: float = DEFAULT_TAU0
    convergence: str = DEFAULT_CONVERGENCE
    alpha: float = DEFAULT_ALPHA
    seed: int | None = None
    ztest_regime: str = DEFAULT_ZTEST_REGIME
    partial_window: bool = True
    fit_intercept: bool = True
    init: str = "auto"
    max_retries: int = MAX_FIT_RETRIES

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("n_e", "m", "r", "max_iter"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value}")
        if self.max_iter < self.m:
            raise ConfigError(f"max_iter ({self.max_iter}) must be at least m ({self.m})")
        if not self.tau >= 0:
            raise ConfigError(f"tau must be >= 0, got {self.tau}")
        if not self.tau0 > 0:
            raise ConfigError(f"tau0 must be > 0, got {self.tau0}")
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.convergence not in CONVERGENCE_MODES:
            raise ConfigError(f"Unknown convergence mode: {self.convergence}. Available: {list(CONVERGENCE_MODES)}")
        if self.ztest_regime not in ZTEST_REGIMES:
            raise ConfigError(f"Unknown z-test regime: {self.ztest_regime}. Available: {list(ZTEST_REGIMES)}")
        if self.init not in INIT_MODES:
            raise ConfigError(f"Unknown init mode: {self.init}. Available: {list(INIT_MODES)}")
        if self.max_retries < 0:
            raise ConfigError(f"max_retries must be >= 0, got {self.max_retries}")

    def replace(self, **changes) -> "PandaConfig":
        values = asdict(self)
        values.update(changes)
        return PandaConfig(**values)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_mapping(cls, mapping: dict[str, Any]) -> "PandaConfig":
        """Build a config from a settings mapping, ignoring None values."""
        known = {f.name for f in fields(cls)}
        unknown = [k for k, v in mapping.items() if k not in known and v is not None]
        if unknown:
            raise ConfigError(f"Unknown PANDA settings: {unknown}")
        return cls(**{k: v for k, v in mapping.items() if v is not None})


@dataclass(frozen=True)
class ThetaContext:
    """Coefficient state needed by the convergence z-test."""

    family: GlmFamily
    scheme: NoiseScheme
    n_e: int
    theta_prev: CoefVector
    theta_curr: CoefVector


@dataclass(frozen=True)
class ConvergenceDecision:
    converged: bool
    rel_change: float | None = None
    z: float | None = None
    c1_prev: float | None = None
    c1_curr: float | None = None
    mode_used: str = "relchange"


def moving_average(history: Sequence[CoefVector], m: int) -> CoefVector:
    """Coordinate-wise mean of the last min(m, len(history)) estimates."""
    if not history:
        raise ValueError("moving_average needs a non-empty history")
    window = list(history)[-m:]
    return CoefVector.from_array(np.mean([c.as_array() for c in window], axis=0))


def c1_statistic(family: GlmFamily, scheme: NoiseScheme, theta: CoefVector, n_e: int) -> float:
    """Scale of the augmented-loss fluctuation at theta.

    Equals (n_e / 2) * sqrt(kappa(theta0)) * theta^T Sigma(theta) theta, which for
    bridge noise is (lam n_e / 2) * sqrt(kappa * ||v v^T||_F^2) with
    v = theta |theta|^(-gamma/2).
    """
    quad = scheme.quadratic_form(theta, n_e)
    return 0.5 * n_e * np.sqrt(family.kappa(theta.intercept)) * quad


def check_convergence(
    loss_bar_trace: Sequence[float],
    theta_context: ThetaContext | None,
    config: PandaConfig,
) -> ConvergenceDecision:
    """Decide convergence from the moving-average loss trace.

    Args:
        loss_bar_trace: Averaged losses l-bar, oldest first
        theta_context: Coefficient state for the z-test (None skips it)
        config: Supplies the mode, tau, alpha, m and the z-test regime

    Returns:
        ConvergenceDecision with both diagnostics whenever they are computable
    """
    trace = np.asarray(loss_bar_trace, dtype=float)
    rel_change = z = c1_prev = c1_curr = None

    if trace.size >= 2:
        prev, curr = trace[-2], trace[-1]
        rel_change = abs(curr - prev) / abs(prev) if prev != 0 else np.inf
    rel_ok = trace.size >= config.m + 1 and rel_change is not None and rel_change < config.tau

    if theta_context is not None and trace.size >= 2:
        ctx = theta_context
        c1_prev = c1_statistic(ctx.family, ctx.scheme, ctx.theta_prev, ctx.n_e)
        c1_curr = c1_statistic(ctx.family, ctx.scheme, ctx.theta_curr, ctx.n_e)
        size = ctx.n_e if config.ztest_regime == "large_ne" else config.m
        denom = (c1_prev ** 2 + c1_curr ** 2) / size
        if denom > 0 and np.isfinite(denom):
            # kappa = 8 refers to the squared-residual loss, twice the Gaussian nll per sigma^2
            d = ctx.family.loss_scale * (trace[-1] - trace[-2])
            z = float(d / np.sqrt(denom))

    if config.convergence == "relchange":
        return ConvergenceDecision(rel_ok, rel_change, z, c1_prev, c1_curr, "relchange")

    if z is None:
        # all slopes at zero (or no z available): fall back to the relative change
        return ConvergenceDecision(rel_ok, rel_change, z, c1_prev, c1_curr, "relchange")

    z_ok = abs(z) <= norm.ppf(1.0 - config.alpha / 2.0)
    if config.convergence == "ztest":
        return ConvergenceDecision(z_ok, rel_change, z, c1_prev, c1_curr, "ztest")
    return ConvergenceDecision(z_ok and rel_ok, rel_change, z, c1_prev, c1_curr, "both")


@dataclass(frozen=True, eq=False)
class PandaFit:
    """Result of one PANDA run.

    ``banked`` holds the r moving-average estimates after burn-in and
    ``theta_bank_raw`` the matching per-iteration fits with their ``batches``.
    Slopes whose banked magnitudes all stay below tau0 are set to zero.
    """

    theta_hat: CoefVector
    raw_mean: CoefVector
    zero_mask: np.ndarray
    banked: tuple[CoefVector, ...]
    theta_bank_raw: tuple[CoefVector, ...]
    batches: tuple[NoiseBatch, ...]
    loss_trace: np.ndarray
    z_trace: np.ndarray
    rel_trace: np.ndarray
    theta_trace: np.ndarray
    converged_at: int | None
    data: Dataset
    family: GlmFamily
    scheme: NoiseScheme
    config: PandaConfig
    warnings: tuple[str, ...] = ()
    logs: tuple[str, ...] = ()
    elapsed_ms: int = 0

    @property
    def converged(self) -> bool:
        return self.converged_at is not None

    @property
    def n_iterations(self) -> int:
        return self.loss_trace.shape[0]

    @property
    def column_names(self) -> tuple[str, ...]:
        return self.data.column_names

    def linear_predictor(self, X_raw: np.ndarray) -> np.ndarray:
        """Linear predictor for raw (uncentered) predictors."""
        return self.theta_hat.linear_predictor(self.data.apply_centering(X_raw))

    def predict(self, X_raw: np.ndarray) -> np.ndarray:
        """Fitted mean response for raw predictors."""
        return self.family.mean(self.linear_predictor(X_raw))

    def coefficient_frame(self) -> pd.DataFrame:
        names = ["(Intercept)"] + list(self.column_names)
        return pd.DataFrame({
            "name": names,
            "raw_estimate": self.raw_mean.as_array(),
            "estimate": self.theta_hat.as_array(),
            "is_zero": np.concatenate(([False], self.zero_mask)),
        })

    def trace_frame(self) -> pd.DataFrame:
        """One row per iteration: t, loss, loss_bar, z, rel_change and theta-bar coordinates."""
        frame = pd.DataFrame({
            "t": np.arange(1, self.n_iterations + 1),
            "loss": self.loss_trace[:, 0],
            "loss_bar": self.loss_trace[:, 1],
            "z": self.z_trace,
            "rel_change": self.rel_trace,
        })
        names = ["(Intercept)"] + list(self.column_names)
        for j, name in enumerate(names):
            frame[f"theta_bar[{name}]"] = self.theta_trace[:, j]
        return frame

    def summary(self) -> dict:
        return {
            "family": self.family.to_dict(),
            "scheme": self.scheme.to_dict(),
            "config": self.config.to_dict(),
            "converged_at": self.converged_at,
            "iterations": self.n_iterations,
            "n_zero": int(self.zero_mask.sum()),
            "elapsed_ms": self.elapsed_ms,
            "warnings": list(self.warnings),
        }


def initial_estimate(family: GlmFamily, data: Dataset, config: PandaConfig) -> CoefVector:
    """Un-penalized MLE when n > p (+1 with an intercept), otherwise a small ridge fit."""
    n_params = data.p + int(config.fit_intercept)
    if config.init == "mle" or (config.init == "auto" and data.n > n_params):
        try:
            return fit_mle(family, data, fit_intercept=config.fit_intercept)
        except FitError as e:
            if config.init == "mle":
                raise
            logger.warning(f"INIT: MLE failed ({e}); falling back to ridge")
    return fit_mle(family, data, fit_intercept=config.fit_intercept, ridge=INIT_RIDGE_LAMBDA)


class PandaEngine:
    """Runs the sample / augment / refit loop for one family and noise scheme."""

    def __init__(self, family: GlmFamily, scheme: NoiseScheme, config: PandaConfig | None = None):
        self.family = family
        self.scheme = scheme
        self.config = config or PandaConfig()

    def initial_estimate(self, data: Dataset) -> CoefVector:
        return initial_estimate(self.family, data, self.config)

    def _iterate(
        self,
        data: Dataset,
        theta_bar: CoefVector,
        rng: np.random.Generator,
        t: int,
        logs: list,
    ) -> tuple[NoiseBatch, Dataset, CoefVector]:
        """Sample one batch, augment and refit; retries with fresh noise on failure."""
        cfg = self.config
        attempts = cfg.max_retries + 1
        for attempt in range(1, attempts + 1):
            batch = sample_batch(self.scheme, theta_bar, cfg.n_e, self.family, data.y, rng)
            augmented = augment(data, batch)
            try:
                theta_hat = fit_mle(
                    self.family, augmented, init=theta_bar, fit_intercept=cfg.fit_intercept
                )
                return batch, augmented, theta_hat
            except (FitError, DomainError) as e:
                logger.warning(f"[{t}] FIT FAILED (attempt {attempt}/{attempts}): {e}")
                logs.append(f"[{t}] FIT FAILED (attempt {attempt}/{attempts}): {e}")
                last_error = e
        raise FitError(
            f"augmented fit failed at iteration {t} after {attempts} attempts: {last_error}",
            last_iterate=theta_bar,
        )

    def run(self, data: Dataset, init: CoefVector | None = None) -> PandaFit:
        """Run PANDA on data.

        Args:
            data: Observed data; predictors are centered before fitting
            init: Optional initial estimate (default: see initial_estimate)

        Returns:
            PandaFit with thresholded estimates, banked iterates and traces
        """
        start_time = time.time()
        cfg, family, scheme = self.config, self.family, self.scheme
        if cfg.tau0 <= scheme.eps_theta:
            raise ConfigError(f"tau0 ({cfg.tau0}) must exceed eps_theta ({scheme.eps_theta})")

        prepared = data.center()
        family.validate_response(prepared.y)
        if prepared.n + cfg.n_e <= prepared.p:
            raise UnderAugmentationError(
                f"n + n_e = {prepared.n + cfg.n_e} must exceed p = {prepared.p}"
            )

        rng = make_rng(cfg.seed)
        logs: list[str] = []
        warnings: list[str] = []

        logger.info(f"{'='*60}")
        logger.info(f"PANDA: family={family.name} scheme={scheme.name} n={prepared.n} p={prepared.p}")
        logger.info(f"CONFIG: n_e={cfg.n_e} m={cfg.m} r={cfg.r} max_iter={cfg.max_iter} "
                    f"tau={cfg.tau} tau0={cfg.tau0} convergence={cfg.convergence}")
        logger.info(f"{'='*60}")

        theta_bar = init if init is not None else self.initial_estimate(prepared)
        if theta_bar.p != prepared.p:
            raise ConfigError(f"init has {theta_bar.p} slopes, data has {prepared.p} predictors")

        history: deque[CoefVector] = deque(maxlen=cfg.m)
        recent_losses: deque[float] = deque(maxlen=cfg.m)
        loss_rows, z_rows, rel_rows, theta_rows, loss_bars = [], [], [], [], []

        def advance(t: int) -> tuple[NoiseBatch, CoefVector, ConvergenceDecision]:
            nonlocal theta_bar
            theta_prev = theta_bar
            batch, augmented, theta_hat = self._iterate(prepared, theta_prev, rng, t, logs)
            history.append(theta_hat)
            if cfg.partial_window or len(history) == cfg.m:
                theta_bar = moving_average(history, cfg.m)
            else:
                theta_bar = theta_hat

            loss = neg_log_likelihood(family, augmented, theta_bar)
            recent_losses.append(loss)
            if cfg.partial_window or len(recent_losses) == cfg.m:
                loss_bar = float(np.mean(recent_losses))
            else:
                loss_bar = loss
            loss_bars.append(loss_bar)

            context = ThetaContext(family, scheme, cfg.n_e, theta_prev, theta_bar)
            decision = check_convergence(loss_bars, context, cfg)

            loss_rows.append((loss, loss_bar))
            z_rows.append(np.nan if decision.z is None else decision.z)
            rel_rows.append(np.nan if decision.rel_change is None else decision.rel_change)
            theta_rows.append(theta_bar.as_array())
            logger.debug(f"--- Iteration {t} --- loss={loss:.6f} loss_bar={loss_bar:.6f} z={decision.z}")
            return batch, theta_hat, decision

        converged_at = None
        t = 0
        while t < cfg.max_iter:
            t += 1
            _, _, decision = advance(t)
            if decision.converged:
                converged_at = t
                logger.info(f"CONVERGED at iteration {t} ({decision.mode_used})")
                logs.append(f"[{t}] CONVERGED ({decision.mode_used})")
                break

        if converged_at is None:
            message = f"no convergence within {cfg.max_iter} iterations; banking anyway"
            logger.warning(f"MAX ITERATIONS REACHED: {message}")
            logs.append(f"[{t}] MAX ITERATIONS REACHED")
            warnings.append(message)

        banked, bank_raw, batches = [], [], []
        for k in range(cfg.m + cfg.r):
            t += 1
            batch, theta_hat, _ = advance(t)
            if k >= cfg.m:
                banked.append(theta_bar)
                bank_raw.append(theta_hat)
                batches.append(batch)

        bank = np.array([c.as_array() for c in banked])
        raw_mean = CoefVector.from_array(bank.mean(axis=0))
        zero_mask = np.max(np.abs(bank[:, 1:]), axis=0) < cfg.tau0
        slopes = np.where(zero_mask, 0.0, raw_mean.slopes)
        theta_hat = CoefVector(intercept=raw_mean.intercept, slopes=slopes)

        logger.info(f"BANKED: {cfg.r} estimates after {cfg.m} burn-in iterations | "
                    f"zeros={int(zero_mask.sum())}/{prepared.p} | iterations={t}")
        logs.append(f"[{t}] BANKED {cfg.r} estimates, {int(zero_mask.sum())} zeros")

        return PandaFit(
            theta_hat=theta_hat,
            raw_mean=raw_mean,
            zero_mask=zero_mask,
            banked=tuple(banked),
            theta_bank_raw=tuple(bank_raw),
            batches=tuple(batches),
            loss_trace=np.array(loss_rows, dtype=float),
            z_trace=np.array(z_rows, dtype=float),
            rel_trace=np.array(rel_rows, dtype=float),
            theta_trace=np.array(theta_rows, dtype=float),
            converged_at=converged_at,
            data=prepared,
            family=family,
            scheme=scheme,
            config=cfg,
            warnings=tuple(warnings),
            logs=tuple(logs),
            elapsed_ms=int((time.time() - start_time) * 1000),
        )


def run_panda(
    family: GlmFamily,
    data: Dataset,
    scheme: NoiseScheme,
    config: PandaConfig | None = None,
    init: CoefVector | None = None,
) -> PandaFit:
    """Run PANDA once; see PandaEngine.run."""
    return PandaEngine(family, scheme, config).run(data, init=init)
