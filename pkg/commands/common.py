"""Shared flags, settings resolution and builders for the subcommands.

Settings are resolved with the precedence command-line flags > YAML config
file > environment (already folded into config.py) > built-in defaults.
"""
import logging
import sys
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from config import (
    DEFAULT_ALPHA,
    DEFAULT_CONVERGENCE,
    DEFAULT_FAMILY,
    DEFAULT_LAMBDA,
    DEFAULT_M,
    DEFAULT_MAX_ITER,
    DEFAULT_N_E,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_R,
    DEFAULT_SCHEME,
    DEFAULT_TAU,
    DEFAULT_TAU0,
    DEFAULT_ZTEST_REGIME,
    N_JOBS,
)
from families import GlmFamily, get_family
from models import Dataset
from schemes import NoiseScheme, get_scheme
from services.panda_engine import CONVERGENCE_MODES, INIT_MODES, ZTEST_REGIMES, PandaConfig, initial_estimate
from utils.errors import ConfigError, UsageError
from utils.io import RunManifest, read_config, read_dataset, read_groups, resolve_columns
from utils.rng import draw_seed

logger = logging.getLogger(__name__)

COMMON_DEFAULTS = {"seed": None, "output": DEFAULT_OUTPUT_DIR, "n_jobs": N_JOBS}

DATA_DEFAULTS = {"data": None, "response": None, "predictors": None}

MODEL_DEFAULTS = {
    "family": DEFAULT_FAMILY,
    "nb_failures": None,
    "dispersion": None,
    "scheme": DEFAULT_SCHEME,
    "lam": DEFAULT_LAMBDA,
    "gamma": None,
    "a": None,
    "sigma2": None,
    "eps_theta": None,
    "groups": None,
    "members": None,
}

PANDA_DEFAULTS = {
    "n_e": DEFAULT_N_E,
    "m": DEFAULT_M,
    "r": DEFAULT_R,
    "max_iter": DEFAULT_MAX_ITER,
    "tau": DEFAULT_TAU,
    "tau0": DEFAULT_TAU0,
    "convergence": DEFAULT_CONVERGENCE,
    "ztest_regime": DEFAULT_ZTEST_REGIME,
    "alpha": DEFAULT_ALPHA,
    "fit_intercept": True,
    "init": "auto",
}

PANDA_KEYS = tuple(PANDA_DEFAULTS)


def add_common_args(parser) -> None:
    parser.add_argument("--config", "-c", help="YAML file with settings (keys mirror the flags)")
    parser.add_argument("--seed", type=int, help="Master seed; drawn and printed when absent")
    parser.add_argument("--output", "-o", help=f"Output directory (default: {DEFAULT_OUTPUT_DIR})")
    parser.add_argument("--n-jobs", type=int, help="Worker processes for tuning and simulation")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging, tracebacks on errors")
    parser.add_argument("--quiet", "-q", action="store_true", help="Only warnings and errors")


def add_data_args(parser) -> None:
    parser.add_argument("--data", "-d", help="Input CSV with a header row")
    parser.add_argument("--response", "-y", help="Name of the response column")
    parser.add_argument("--predictors", help="Comma-separated predictor columns (default: all others)")


def add_model_args(parser) -> None:
    parser.add_argument("--family", help=f"Response family (default: {DEFAULT_FAMILY})")
    parser.add_argument("--nb-failures", type=int, help="Number of failures r (negative_binomial)")
    parser.add_argument("--dispersion", type=float, help="Gaussian dispersion sigma^2 (default: 1)")
    parser.add_argument("--scheme", help=f"Noise scheme (default: {DEFAULT_SCHEME})")
    parser.add_argument("--lam", "--lambda", dest="lam", type=float, help="Noise scale lambda")
    parser.add_argument("--gamma", type=float, help="Bridge / adaptive-lasso exponent")
    parser.add_argument("--a", type=float, help="SCAD shape parameter")
    parser.add_argument("--sigma2", type=float, help="Elastic-net ridge variance")
    parser.add_argument("--eps-theta", type=float, help="Floor on |theta| inside variance formulas")
    parser.add_argument("--groups", help="YAML group file (group_lasso)")
    parser.add_argument("--members", help="Comma-separated columns of the fused block (default: all)")


def add_panda_args(parser) -> None:
    parser.add_argument("--n-e", type=int, help=f"Augmentation rows per iteration (default: {DEFAULT_N_E})")
    parser.add_argument("--m", type=int, help=f"Moving-average window (default: {DEFAULT_M})")
    parser.add_argument("--r", type=int, help=f"Banked iterations (default: {DEFAULT_R})")
    parser.add_argument("--max-iter", "-T", type=int, help=f"Iteration cap (default: {DEFAULT_MAX_ITER})")
    parser.add_argument("--tau", type=float, help=f"Relative-change tolerance (default: {DEFAULT_TAU})")
    parser.add_argument("--tau0", type=float, help=f"Zero threshold (default: {DEFAULT_TAU0})")
    parser.add_argument("--convergence", choices=CONVERGENCE_MODES, help="Convergence rule")
    parser.add_argument("--ztest-regime", choices=ZTEST_REGIMES, help="Denominator of the z statistic")
    parser.add_argument("--alpha", type=float, help=f"Significance level (default: {DEFAULT_ALPHA})")
    parser.add_argument("--no-intercept", dest="fit_intercept", action="store_const", const=False,
                        help="Fit without an intercept")
    parser.add_argument("--init", choices=INIT_MODES, help="Initial estimate (default: auto)")


def resolve_settings(args, defaults: dict, base: dict | None = None) -> dict:
    """Merge defaults, an optional base mapping, the YAML file and explicit flags.

    Raises:
        ConfigError: If the YAML file carries keys no flag of this command has
    """
    settings = dict(defaults)
    if base:
        settings.update({k: v for k, v in base.items() if k in defaults})
    config_path = getattr(args, "config", None)
    if config_path:
        from_file = read_config(config_path)
        unknown = sorted(set(from_file) - set(defaults))
        if unknown:
            raise ConfigError(f"Unknown settings in {config_path}: {unknown}")
        settings.update(from_file)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def explicit_keys(args, defaults: dict) -> set[str]:
    """Settings given by flag or config file rather than taken from defaults."""
    keys = {k for k in defaults if getattr(args, k, None) is not None}
    if getattr(args, "config", None):
        keys |= set(read_config(args.config)) & set(defaults)
    return keys


def as_list(value: Any) -> list[str]:
    """Accept a comma-separated string or a YAML list."""
    if value is None:
        return []
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return [str(v) for v in value]


def as_floats(value: Any) -> list[float]:
    try:
        return [float(v) for v in as_list(value)]
    except ValueError as e:
        raise ConfigError(f"expected numbers, got {value!r}") from e


def ensure_seed(settings: dict) -> tuple[int, str | None]:
    """Return the master seed, drawing and printing one when none was given."""
    if settings.get("seed") is not None:
        return int(settings["seed"]), None
    seed = draw_seed()
    settings["seed"] = seed
    message = f"no seed given; drew seed {seed} (pass --seed {seed} to reproduce)"
    print(f"seed: {seed}", file=sys.stderr)
    logger.warning(f"SEED: {message}")
    return seed, message


def load_data(settings: dict) -> Dataset:
    if not settings.get("data"):
        raise UsageError("an input CSV is required (--data)")
    if not settings.get("response"):
        raise UsageError("the response column is required (--response)")
    return read_dataset(settings["data"], settings["response"], as_list(settings.get("predictors")) or None)


def build_family(settings: dict) -> GlmFamily:
    return get_family(settings["family"], nb_failures=settings.get("nb_failures"),
                      dispersion=settings.get("dispersion"))


def build_config(settings: dict, seed: int | None = None) -> PandaConfig:
    values = {k: settings.get(k) for k in PANDA_KEYS}
    values["seed"] = seed if seed is not None else settings.get("seed")
    return PandaConfig.from_mapping(values)


def build_scheme(settings: dict, data: Dataset, family: GlmFamily, config: PandaConfig) -> NoiseScheme:
    """Build the noise scheme; column-based options are resolved against the data."""
    name = str(settings["scheme"]).strip().lower().replace("-", "_")
    groups = members = pilot = None
    if name == "group_lasso":
        if not settings.get("groups"):
            raise UsageError("group_lasso needs a group file (--groups)")
        groups = read_groups(settings["groups"], data.column_names)
    if name in ("fused_ridge", "fused_lasso") and settings.get("members"):
        members = resolve_columns(as_list(settings["members"]), data.column_names)
    if name == "adaptive_lasso":
        pilot = initial_estimate(family, data.center(), config).slopes
        logger.info(f"PILOT: un-penalized slopes {np.round(pilot, 4).tolist()}")
    return get_scheme(
        name,
        lam=settings.get("lam"),
        gamma=settings.get("gamma"),
        a=settings.get("a"),
        sigma2=settings.get("sigma2"),
        pilot=pilot,
        groups=groups,
        members=members,
        eps_theta=settings.get("eps_theta"),
    )


def output_dir(settings: dict) -> Path:
    path = Path(settings.get("output") or DEFAULT_OUTPUT_DIR)
    path.mkdir(parents=True, exist_ok=True)
    return path


def start_manifest(args, command: str, settings: dict, seed: int | None, drawn: str | None) -> RunManifest:
    """Manifest with the argv needed to replay the run (a drawn seed is appended)."""
    argv = list(getattr(args, "argv", []) or [])
    if drawn is not None:
        argv += ["--seed", str(seed)]
    manifest = RunManifest(command=command, argv=argv, settings=_plain(settings), seed=seed)
    if drawn is not None:
        manifest.warnings.append(drawn)
    if getattr(args, "config", None):
        manifest.add_input("config", args.config)
    return manifest


def finish_manifest(manifest: RunManifest, out: Path, outputs: Iterable[Path]) -> Path:
    for path in outputs:
        manifest.add_output(path)
    path = manifest.write(out / "manifest.json")
    logger.info(f"MANIFEST: {path}")
    return path


def _plain(settings: dict) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in settings.items()}
