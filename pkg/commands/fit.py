"""fit: run PANDA on a CSV and write coefficients, trace and manifest."""
import logging

import numpy as np
import pandas as pd

from families import BernoulliFamily
from services.panda_engine import run_panda
from simulation.metrics import classification_rates, mean_deviance
from utils.errors import EXIT_OK
from utils.io import read_dataset, write_frame, write_json
from .common import (
    COMMON_DEFAULTS,
    DATA_DEFAULTS,
    MODEL_DEFAULTS,
    PANDA_DEFAULTS,
    add_common_args,
    add_data_args,
    add_model_args,
    add_panda_args,
    build_config,
    build_family,
    build_scheme,
    ensure_seed,
    finish_manifest,
    load_data,
    output_dir,
    resolve_settings,
    start_manifest,
)

logger = logging.getLogger(__name__)

FIT_DEFAULTS = {**COMMON_DEFAULTS, **DATA_DEFAULTS, **MODEL_DEFAULTS, **PANDA_DEFAULTS, "test_csv": None}


def fit_from_settings(settings: dict, seed: int):
    """Load the data and run PANDA; shared with the infer command."""
    data = load_data(settings)
    family = build_family(settings)
    config = build_config(settings, seed)
    scheme = build_scheme(settings, data, family, config)
    fit = run_panda(family, data, scheme, config)
    return data, fit


def write_fit_outputs(fit, out) -> list:
    paths = [
        write_frame(fit.coefficient_frame(), out / "coefficients.csv"),
        write_frame(fit.trace_frame(), out / "trace.csv"),
    ]
    return paths


def score_test_file(fit, settings: dict, out) -> list:
    """Predict a held-out CSV and report its mean deviance."""
    test = read_dataset(settings["test_csv"], settings["response"], list(fit.column_names))
    eta = fit.linear_predictor(test.X)
    mu = fit.family.mean(eta)
    metrics = {"n_test": test.n, "mean_deviance": mean_deviance(fit.family, test.y, eta)}
    if isinstance(fit.family, BernoulliFamily):
        metrics.update(classification_rates(test.y, mu))
    logger.info(f"TEST: {settings['test_csv']} | " + " ".join(f"{k}={v:.4g}" for k, v in metrics.items()))
    predictions = pd.DataFrame({"y": test.y, "eta": eta, "mean": np.asarray(mu, dtype=float)})
    return [
        write_frame(predictions, out / "predictions.csv"),
        write_json(metrics, out / "test_metrics.json"),
    ]


def run_fit(args) -> int:
    settings = resolve_settings(args, FIT_DEFAULTS)
    seed, drawn = ensure_seed(settings)
    manifest = start_manifest(args, "fit", settings, seed, drawn)
    out = output_dir(settings)

    data, fit = fit_from_settings(settings, seed)
    manifest.add_input("data", settings["data"])
    outputs = write_fit_outputs(fit, out)
    if settings.get("test_csv"):
        manifest.add_input("test_csv", settings["test_csv"])
        outputs += score_test_file(fit, settings, out)

    manifest.logs.extend(fit.logs)
    manifest.warnings.extend(fit.warnings)
    finish_manifest(manifest, out, outputs)

    print(fit.coefficient_frame().to_string(index=False))
    print(f"\nzeros: {int(fit.zero_mask.sum())}/{data.p} | converged_at: {fit.converged_at} "
          f"| iterations: {fit.n_iterations} | output: {out}")
    return EXIT_OK


def register_fit_command(subparsers) -> None:
    parser = subparsers.add_parser(
        "fit",
        help="Fit a regularized GLM by noise augmentation",
        description="Run PANDA on a CSV file and write coefficients.csv, trace.csv and manifest.json.",
    )
    add_common_args(parser)
    add_data_args(parser)
    add_model_args(parser)
    add_panda_args(parser)
    parser.add_argument("--test-csv", help="Held-out CSV to score with the fitted model")
    parser.set_defaults(handler=run_fit)

