"""tune: grid search over lambda * n_e (or n_e in l0 mode) and write the score table."""
import logging

from config import DEFAULT_FOLDS
from services.tuning import CRITERIA, TuneGrid, tune
from utils.errors import EXIT_OK, UsageError
from utils.io import write_frame, write_json
from .common import (
    COMMON_DEFAULTS,
    DATA_DEFAULTS,
    MODEL_DEFAULTS,
    PANDA_DEFAULTS,
    add_common_args,
    add_data_args,
    add_model_args,
    add_panda_args,
    as_floats,
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
from .fit import write_fit_outputs

logger = logging.getLogger(__name__)

TUNE_DEFAULTS = {
    **COMMON_DEFAULTS,
    **DATA_DEFAULTS,
    **MODEL_DEFAULTS,
    **PANDA_DEFAULTS,
    "lambda_ne": None,
    "n_e_grid": None,
    "gamma_grid": None,
    "a_grid": None,
    "sigma2_grid": None,
    "criterion": "cv",
    "folds": DEFAULT_FOLDS,
}


def build_grid(settings: dict, scheme) -> TuneGrid:
    lambda_ne = as_floats(settings.get("lambda_ne"))
    n_e_values = [int(v) for v in as_floats(settings.get("n_e_grid"))]
    if not lambda_ne and not n_e_values:
        raise UsageError("give --lambda-ne values (or --n-e-grid for the l0 scheme)")
    return TuneGrid(
        scheme_template=scheme,
        lambda_ne_values=tuple(lambda_ne),
        n_e_values=tuple(n_e_values),
        criterion=settings["criterion"],
        folds=int(settings["folds"]),
        gamma_values=tuple(as_floats(settings.get("gamma_grid"))),
        a_values=tuple(as_floats(settings.get("a_grid"))),
        sigma2_values=tuple(as_floats(settings.get("sigma2_grid"))),
    )


def run_tune(args) -> int:
    settings = resolve_settings(args, TUNE_DEFAULTS)
    seed, drawn = ensure_seed(settings)
    manifest = start_manifest(args, "tune", settings, seed, drawn)
    out = output_dir(settings)

    data = load_data(settings)
    manifest.add_input("data", settings["data"])
    family = build_family(settings)
    config = build_config(settings, seed)
    grid = build_grid(settings, build_scheme(settings, data, family, config))

    result = tune(family, data, grid, config, n_jobs=int(settings["n_jobs"]))
    outputs = [
        write_frame(result.scores, out / "tuning_scores.csv"),
        write_json({k: v for k, v in result.to_dict().items() if k != "scores"}, out / "best.json"),
    ]
    if result.refit is not None:
        outputs += write_fit_outputs(result.refit, out)
        manifest.logs.extend(result.refit.logs)
        manifest.warnings.extend(result.refit.warnings)
    finish_manifest(manifest, out, outputs)

    print(result.scores.to_string(index=False))
    best = result.scores.loc[result.best_index]
    print(f"\nbest: candidate {result.best_index} | lambda_ne={best['lambda_ne']:g} | n_e={int(best['n_e'])} "
          f"| {grid.criterion}={best['score']:.6g}")
    return EXIT_OK


def register_tune_command(subparsers) -> None:
    parser = subparsers.add_parser(
        "tune",
        help="Select lambda * n_e (or n_e) by CV, AIC or BIC",
        description="Evaluate a grid of noise scales and refit the best candidate on the full data.",
    )
    add_common_args(parser)
    add_data_args(parser)
    add_model_args(parser)
    add_panda_args(parser)
    parser.add_argument("--lambda-ne", help="Comma-separated lambda * n_e values")
    parser.add_argument("--n-e-grid", help="Comma-separated n_e values (the grid in l0 mode)")
    parser.add_argument("--gamma-grid", help="Comma-separated exponents to try")
    parser.add_argument("--a-grid", help="Comma-separated SCAD shapes to try")
    parser.add_argument("--sigma2-grid", help="Comma-separated elastic-net ridge variances to try")
    parser.add_argument("--criterion", choices=CRITERIA, help="Selection criterion (default: cv)")
    parser.add_argument("--folds", "-K", type=int, help=f"CV folds (default: {DEFAULT_FOLDS})")
    parser.set_defaults(handler=run_tune)
