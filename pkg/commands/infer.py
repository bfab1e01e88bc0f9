"""infer: fit (or replay a fit manifest) and write confidence intervals."""
import logging

from services.inference import infer
from utils.errors import EXIT_OK
from utils.io import RunManifest, sha256_file, write_frame, write_json
from .common import (
    add_common_args,
    add_data_args,
    add_model_args,
    add_panda_args,
    ensure_seed,
    finish_manifest,
    output_dir,
    resolve_settings,
    start_manifest,
)
from .fit import FIT_DEFAULTS, fit_from_settings, write_fit_outputs

logger = logging.getLogger(__name__)

INFER_DEFAULTS = {k: v for k, v in FIT_DEFAULTS.items() if k != "test_csv"}


def _manifest_settings(path: str) -> dict:
    """Settings of an earlier fit; warns when its input file has changed since."""
    previous = RunManifest.load(path)
    data_input = previous.inputs.get("data")
    if data_input and sha256_file(data_input["path"]) != data_input["sha256"]:
        logger.warning(f"REPLAY: {data_input['path']} changed since {path} was written")
    settings = dict(previous.settings)
    settings["seed"] = previous.seed
    settings.pop("output", None)
    return settings


def run_infer(args) -> int:
    base = _manifest_settings(args.fit_manifest) if args.fit_manifest else None
    settings = resolve_settings(args, INFER_DEFAULTS, base=base)
    seed, drawn = ensure_seed(settings)
    manifest = start_manifest(args, "infer", settings, seed, drawn)
    if args.fit_manifest:
        manifest.add_input("fit_manifest", args.fit_manifest)
    out = output_dir(settings)

    _, fit = fit_from_settings(settings, seed)
    manifest.add_input("data", settings["data"])
    result = infer(fit, alpha=settings["alpha"])

    outputs = write_fit_outputs(fit, out)
    outputs.append(write_frame(result.to_frame(), out / "inference.csv"))
    outputs.append(write_json(result.to_dict(), out / "inference.json"))

    manifest.logs.extend(fit.logs)
    manifest.warnings.extend(fit.warnings)
    manifest.warnings.extend(result.warnings)
    finish_manifest(manifest, out, outputs)

    print(result.to_frame().to_string(index=False))
    return EXIT_OK


def register_infer_command(subparsers) -> None:
    parser = subparsers.add_parser(
        "infer",
        help="Confidence intervals for every coefficient",
        description="Fit PANDA (from flags or an earlier fit manifest) and write inference.csv and inference.json.",
    )
    add_common_args(parser)
    add_data_args(parser)
    add_model_args(parser)
    add_panda_args(parser)
    parser.add_argument("--fit-manifest", help="manifest.json of an earlier fit to replay")
    parser.set_defaults(handler=run_infer)
